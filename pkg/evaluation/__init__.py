"""Recommendation protocol, ranking metrics and feeling/style similarity."""
