"""Command agents for QUARK."""
