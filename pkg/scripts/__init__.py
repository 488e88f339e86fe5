"""Scripts for QUARK."""
