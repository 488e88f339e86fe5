"""Core modules for QUARK."""
