"""Output modules for QUARK."""
