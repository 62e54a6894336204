"""Run configuration and output files."""
