"""Benchmark cases."""
