"""Unit tests for cptalloc."""
