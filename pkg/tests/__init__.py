"""Test suite for cptalloc."""
