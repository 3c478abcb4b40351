"""Tests package for the driftwalk library."""
