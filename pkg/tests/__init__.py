"""Unit test package for tether."""
