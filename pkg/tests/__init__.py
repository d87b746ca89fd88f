"""Tests for wave-cluster package."""
