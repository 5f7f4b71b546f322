"""Shared helpers for DropComb."""
