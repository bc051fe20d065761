"""Command-line package."""

from .app import run

__all__ = ['run']
