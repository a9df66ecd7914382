"""
Configuration management for the non-malleable code toolkit.
"""

from .settings import Settings

__all__ = ["Settings"]
