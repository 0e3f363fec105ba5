"""HTTP service exposing the symmetry-test library."""

from .app import app, create_app

__all__ = ["app", "create_app"]
