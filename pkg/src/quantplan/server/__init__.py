"""FastAPI service wrapping the planning core."""

from .app import create_app

__all__ = ["create_app"]
