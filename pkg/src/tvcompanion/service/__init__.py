"""FastAPI session service wrapping the core package."""

from .app import ServiceSettings, create_app

__all__ = ["ServiceSettings", "create_app"]
