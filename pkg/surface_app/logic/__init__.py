"""Logic module."""

from .surface import SurfaceService, surface_service

__all__ = [
    "SurfaceService",
    "surface_service",
]
