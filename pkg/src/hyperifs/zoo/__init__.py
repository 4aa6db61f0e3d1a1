"""Worked example systems on the circle, torus, and sphere."""

from .circle import CircleExampleConfig, build_circle_system
from .torus import TorusExampleConfig, build_torus_system
from .sphere import SphereExampleConfig, build_sphere_system

__all__ = [
    "CircleExampleConfig", "build_circle_system",
    "TorusExampleConfig", "build_torus_system",
    "SphereExampleConfig", "build_sphere_system",
]
