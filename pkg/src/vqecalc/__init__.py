"""VQE-based molecular energy, force and geometry-optimization engine."""

from .chemcore import Geometry, bond_angle, bond_length, displace, parse_xyz, write_xyz
from .engine import (CalcResult, Engine, EngineConfig, OptTrajectory,
                     compute_energy, compute_forces, optimize_geometry)

__all__ = [
    "Geometry", "parse_xyz", "write_xyz", "displace", "bond_length", "bond_angle",
    "Engine", "EngineConfig", "CalcResult", "OptTrajectory",
    "compute_energy", "compute_forces", "optimize_geometry",
]

__version__ = "0.1.0"
