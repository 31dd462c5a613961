"""Finite-difference simulator for a field-free spin-orbit-torque MTJ free layer.

Interfacial DMI plus spin-orbit torque create a chiral intermediate texture;
a voltage-controlled anisotropy gradient then decides which uniform state
the layer relaxes into.
"""

from .materials import DriveSchedule, DriveSegment, MaterialParams, VcmaProfile, anisotropy_map, gradient_magnitude
from .mesh import Mesh, RegionMask, ScalarField, VectorField, mean_vector, neighbors

__all__ = [
    "DriveSchedule",
    "DriveSegment",
    "MaterialParams",
    "Mesh",
    "RegionMask",
    "ScalarField",
    "VcmaProfile",
    "VectorField",
    "anisotropy_map",
    "gradient_magnitude",
    "mean_vector",
    "neighbors",
]
