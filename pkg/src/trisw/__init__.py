"""Central-upwind shallow-water solver on unstructured triangular meshes."""
from .bathymetry import BathymetryField, sample_bathymetry
from .boundary import BoundaryCondition
from .mesh import Mesh, generate_rect_mesh, load_mesh, locate_cell, save_mesh
from .reconstruction import CellStateField

__version__ = "0.1.0"

__all__ = [
    "BathymetryField", "BoundaryCondition", "CellStateField", "Mesh",
    "generate_rect_mesh", "load_mesh", "locate_cell", "sample_bathymetry", "save_mesh",
]
