from periodic_stokes.solvers import BoundaryData, DataBundle, StokesSolution, solve_full
from periodic_stokes.spectral_core import TorusPlaneGrid

__all__ = ["BoundaryData", "DataBundle", "StokesSolution", "TorusPlaneGrid", "solve_full"]
