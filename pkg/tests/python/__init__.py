"""
Tests for periodic-stokes: grids and transforms, symbols, solver stages, the
verification harness and the command-line surface.
"""
