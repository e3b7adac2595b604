"""Exact computation of finite and affine Hall-Littlewood functions by
independent routes: combinatorial basis sums, Weyl-group symmetrization and
Brion-type vertex decompositions of lattice polyhedra."""

__version__ = "0.1.0"
