"""Generic Hecke algebras of the rank-2 complex reflection groups G4 to G15.

Builds each algebra on an explicit z-basis, certifies the basis through the
defining relations, and checks the symmetrizing-trace conditions through
Gram-matrix determinants.
"""

__version__ = "0.1.0"
