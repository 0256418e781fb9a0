"""cftk: exact and numerical checks for unitary conformal field theory constructions.

Submodules:
  exact        rationals, partitions, graded vectors, q-series, exact LDL
  virasoro     Verma modules, Gram matrices, irreducible truncations, sl(2) bound
  geometry     Koenigs semigroups, circle flows, annulus interiors
  annulus      truncated generalized-annulus operators and Trotter products
  fermion      charged free fermion vertex superalgebra
  intertwiner  descent intertwining operators
  codes        binary codes, code lattices, cocycles, braid signs
  cli, suite   command line and acceptance battery
"""

__version__ = "0.1.0"
