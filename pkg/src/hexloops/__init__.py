"""Critical-percolation boundary loops on the hexagonal lattice.

The package builds the full ensemble of cluster boundary contours for
critical site percolation inside a disc, by an inductive sequence of
interface explorations, verifies it against an independent flood-fill
oracle, and provides a numerical chordal SLE(6) comparator plus Monte
Carlo statistics for the ensemble's structural properties.
"""

__version__ = "0.1.0"
