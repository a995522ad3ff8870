"""Exact computations with q-de Rham complexes, q-divided powers and fixed points of equivariant ku.

Submodules:

* ``qring``   truncated rings such as Z[q]/(q-1)^N, Z[1/N][q]/(q^m-1)^N, Z/p^K[q]/Phi_m^N
* ``lattice`` integral row lattices, Hermite and Smith forms
* ``polyqdr`` the q-de Rham complex of a polynomial ring, its q-Hodge filtration and cohomology
* ``qpd``     q-divided powers and the q-PD envelope lattice
* ``kufix``   per-degree presentations of homotopy rings of ku fixed points
* ``checks``  digest-pinned check manifest used by the CLI
"""

from .qring import PrecisionError, QSeries, TruncContext, parse_context

__all__ = ["PrecisionError", "QSeries", "TruncContext", "parse_context"]
__version__ = "0.1.0"
