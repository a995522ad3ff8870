"""Exact integer lattices on sparse rows.

A row is a ``dict`` mapping column index to a nonzero ``int``.  A lattice is
the Z-span of finitely many rows inside Z^n, optionally enlarged by
``modulus * Z^n`` so that it models a submodule of (Z/modulus)^n.

Everything here is plain integer arithmetic: Hermite normal form by bucketed
Euclidean elimination, left kernels through an augmented identity block,
and invariant factors by alternating row/column echelon passes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping, Sequence

Row = dict


def clean(row: Mapping[int, int], modulus: int = 0, limit: int | None = None) -> dict:
    """Drop zeros; reduce entries below ``limit`` modulo ``modulus``."""
    out = {}
    for c, v in row.items():
        if modulus and (limit is None or c < limit):
            v %= modulus
        if v:
            out[c] = v
    return out


def axpy(row: Row, f: int, other: Row) -> Row:
    """Return ``row - f * other`` as a new sparse row."""
    out = dict(row)
    for c, v in other.items():
        w = out.get(c, 0) - f * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return out


def _lead(row: Row) -> int:
    return min(row)


def echelon(rows: Iterable[Mapping[int, int]], ncols: int = 0, modulus: int = 0,
            modulus_cols: int | None = None, reduce: bool = True) -> list[Row]:
    """Hermite normal form basis of the span of ``rows``.

    With ``modulus`` the rows ``modulus * e_c`` for ``c < modulus_cols``
    (default ``ncols``) are added to the span.  The result has strictly
    increasing pivot columns with positive pivots; with ``reduce`` the
    entries above each pivot lie in ``[0, pivot)``, which makes the basis
    canonical.
    """
    mcols = ncols if modulus_cols is None else modulus_cols
    buckets: dict[int, list[Row]] = {}
    heap: list[int] = []

    def push(r: Row) -> None:
        c = _lead(r)
        if c not in buckets:
            buckets[c] = []
            heapq.heappush(heap, c)
        buckets[c].append(r)

    for r in rows:
        r = clean(r, modulus, mcols)
        if r:
            push(r)
    if modulus:
        for c in range(mcols):
            push({c: modulus})

    basis: list[Row] = []
    while heap:
        c = heapq.heappop(heap)
        group = buckets.pop(c)
        while len(group) > 1:
            group.sort(key=lambda r: abs(r[c]))
            piv = group[0]
            keep = [piv]
            for r in group[1:]:
                r2 = clean(axpy(r, r[c] // piv[c], piv), modulus, mcols)
                if not r2:
                    continue
                if c in r2:
                    keep.append(r2)
                else:
                    push(r2)
            group = keep
        piv = group[0]
        if piv[c] < 0:
            piv = {k: -v for k, v in piv.items()}
        basis.append(piv)

    if reduce:
        for j, bj in enumerate(basis):
            cj = _lead(bj)
            pj = bj[cj]
            for i in range(j):
                v = basis[i].get(cj, 0)
                if v and not 0 <= v < pj:
                    basis[i] = axpy(basis[i], v // pj, bj)
    return basis


def left_kernel(rows: Sequence[Mapping[int, int]], ncols: int, modulus: int = 0) -> list[Row]:
    """Basis of ``{x in Z^len(rows) : sum x_i rows_i == 0 (mod modulus)}``."""
    aug = []
    for i, r in enumerate(rows):
        a = {c: v for c, v in r.items() if c < ncols}
        a[ncols + i] = 1
        aug.append(a)
    if modulus:
        aug.extend({c: modulus} for c in range(ncols))
    basis = echelon(aug, reduce=False)
    out = []
    for b in basis:
        if _lead(b) >= ncols:
            out.append({c - ncols: v for c, v in b.items()})
    return echelon(out)


def invariant_factors(rows: Sequence[Mapping[int, int]], ncols: int, modulus: int = 0) -> list[int]:
    """Invariant factors of ``Z^ncols / (span(rows) + modulus Z^ncols)``.

    Units are dropped; free summands are reported as ``0`` at the end, so
    the list is in divisibility order.
    """
    mat = echelon(rows, ncols, modulus, reduce=False)
    while True:
        # transpose and re-echelon until the matrix is diagonal
        t: dict[int, Row] = {}
        for i, r in enumerate(mat):
            for c, v in r.items():
                t.setdefault(c, {})[i] = v
        if all(len(r) == 1 for r in mat) and all(len(r) == 1 for r in t.values()):
            break
        mat = echelon(t.values(), reduce=False)
    diag = [abs(next(iter(r.values()))) for r in mat]
    # smooth the diagonal into divisibility order
    diag.sort()
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                a, b = diag[i], diag[j]
                g = gcd(a, b)
                if g != a:
                    diag[i], diag[j] = g, a * b // g
                    changed = True
        diag.sort()
    out = [d for d in diag if d != 1]
    out.extend([0] * (ncols - len(diag)))
    return out


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^ncols (plus ``modulus * Z^ncols`` when nonzero).

    The stored basis is the canonical Hermite normal form, so equality of
    lattices is equality of the dataclass.
    """

    ncols: int
    basis: tuple = field(default=())
    modulus: int = 0

    @classmethod
    def span(cls, rows: Iterable[Mapping[int, int]], ncols: int, modulus: int = 0) -> "Lattice":
        b = echelon(rows, ncols, modulus)
        return cls(ncols, tuple(tuple(sorted(r.items())) for r in b), modulus)

    @classmethod
    def full(cls, ncols: int, modulus: int = 0) -> "Lattice":
        return cls.span(({c: 1} for c in range(ncols)), ncols, modulus)

    @classmethod
    def zero(cls, ncols: int, modulus: int = 0) -> "Lattice":
        return cls.span((), ncols, modulus)

    @property
    def rows(self) -> list[Row]:
        return [dict(r) for r in self.basis]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, v: Mapping[int, int]) -> list[int] | None:
        """Integer coefficients of ``v`` in the basis, or None if ``v`` is outside."""
        v = clean(v, self.modulus)
        coeffs = []
        for r in self.basis:
            c, p = r[0]
            a = v.get(c, 0)
            if a % p:
                return None
            f = a // p
            coeffs.append(f)
            if f:
                v = clean(axpy(v, f, dict(r)), self.modulus)
        return coeffs if not v else None

    def __contains__(self, v: Mapping[int, int]) -> bool:
        return self.coordinates(v) is not None

    def issubset(self, other: "Lattice") -> bool:
        return all(dict(r) in other for r in self.basis)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.span(self.rows + other.rows, self.ncols, self.modulus)

    def image(self, matrix: Sequence[Mapping[int, int]], ncols: int, modulus: int | None = None) -> "Lattice":
        """Image under ``v -> v @ matrix`` (row i of ``matrix`` is the image of e_i)."""
        mod = self.modulus if modulus is None else modulus
        return Lattice.span((vecmat(r, matrix) for r in self.rows), ncols, mod)

    def preimage_kernel(self, matrix: Sequence[Mapping[int, int]], ncols: int, modulus: int = 0) -> "Lattice":
        """Sublattice of elements whose image under ``matrix`` vanishes (mod ``modulus``)."""
        rows = self.rows
        imgs = [vecmat(r, matrix) for r in rows]
        ker = left_kernel(imgs, ncols, modulus)
        out = [combine(k, rows) for k in ker]
        return Lattice.span(out, self.ncols, self.modulus)

    def subquotient(self, sub: "Lattice") -> list[int]:
        """Invariant factors of ``self / sub``; ``sub`` must be contained in ``self``."""
        rows = []
        for r in sub.basis:
            co = self.coordinates(dict(r))
            if co is None:
                raise ValueError("sublattice not contained in lattice")
            rows.append({i: c for i, c in enumerate(co) if c})
        return invariant_factors(rows, self.rank)

    def project(self, cols: Sequence[int]) -> "Lattice":
        """Image under the coordinate projection onto ``cols`` (renumbered 0..)."""
        pos = {c: i for i, c in enumerate(cols)}
        out = []
        for r in self.basis:
            out.append({pos[c]: v for c, v in r if c in pos})
        return Lattice.span(out, len(cols), self.modulus)

    def index_in(self, other: "Lattice") -> int:
        """Index ``[other : self]`` (0 if infinite)."""
        f = other.subquotient(self)
        out = 1
        for d in f:
            out *= d
        return out


def vecmat(v: Mapping[int, int], matrix: Sequence[Mapping[int, int]]) -> Row:
    out: Row = {}
    for i, a in v.items():
        for c, b in matrix[i].items():
            w = out.get(c, 0) + a * b
            if w:
                out[c] = w
            else:
                out.pop(c, None)
    return out


def combine(coeffs: Mapping[int, int], rows: Sequence[Mapping[int, int]]) -> Row:
    out: Row = {}
    for i, a in coeffs.items():
        for c, b in rows[i].items():
            w = out.get(c, 0) + a * b
            if w:
                out[c] = w
            else:
                out.pop(c, None)
    return out


def matmul(a: Sequence[Mapping[int, int]], b: Sequence[Mapping[int, int]]) -> list[Row]:
    return [vecmat(r, b) for r in a]


def format_factors(factors: Iterable[int]) -> list[str]:
    return [str(f) for f in factors]
