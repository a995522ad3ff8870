"""Coordinate q-de Rham complexes, their q-Hodge filtration and cohomology.

Polynomials in x_1..x_n carry coefficients in a (q-1)-adically truncated
ring.  The differential replaces d/dx_i by the q-derivative
x_i^m -> [m]_q x_i^(m-1); the q-Hodge filtration multiplies the degree-j
term by (q-1)^max(i-j, 0).

Cohomology is computed weight by weight after flattening every QSeries
coordinate to its N integer coefficients, so each piece is a finite integer
lattice problem.
"""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Sequence

from .lattice import Lattice, matmul
from .qring import (Int, IntLocalized, PrecisionError, QMinusOnePow, QSeries, TruncContext,
                    q_integer)


def monomials(nvars: int, degree: int) -> list[tuple]:
    """Exponent vectors of total degree ``degree``, in lexicographically descending order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


# ---------------------------------------------------------------------------
# polynomials and forms


@dataclass(frozen=True)
class QPolynomial:
    """Polynomial in ``nvars`` variables with QSeries coefficients, x-degree at most ``bound``."""

    ctx: TruncContext
    nvars: int
    terms: tuple = ()  # sorted ((exponent, QSeries), ...), no zero coefficients
    bound: int = 8

    @classmethod
    def from_dict(cls, ctx, nvars, terms: dict, bound: int = 8) -> "QPolynomial":
        clean = []
        for e, c in terms.items():
            if len(e) != nvars or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e}")
            if sum(e) > bound:
                raise ValueError(f"monomial {e} exceeds x-degree bound {bound}")
            if not isinstance(c, QSeries):
                c = ctx.scalar(c)
            if not c.is_zero():
                clean.append((tuple(e), c))
        return cls(ctx, nvars, tuple(sorted(clean, key=lambda t: t[0])), bound)

    @classmethod
    def variable(cls, ctx, nvars, i, bound=8) -> "QPolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(ctx, nvars, {tuple(e): 1}, bound)

    @property
    def as_dict(self) -> dict:
        return dict(self.terms)

    def _new(self, d: dict) -> "QPolynomial":
        return QPolynomial.from_dict(self.ctx, self.nvars, d, self.bound)

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        d = self.as_dict
        for e, c in other.terms:
            d[e] = d[e] + c if e in d else c
        return self._new(d)

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return self._new({e: c * other for e, c in self.terms})
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d[e] + c1 * c2 if e in d else c1 * c2
        return self._new(d)

    def is_zero(self) -> bool:
        return not self.terms

    def sigma(self, i: int) -> "QPolynomial":
        """Substitute x_i -> q x_i."""
        q = self.ctx.q()
        return self._new({e: c * q ** e[i] for e, c in self.terms})


def q_partial(f: QPolynomial, i: int) -> QPolynomial:
    """q-derivative in x_i: x_i^m u -> [m]_q x_i^(m-1) u."""
    if not 0 <= i < f.nvars:
        raise IndexError(f"variable index {i} out of range")
    d: dict = {}
    for e, c in f.terms:
        m = e[i]
        if m:
            e2 = e[:i] + (m - 1,) + e[i + 1:]
            term = c * q_integer(m, f.ctx)
            d[e2] = d[e2] + term if e2 in d else term
    return f._new(d)


@dataclass(frozen=True)
class QForm:
    """Differential form of degree ``degree``: components indexed by sorted variable subsets."""

    degree: int
    components: tuple  # ((subset, QPolynomial), ...)

    @classmethod
    def from_dict(cls, degree: int, comps: dict) -> "QForm":
        items = [(tuple(k), v) for k, v in comps.items() if not v.is_zero()]
        for k, _ in items:
            if len(k) != degree or list(k) != sorted(set(k)):
                raise ValueError(f"bad index set {k} for a {degree}-form")
        return cls(degree, tuple(sorted(items, key=lambda t: t[0])))

    def is_zero(self) -> bool:
        return not self.components


def q_nabla(form: QForm, nvars: int) -> QForm:
    """The differential f dx_I -> sum_i q_partial_i(f) dx_i ^ dx_I."""
    out: dict = {}
    for subset, f in form.components:
        for i in range(nvars):
            if i in subset:
                continue
            g = q_partial(f, i)
            if g.is_zero():
                continue
            sign = (-1) ** sum(1 for k in subset if k < i)
            key = tuple(sorted(subset + (i,)))
            g = g if sign > 0 else -g
            out[key] = out[key] + g if key in out else g
    return QForm.from_dict(form.degree + 1, out)


# ---------------------------------------------------------------------------
# filtered complexes


@dataclass
class FilteredComplex:
    """Per-weight flattened cochain complex with a descending filtration.

    ``labels[(j, w)]`` lists the monomial forms ``(exponent, subset)`` of
    cohomological degree j and weight w; coordinate ``a * N + s`` is the
    (q-1)^s-coefficient of label a.  ``diff[(j, w)]`` holds sparse rows (one
    per source coordinate) of the map into ``(j + 1, w)``.  ``fil[(i, j, w)]``
    is the level-i sublattice.
    """

    nvars: int
    ctx: TruncContext
    max_weight: int
    depth: int
    labels: dict = field(default_factory=dict)
    diff: dict = field(default_factory=dict)
    fil: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.ctx.size

    @property
    def modulus(self) -> int:
        return self.ctx.scalar_modulus

    def rank(self, j: int, w: int) -> int:
        return len(self.labels.get((j, w), ())) * self.N

    def keys(self) -> list[tuple]:
        return sorted(self.labels, key=lambda k: (k[0], k[1]))

    def times_q_minus_one(self, j: int, w: int) -> list[dict]:
        """Sparse matrix of multiplication by (q-1) on the (j, w) piece."""
        N = self.N
        rows = []
        for a in range(len(self.labels.get((j, w), ()))):
            for s in range(N):
                rows.append({a * N + s + 1: 1} if s + 1 < N else {})
        return rows

    def check_d_squared(self) -> bool:
        for (j, w), d in self.diff.items():
            nxt = self.diff.get((j + 1, w))
            if nxt is None:
                continue
            for r in matmul(d, nxt):
                if any(v % self.modulus if self.modulus else v for v in r.values()):
                    return False
        return True

    def check_filtration(self) -> dict:
        """Lattice checks of the filtration shape; returns named booleans."""
        res = {"descending": True, "q_minus_one_shift": True, "full_above": True, "subcomplex": True}
        for (j, w) in self.keys():
            full = Lattice.full(self.rank(j, w), self.modulus)
            mult = self.times_q_minus_one(j, w)
            for i in range(self.depth + 1):
                F = self.fil[(i, j, w)]
                if i < self.depth:
                    G = self.fil[(i + 1, j, w)]
                    res["descending"] &= G.issubset(F)
                    res["q_minus_one_shift"] &= F.image(mult, self.rank(j, w)).issubset(G)
                if j >= i:
                    res["full_above"] &= F == full
                if (j + 1, w) in self.labels:
                    img = F.image(self.diff[(j, w)], self.rank(j + 1, w))
                    res["subcomplex"] &= img.issubset(self.fil[(i, j + 1, w)])
        return res

    def to_json(self) -> dict:
        return {
            "vars": self.nvars,
            "ctx": str(self.ctx),
            "max_weight": self.max_weight,
            "depth": self.depth,
            "pieces": [
                {"degree": j, "weight": w, "rank": str(self.rank(j, w)),
                 "basis_labels": [form_label(e, s) for e, s in self.labels[(j, w)]]}
                for (j, w) in self.keys()
            ],
        }


def form_label(e: tuple, subset: tuple) -> str:
    mono = "*".join(f"x{i + 1}^{k}" if k > 1 else f"x{i + 1}" for i, k in enumerate(e) if k) or "1"
    if subset:
        mono += "*" + "^".join(f"dx{i + 1}" for i in subset)
    return mono


def _fil_lattice(n_labels: int, N: int, shift: int, modulus: int) -> Lattice:
    rows = [{a * N + s: 1} for a in range(n_labels) for s in range(shift, N)]
    return Lattice.span(rows, n_labels * N, modulus)


def build_qdr(nvars: int, ctx: TruncContext, degree_bound: int, depth: int,
              max_weight: int | None = None) -> FilteredComplex:
    """The coordinate q-de Rham complex of Z[x_1..x_n] with its q-Hodge filtration.

    Weights run up to ``max_weight`` (default ``degree_bound``); every
    monomial form of weight w then has x-degree at most the bound, so each
    weight piece is complete.
    """
    if not isinstance(ctx.qmod, QMinusOnePow):
        raise ValueError("the q-de Rham complex needs a (q-1)-power truncation")
    if isinstance(ctx.base, IntLocalized):
        raise ValueError("flattening needs an integral base (Z or Z/p^K)")
    N = ctx.size
    if depth > N:
        raise ValueError(f"filtration depth {depth} exceeds truncation order {N}")
    W = degree_bound if max_weight is None else max_weight
    if W > degree_bound:
        raise ValueError(f"weight bound {W} exceeds x-degree bound {degree_bound}")
    c = FilteredComplex(nvars, ctx, W, depth)
    qint = {m: q_integer(m, ctx).coeffs for m in range(1, degree_bound + 1)}
    for w in range(W + 1):
        for j in range(min(nvars, w) + 1):
            labels = [(e, s) for s in itertools.combinations(range(nvars), j) for e in monomials(nvars, w - j)]
            c.labels[(j, w)] = labels
    for (j, w), labels in c.labels.items():
        if (j + 1, w) not in c.labels:
            continue
        index = {lab: k for k, lab in enumerate(c.labels[(j + 1, w)])}
        rows = []
        for e, subset in labels:
            terms = []
            for i in range(nvars):
                if i in subset or e[i] == 0:
                    continue
                sign = (-1) ** sum(1 for k in subset if k < i)
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms.append((index[(e2, tuple(sorted(subset + (i,))))], sign, qint[e[i]]))
            for s in range(N):
                row: dict = {}
                for b, sign, coeffs in terms:
                    for k in range(N - s):
                        v = coeffs[k]
                        if v:
                            row[b * N + s + k] = row.get(b * N + s + k, 0) + sign * int(v)
                rows.append({k: v for k, v in row.items() if v})
        c.diff[(j, w)] = rows
    mod = ctx.scalar_modulus
    for (j, w), labels in c.labels.items():
        for i in range(depth + 1):
            c.fil[(i, j, w)] = _fil_lattice(len(labels), N, max(i - j, 0), mod)
    return c


@dataclass
class GradedModule:
    """Invariant factors per (cohomological degree, weight); ``0`` marks a free summand."""

    pieces: dict = field(default_factory=dict)
    level: int = 0

    def __getitem__(self, key) -> list[int]:
        return self.pieces.get(key, [])

    def to_json(self) -> list[dict]:
        return [
            {"degree": j, "weight": w, "invariant_factors": [str(f) for f in self.pieces[(j, w)]]}
            for (j, w) in sorted(self.pieces)
        ]


def _cohomology_piece(c: FilteredComplex, i: int, j: int, w: int) -> list[int]:
    F = c.fil[(i, j, w)]
    if (j + 1, w) in c.labels:
        Z = F.preimage_kernel(c.diff[(j, w)], c.rank(j + 1, w), c.modulus)
    else:
        Z = F
    if (j - 1, w) in c.labels:
        B = c.fil[(i, j - 1, w)].image(c.diff[(j - 1, w)], c.rank(j, w))
    else:
        B = Lattice.zero(c.rank(j, w), c.modulus)
    return Z.subquotient(B)


def cohomology(c: FilteredComplex, level: int = 0, max_weight: int | None = None, jobs: int = 1) -> GradedModule:
    """Cohomology of the level-``level`` subcomplex, weight by weight."""
    if level > c.depth:
        raise ValueError(f"level {level} beyond filtration depth {c.depth}")
    W = c.max_weight if max_weight is None else max_weight
    if W > c.max_weight:
        raise ValueError(f"weight {W} beyond the built complex ({c.max_weight})")
    keys = [k for k in c.keys() if k[1] <= W]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            results = list(ex.map(lambda k: _cohomology_piece(c, level, *k), keys))
    else:
        results = [_cohomology_piece(c, level, *k) for k in keys]
    return GradedModule(dict(zip(keys, results)), level)


def reduce_mod_q1(c: FilteredComplex) -> FilteredComplex:
    """Set q = 1: keep only the (q-1)^0 coordinate of everything."""
    N = c.N
    out = FilteredComplex(c.nvars, c.ctx.with_qmod(QMinusOnePow(1)), c.max_weight, c.depth)
    out.labels = dict(c.labels)
    for (j, w), rows in c.diff.items():
        out.diff[(j, w)] = [{k // N: v for k, v in rows[a * N].items() if k % N == 0}
                            for a in range(len(c.labels[(j, w)]))]
    for (i, j, w), F in c.fil.items():
        cols = [a * N for a in range(len(c.labels[(j, w)]))]
        out.fil[(i, j, w)] = F.project(cols)
    return out


def hodge_graded_ranks(c: FilteredComplex) -> dict:
    """Ranks of fil^i / fil^(i+1) per (i, j, w) for i < depth."""
    out = {}
    for (j, w) in c.keys():
        for i in range(c.depth):
            out[(i, j, w)] = c.fil[(i, j, w)].rank - c.fil[(i + 1, j, w)].rank
    return out


def classical_hodge_ranks(nvars: int, i: int, j: int, w: int) -> int:
    """Rank of gr^i of the Hodge filtration on the weight-w part of Omega^j."""
    if j != i or w < j:
        return 0
    return comb(nvars, j) * comb(w - j + nvars - 1, nvars - 1) if nvars else int(w == 0 and j == 0)


# ---------------------------------------------------------------------------
# degree-0 filtrations: rescaling and preimages


@dataclass
class DegreeZeroFiltration:
    """A descending chain of lattices in a degree-0 ring at truncation.

    Coordinate ``a * N + s`` is the (q-1)^(s + offset)-coefficient of the
    monomial ``labels[a]``; the actual elements are ``row / denominator``.
    """

    labels: list
    N: int
    levels: list
    denominator: int = 1
    modulus: int = 0
    offset: int = 0

    @property
    def ncols(self) -> int:
        return len(self.labels) * self.N

    def element(self, row: dict) -> dict:
        """Rational coefficients {(label, power): Fraction} of a lattice row."""
        return {(self.labels[k // self.N], k % self.N + self.offset): Fraction(v, self.denominator)
                for k, v in row.items()}

    def shape_checks(self) -> dict:
        N = self.N
        shift = [{k + 1: 1} if (k % N) + 1 < N else {} for k in range(self.ncols)]
        res = {"descending": True, "q_minus_one_shift": True}
        for i in range(len(self.levels) - 1):
            F, G = self.levels[i], self.levels[i + 1]
            res["descending"] &= G.issubset(F)
            res["q_minus_one_shift"] &= F.image(shift, self.ncols).issubset(G)
        return res

    def to_json(self) -> dict:
        return {
            "labels": [form_label(e, ()) for e in self.labels],
            "precision": str(self.N),
            "offset": str(self.offset),
            "denominator": str(self.denominator),
            "levels": [[{str(k): str(v) for k, v in r} for r in L.basis] for L in self.levels],
        }


def degree_zero_filtration(c: FilteredComplex) -> DegreeZeroFiltration:
    """Degree-0 part of a built complex, all weights side by side."""
    labels, blocks = [], []
    for w in range(c.max_weight + 1):
        labels.extend(e for e, _ in c.labels[(0, w)])
        blocks.append(len(c.labels[(0, w)]))
    N = c.N
    levels = []
    for i in range(c.depth + 1):
        rows, off = [], 0
        for w, size in enumerate(blocks):
            for r in c.fil[(i, 0, w)].rows:
                rows.append({k + off * N: v for k, v in r.items()})
            off += size
        levels.append(Lattice.span(rows, len(labels) * N, c.modulus))
    return DegreeZeroFiltration(labels, N, levels, 1, c.modulus)


def _series_inverse(c: Sequence[Fraction], n: int) -> list[Fraction]:
    c = [Fraction(x) for x in c] + [Fraction(0)] * n
    out = [Fraction(0)] * n
    for k in range(n):
        s = Fraction(int(k == 0)) - sum(c[j] * out[k - j] for j in range(1, k + 1))
        out[k] = s / c[0]
    return out


def _series_mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(n - i):
                out[i + j] += x * b[j]
    return out


def _to_rows(vectors: list[dict], ncols: int, modulus: int, bound: int | None, p: int | None = None):
    """Scale rational vectors to integer rows; returns (rows, denominator)."""
    if modulus:
        return [{k: int(v.numerator * pow(v.denominator, -1, modulus) % modulus) for k, v in vec.items()}
                for vec in vectors], 1
    den = 1
    for vec in vectors:
        for v in vec.values():
            den = lcm(den, v.denominator)
    if bound is not None and den > bound:
        raise PrecisionError(f"denominator {den} exceeds the declared bound {bound}")
    return [{k: int(v * den) for k, v in vec.items() if v} for vec in vectors], den


@dataclass
class RescaledLattice:
    """Submodule generated by fil^0 and fil^i / (q^m - 1)^i, re-truncated."""

    level: int
    i_max: int
    filtration: DegreeZeroFiltration

    @property
    def lattice(self) -> Lattice:
        return self.filtration.levels[0]

    def contains(self, element: dict) -> bool:
        """Membership of {(label, power): Fraction} (powers from -i_max)."""
        f = self.filtration
        index = {lab: a for a, lab in enumerate(f.labels)}
        vec = {}
        for (lab, s), v in element.items():
            k = s - f.offset
            if k >= f.N:
                continue
            if k < 0:
                raise ValueError("power below the ambient range")
            vec[index[lab] * f.N + k] = Fraction(v) * f.denominator
        if any(v.denominator != 1 for v in vec.values()):
            return False
        return {k: int(v) for k, v in vec.items() if v} in self.lattice


def habiro_hodge_rescale(filt: DegreeZeroFiltration, m: int, i_max: int,
                         denominator_bound: int | None = None) -> RescaledLattice:
    """Adjoin fil^i / (q^m - 1)^i for 1 <= i <= i_max to fil^0.

    The result lives in (q-1)-powers from ``-i_max`` up to precision
    ``N - i_max``; for m = 1 it is the finite stage of the colimit along
    multiplication by (q-1).
    """
    N = filt.N
    if filt.offset != 0:
        raise ValueError("input filtration must start at (q-1)^0")
    if i_max > N or i_max >= len(filt.levels):
        raise ValueError(f"i_max={i_max} exceeds truncation order or filtration depth")
    if m < 1:
        raise ValueError("level must be positive")
    n_out = N - i_max
    qm = q_integer(m, TruncContext(Int(), QMinusOnePow(N))).coeffs
    inv = _series_inverse(qm, N)
    powers = [[Fraction(1)] + [Fraction(0)] * (N - 1)]
    for _ in range(i_max):
        powers.append(_series_mul(powers[-1], inv, N))
    nl = len(filt.labels)
    vectors = []
    for i in range(i_max + 1):
        for row in filt.levels[i].rows:
            # group by label, divide by t^i [m]^i, shift into the Laurent window
            by_label: dict = {}
            for k, v in row.items():
                by_label.setdefault(k // N, [Fraction(0)] * N)[k % N] = Fraction(v, filt.denominator)
            vec = {}
            for a, ser in by_label.items():
                prod = _series_mul(ser, powers[i], N)
                for s, v in enumerate(prod):
                    pos = s - i + i_max  # coordinate of (q-1)^(s - i)
                    if v and pos < n_out + i_max:
                        vec[a * (n_out + i_max) + pos] = v
            vectors.append(vec)
    width = n_out + i_max
    mod = filt.modulus
    rows, den = _to_rows(vectors, nl * width, mod, denominator_bound)
    lat = Lattice.span(rows, nl * width, mod)
    out = DegreeZeroFiltration(list(filt.labels), width, [lat], den, mod, offset=-i_max)
    return RescaledLattice(m, i_max, out)


_REL_RE = re.compile(r"^\s*x(\d*)\s*(?:\^\s*(\d+))?\s*$")


def parse_relations(text: str, nvars: int) -> list[tuple[int, int]]:
    """Parse ``"x1^2, x2^3"`` (or ``"x^2"`` with one variable) into (index, exponent) pairs."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        mt = _REL_RE.match(part)
        if not mt:
            raise ValueError(f"relation {part!r} is not a pure power of one variable")
        idx = int(mt.group(1)) - 1 if mt.group(1) else 0
        if not 0 <= idx < nvars:
            raise ValueError(f"variable in {part!r} out of range")
        out.append((idx, int(mt.group(2) or 1)))
    return out


def _check_regular(relations: Sequence[tuple[int, int]], nvars: int) -> None:
    seen = set()
    for i, a in relations:
        if a < 1 or not 0 <= i < nvars:
            raise ValueError(f"bad relation x{i + 1}^{a}")
        if i in seen:
            raise ValueError("relations must involve distinct variables to form a regular sequence")
        seen.add(i)


def _q_factorial_inverse(d: int, N: int) -> list[Fraction]:
    ctx = TruncContext(Int(), QMinusOnePow(N))
    ser = [Fraction(1)] + [Fraction(0)] * (N - 1)
    for j in range(1, d + 1):
        ser = _series_mul(ser, _series_inverse(q_integer(j, ctx).coeffs, N), N)
    return ser


@dataclass
class PreimageFiltration:
    relations: list
    nvars: int
    degree_bound: int
    filtration: DegreeZeroFiltration
    generated: list  # filtration generated by (q-1) and q-divided powers, for comparison

    @property
    def matches_generated(self) -> bool:
        return self.filtration.levels == self.generated

    def to_json(self) -> dict:
        d = self.filtration.to_json()
        d["relations"] = [f"x{i + 1}^{a}" for i, a in self.relations]
        d["ranks"] = [str(L.rank) for L in self.filtration.levels]
        d["matches_divided_power_filtration"] = self.matches_generated
        return d


def _order(e: tuple, relations) -> int:
    return sum(e[i] // a for i, a in relations)


def preimage_filtration(nvars: int, relations: Sequence[tuple[int, int]], ctx: TruncContext,
                        degree_bound: int, depth: int,
                        denominator_bound: int | None = 10 ** 12) -> PreimageFiltration:
    """Preimage of the combined Hodge and (q-1)-adic filtration on degree 0.

    The degree-0 ring is the lattice spanned by t^s x^e / prod_k [d_k]_q! for
    every d with x_k^(a_k d_k) dividing x^e (t = q - 1).  Its image in
    Q[x][t]/t^N is intersected with the span of t^s x^e for s + ord(e) >= i,
    where ord counts how many relation factors divide x^e.
    """
    _check_regular(relations, nvars)
    if not isinstance(ctx.qmod, QMinusOnePow) or not isinstance(ctx.base, Int):
        raise ValueError("preimage filtrations are computed over Z with a (q-1)-power truncation")
    N = ctx.size
    if depth > N:
        raise ValueError(f"filtration depth {depth} exceeds truncation order {N}")
    labels = [e for deg in range(degree_bound + 1) for e in monomials(nvars, deg)]
    ncols = len(labels) * N
    inv_cache: dict = {}

    def inv_fact(ds):
        if ds not in inv_cache:
            ser = [Fraction(1)] + [Fraction(0)] * (N - 1)
            for d in ds:
                ser = _series_mul(ser, _q_factorial_inverse(d, N), N)
            inv_cache[ds] = ser
        return inv_cache[ds]

    gens, orders = [], []  # (vector, filtration degree of the divided power)
    for a, e in enumerate(labels):
        ranges = [range(e[i] // al + 1) for i, al in relations]
        for ds in itertools.product(*ranges):
            ser = inv_fact(tuple(ds))
            for s in range(N):
                vec = {a * N + s + k: v for k, v in enumerate(ser[:N - s]) if v}
                gens.append(vec)
                orders.append(s + sum(ds))
    rows, den = _to_rows(gens, ncols, 0, denominator_bound)
    ring = Lattice.span(rows, ncols)
    levels = []
    for i in range(depth + 1):
        outside = [{} for _ in range(ncols)]
        cols = [k for k in range(ncols) if (k % N) + _order(labels[k // N], relations) < i]
        for pos, k in enumerate(cols):
            outside[k] = {pos: 1}
        levels.append(ring.preimage_kernel(outside, len(cols)) if cols else ring)
    generated = [Lattice.span([r for r, o in zip(rows, orders) if o >= i], ncols) for i in range(depth + 1)]
    filt = DegreeZeroFiltration(labels, N, levels, den)
    return PreimageFiltration(list(relations), nvars, degree_bound, filt, generated)


def classical_pd_hodge(nvars: int, relations, degree_bound: int, depth: int, denominator: int) -> list[Lattice]:
    """Hodge filtration of the divided-power envelope at q = 1, scaled by ``denominator``.

    Level i is spanned by x^e / prod_k d_k! with x_k^(a_k d_k) dividing x^e and sum d_k >= i.
    """
    labels = [e for deg in range(degree_bound + 1) for e in monomials(nvars, deg)]
    out = []
    for i in range(depth + 1):
        rows = []
        for a, e in enumerate(labels):
            for ds in itertools.product(*[range(e[k] // al + 1) for k, al in relations]):
                if sum(ds) >= i:
                    f = 1
                    for d in ds:
                        f *= _fact(d)
                    if denominator % f:
                        raise ValueError("denominator does not clear the divided powers")
                    rows.append({a: denominator // f})
        out.append(Lattice.span(rows, len(labels)))
    return out


def _fact(d: int) -> int:
    out = 1
    for k in range(2, d + 1):
        out *= k
    return out


def reduce_filtration_mod_q1(f: DegreeZeroFiltration) -> list[Lattice]:
    cols = [a * f.N for a in range(len(f.labels))]
    return [L.project(cols) for L in f.levels]
