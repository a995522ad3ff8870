"""Graded homotopy rings of fixed points of equivariant connective K-theory.

Every ring is given by a presentation: even-degree generators over a
coefficient ring in q (a :class:`TruncContext`), homogeneous relations, and
optional exponent bounds that model t-adic truncation.  A single degree
component is then a finitely generated abelian group computed by integer
normal forms.

Polynomials in the generators are dicts ``exponent tuple -> q-polynomial``
(a list of coefficients in q).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm

from .lattice import Lattice, invariant_factors, left_kernel
from .qring import (CyclotomicPow, Int, IntLocalized, PadicInt, QmPowMinusOnePow, QMinusOnePow, TruncContext,
                    adams_substitute, cyclotomic_poly, divisors, padd, pcompose_power, pinverse_mod, pmod,
                    pmul, ppow, presultant, prime_factors, psub, ptrim, valuation)

# ---------------------------------------------------------------------------
# polynomials in generators with q-polynomial coefficients


def kp_clean(f: dict) -> dict:
    out = {}
    for e, c in f.items():
        c = ptrim(list(c))
        if c:
            out[e] = c
    return out


def kp_add(f: dict, g: dict, sign: int = 1) -> dict:
    out = {e: list(c) for e, c in f.items()}
    for e, c in g.items():
        c = c if sign > 0 else [-x for x in c]
        out[e] = padd(out.get(e, []), c)
    return kp_clean(out)


def kp_mul(f: dict, g: dict) -> dict:
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = padd(out.get(e, []), pmul(c1, c2))
    return kp_clean(out)


def kp_pow(f: dict, n: int, ngens: int) -> dict:
    out = {(0,) * ngens: [1]}
    for _ in range(n):
        out = kp_mul(out, f)
    return out


def kp_const(c, ngens: int) -> dict:
    return kp_clean({(0,) * ngens: list(c)})


def kp_gen(i: int, ngens: int, coeff=(1,)) -> dict:
    e = [0] * ngens
    e[i] = 1
    return kp_clean({tuple(e): list(coeff)})


def kp_scale(f: dict, c) -> dict:
    return kp_clean({e: pmul(v, list(c)) for e, v in f.items()})


# ---------------------------------------------------------------------------
# presentations and their degree components


def _strip_units(f: int, base) -> int:
    if isinstance(base, IntLocalized) and f:
        for p in prime_factors(base.N):
            while f % p == 0:
                f //= p
    return f


@dataclass
class Component:
    """One degree of a presented ring as ``Z^n / (relations + modulus)``.

    Coordinate ``a * S + j`` is the coefficient of ``basis_j(q) * labels[a]``.
    """

    degree: int
    labels: list
    size: int
    ctx: TruncContext
    relations: Lattice
    gen_names: tuple

    @property
    def ncols(self) -> int:
        return len(self.labels) * self.size

    @property
    def modulus(self) -> int:
        return self.ctx.scalar_modulus

    def vector(self, f: dict) -> dict:
        """Flatten a homogeneous polynomial; monomials outside the box are zero by truncation."""
        index = {e: a for a, e in enumerate(self.labels)}
        out: dict = {}
        for e, c in f.items():
            if e not in index:
                continue
            coeffs = self.ctx.element(c).coeffs
            for j, v in enumerate(coeffs):
                if v:
                    k = index[e] * self.size + j
                    out[k] = out.get(k, 0) + v
        return _integral(out, self.ctx)

    def contains(self, f: dict) -> bool:
        return self.vector(f) in self.relations

    @property
    def invariant_factors(self) -> list[int]:
        raw = invariant_factors(self.relations.rows, self.ncols, self.modulus)
        out = [_strip_units(f, self.ctx.base) for f in raw]
        return sorted((f for f in out if f != 1), key=lambda f: (f == 0, f))

    @property
    def rank(self) -> int:
        """Free summands over the base (copies of Z/p^K for a p-adic base)."""
        mod = self.modulus
        return sum(1 for f in self.invariant_factors if f == 0 or (mod and f == mod))

    def basis_labels(self) -> list[str]:
        """Labels of columns that survive as quotient generators (no unit pivot)."""
        pivots = {}
        for r in self.relations.basis:
            c, v = r[0]
            pivots[c] = v
        out = []
        for k in range(self.ncols):
            v = pivots.get(k)
            if v is None or _strip_units(v, self.ctx.base) != 1:
                out.append(self._label(k))
        return out

    def _label(self, k: int) -> str:
        e = self.labels[k // self.size]
        j = k % self.size
        mono = "*".join(f"{n}^{x}" if x > 1 else n for n, x in zip(self.gen_names, e) if x) or "1"
        if self.size == 1:
            return mono
        coeff = f"(q-1)^{j}" if self.ctx.q_minus_one_basis else f"q^{j}"
        return f"{mono}*{coeff}"

    def to_json(self) -> dict:
        return {
            "degree": str(self.degree),
            "rank": str(self.rank),
            "invariant_factors": [str(f) for f in self.invariant_factors],
            "basis_labels": self.basis_labels(),
        }


def _integral(vec: dict, ctx: TruncContext) -> dict:
    """Clear unit denominators (Z[1/N]) or reduce them (Z/p^K)."""
    mod = ctx.scalar_modulus
    if mod:
        out = {}
        for k, v in vec.items():
            v = Fraction(v)
            w = v.numerator * pow(v.denominator, -1, mod) % mod
            if w:
                out[k] = w
        return out
    den = 1
    for v in vec.values():
        den = lcm(den, Fraction(v).denominator)
    if den != 1 and not isinstance(ctx.base, IntLocalized):
        raise ValueError("non-integral coefficient over Z")
    return {k: int(Fraction(v) * den) for k, v in vec.items() if v}


@dataclass
class GradedRingPresentation:
    """Even-degree generators over a q-coefficient ring, modulo homogeneous relations.

    ``bounds[i]`` caps the exponent of generator i (truncation); monomials
    beyond a cap are zero.  ``inverted`` and ``nonnegative`` only describe how
    the ring arose; the components are computed from the data above.
    """

    name: str
    ctx: TruncContext
    generators: tuple  # ((name, degree), ...)
    relations: tuple = ()
    bounds: dict = field(default_factory=dict)
    inverted: tuple = ()
    nonnegative: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for g, d in self.generators:
            if d % 2:
                raise ValueError(f"generator {g} has odd degree {d}")
        for r in self.relations:
            self.relation_degree(r)

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def gen_names(self) -> tuple:
        return tuple(g for g, _ in self.generators)

    def gen(self, name: str, coeff=(1,)) -> dict:
        return kp_gen(self.gen_names.index(name), self.ngens, coeff)

    def const(self, c) -> dict:
        return kp_const(c, self.ngens)

    def degree_of(self, e: tuple) -> int:
        return sum(x * d for x, (_, d) in zip(e, self.generators))

    def relation_degree(self, r: dict) -> int:
        degs = {self.degree_of(e) for e in r}
        if len(degs) > 1:
            raise ValueError(f"relation in {self.name} is not homogeneous")
        return degs.pop() if degs else 0

    def monomials(self, degree: int) -> list[tuple]:
        """Exponent vectors of the given (even) degree inside the bounds."""
        pos = [i for i, (_, d) in enumerate(self.generators) if d > 0]
        zero = [i for i, (_, d) in enumerate(self.generators) if d == 0]
        neg = [i for i, (_, d) in enumerate(self.generators) if d < 0]
        for i in zero + neg:
            if i not in self.bounds:
                raise ValueError(f"generator {self.generators[i][0]} needs an exponent bound")
        out = []
        ranges = [range(self.bounds[i] + 1) for i in zero + neg]
        for fixed in itertools.product(*ranges):
            e = [0] * self.ngens
            for i, x in zip(zero + neg, fixed):
                e[i] = x
            rest = degree - self.degree_of(tuple(e))
            for e2 in self._positive(pos, rest):
                full = list(e)
                for i, x in zip(pos, e2):
                    full[i] = x
                if all(full[i] <= b for i, b in self.bounds.items()):
                    out.append(tuple(full))
        return sorted(out, reverse=True)

    def _positive(self, pos: list, rest: int):
        if rest < 0:
            return
        if not pos:
            if rest == 0:
                yield ()
            return
        d = self.generators[pos[0]][1]
        for x in range(rest // d + 1):
            for tail in self._positive(pos[1:], rest - x * d):
                yield (x,) + tail

    def component(self, k: int) -> Component:
        """The homotopical-degree 2k component."""
        if self.nonnegative and k < 0:
            raise ValueError("presentation restricted to nonnegative degrees")
        if k in self._cache:
            return self._cache[k]
        degree = 2 * k
        labels = self.monomials(degree)
        S = self.ctx.size
        basis = [self.ctx.from_coeffs([int(i == j) for i in range(S)]) for j in range(S)]
        comp = Component(degree, labels, S, self.ctx, Lattice.zero(len(labels) * S, self.ctx.scalar_modulus),
                         self.gen_names)
        rows = []
        for r in self.relations:
            for mu in self.monomials(degree - self.relation_degree(r)):
                rm = kp_mul(r, {mu: [1]})
                for b in basis:
                    scaled = {e: (self.ctx.element(c) * b).to_qpoly() for e, c in rm.items()}
                    v = comp.vector(kp_clean(scaled))
                    if v:
                        rows.append(v)
        comp.relations = Lattice.span(rows, comp.ncols, self.ctx.scalar_modulus)
        self._cache[k] = comp
        return comp

    def reduces_to_zero(self, f: dict) -> bool:
        """Whether a homogeneous polynomial vanishes in the ring."""
        f = kp_clean(f)
        if not f:
            return True
        return self.component(self.relation_degree(f) // 2).contains(f)

    def to_json(self, max_degree: int, min_degree: int = 0) -> dict:
        lo = max(min_degree, 0) if self.nonnegative else min_degree
        return {
            "name": self.name,
            "coefficients": str(self.ctx),
            "generators": [{"name": g, "degree": str(d)} for g, d in self.generators],
            "components": [self.component(k).to_json() for k in range(lo // 2, max_degree // 2 + 1)],
        }


@dataclass
class RingMap:
    """Ring map given on generators, acting on q-coefficients by q -> q^adams."""

    source: GradedRingPresentation
    target: GradedRingPresentation
    images: dict  # generator name -> polynomial in target generators
    adams: int = 1

    def coefficient_map_ok(self) -> bool:
        """The coefficient ideal of the source must land in that of the target."""
        src = self.source.ctx.qmod.modulus_poly()
        img = pcompose_power(src, self.adams)
        return self.target.ctx.element(img).is_zero()

    def apply(self, f: dict) -> dict:
        T = self.target.ngens
        out: dict = {}
        for e, c in f.items():
            term = kp_const(pcompose_power(list(c), self.adams), T)
            for name, x in zip(self.source.gen_names, e):
                if x:
                    term = kp_mul(term, kp_pow(self.images[name], x, T))
            out = kp_add(out, term)
        return out

    def relations_ok(self) -> bool:
        return all(self.target.reduces_to_zero(self.apply(r)) for r in self.source.relations)

    def is_ring_map(self) -> bool:
        return self.coefficient_map_ok() and self.relations_ok()

    def compose(self, other: "RingMap") -> "RingMap":
        """``other`` after ``self``."""
        imgs = {g: other.apply(self.images[g]) for g in self.source.gen_names}
        return RingMap(self.source, other.target, imgs, self.adams * other.adams)

    def matrix(self, k: int) -> list[dict]:
        """Sparse matrix of the map on ambient coordinates of degree 2k (ignoring q-semilinearity)."""
        src = self.source.component(k)
        tgt = self.target.component(k)
        rows = []
        for e in src.labels:
            for j in range(src.size):
                b = self.source.ctx.from_coeffs([int(i == j) for i in range(src.size)]).to_qpoly()
                rows.append(tgt.vector(self.apply({e: b})))
        return rows


# ---------------------------------------------------------------------------
# concrete rings


def _int_ctx(base, qmod) -> TruncContext:
    return TruncContext(base, qmod)


def pi_genuine(m: int, base=None) -> GradedRingPresentation:
    """Z[beta, q]/(q^m - 1); the relation lives in the coefficient ring."""
    if m < 1:
        raise ValueError("m must be positive")
    ctx = _int_ctx(base or Int(), QmPowMinusOnePow(m, 1))
    return GradedRingPresentation(f"genuine C_{m}", ctx, (("beta", 2),), nonnegative=True)


def pi_homotopy_fixed(m: int, t_precision: int, q_precision: int, base=None) -> GradedRingPresentation:
    """Z[beta, q][[t_m]]/(beta t_m - (q^m - 1)), t_m truncated, q truncated (q^m - 1)-adically."""
    if m < 1:
        raise ValueError("m must be positive")
    ctx = _int_ctx(base or Int(), QmPowMinusOnePow(m, q_precision))
    gens = (("beta", 2), ("t", -2))
    rel = kp_add({(1, 1): [1]}, {(0, 0): psub([0] * m + [1], [1])}, -1)
    return GradedRingPresentation(f"residual homotopy fixed points C_{m}", ctx, gens, (rel,), {1: t_precision})


def hfp_comparison(m: int, t_precision: int, q_precision: int, base=None) -> RingMap:
    """t_m -> [m]_q t into the m = 1 ring, q and beta fixed."""
    src = pi_homotopy_fixed(m, t_precision, q_precision, base)
    tgt = pi_homotopy_fixed(1, t_precision, q_precision, base)
    tgt = GradedRingPresentation(tgt.name, _int_ctx(tgt.ctx.base, QMinusOnePow(q_precision)), tgt.generators,
                                 tgt.relations, tgt.bounds)
    return RingMap(src, tgt, {"beta": tgt.gen("beta"), "t": tgt.gen("t", [1] * m)})


def m_series(d: int) -> dict:
    """((1 + beta t)^d - 1)/beta as {(i, j): coefficient of beta^i t^j}."""
    return {(k - 1, k): comb(d, k) for k in range(1, d + 1)}


def geometric_inverted_primes(m: int) -> list[int]:
    """Primes p with Phi_e(zeta_m) not a unit for some proper divisor e > 1 of m."""
    out = set()
    for e in divisors(m):
        if 1 < e < m:
            r = abs(int(presultant(cyclotomic_poly(m), cyclotomic_poly(e))))
            out.update(prime_factors(r))
    return sorted(out)


def euler_phi(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


@dataclass
class GeometricPresentation:
    """The graded ring Z[beta, t]/[m](t) with [d](t) inverted for proper d | m, degrees >= 0.

    For m > 1 the inversion of [1](t) = t turns the ring into
    Z[1/S][zeta_m][t^(+-1)] with S from :func:`geometric_inverted_primes`;
    degree 2k is t^(-k) Z[1/S][zeta_m].  For m = 1 it is Z[beta].
    """

    m: int
    primes: list

    @property
    def base(self) -> str:
        if not self.primes:
            return "Z"
        return f"Z[1/{_prod(self.primes)}]"

    def rank(self, k: int) -> int:
        if k < 0:
            return 0
        return 1 if self.m == 1 else euler_phi(self.m)

    def invariant_factors(self, k: int) -> list[int]:
        return [0] * self.rank(k)

    def basis_labels(self, k: int) -> list[str]:
        if self.m == 1:
            return [f"beta^{k}"]
        return [f"t^{-k}*q^{j}" for j in range(euler_phi(self.m))]

    def beta_coordinates(self, k: int, scale: int) -> Lattice | None:
        """scale * (zeta - 1)^(-k) Z[zeta] in the power basis, i.e. degree 2k in beta^k coordinates.

        Only finitely generated when no primes are inverted; returns None otherwise.
        """
        if self.primes:
            return None
        if self.m == 1:
            return Lattice.span([{0: scale}], 1)
        phi = cyclotomic_poly(self.m)
        inv = pinverse_mod([-1, 1], phi)
        g = pmod(ppow(inv, k), phi) if k else [1]
        rows = []
        n = euler_phi(self.m)
        for j in range(n):
            v = pmod(pmul(g, [0] * j + [1]), phi)
            row = {}
            for i, c in enumerate(v):
                c = Fraction(c) * scale
                if c.denominator != 1:
                    raise ValueError("scale does not clear the denominators")
                if c:
                    row[i] = int(c)
            rows.append(row)
        return Lattice.span(rows, n)

    def component_json(self, k: int) -> dict:
        return {"degree": str(2 * k), "rank": str(self.rank(k)), "base": self.base,
                "invariant_factors": [str(f) for f in self.invariant_factors(k)],
                "basis_labels": self.basis_labels(k)}

    def to_json(self, max_degree: int) -> dict:
        return {"name": f"geometric C_{self.m}", "m_series": {f"beta^{i}*t^{j}": str(c)
                                                              for (i, j), c in sorted(m_series(self.m).items())},
                "inverted_primes": [str(p) for p in self.primes],
                "components": [self.component_json(k) for k in range(max_degree // 2 + 1)]}


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def pi_geometric(m: int) -> GeometricPresentation:
    if m < 1:
        raise ValueError("m must be positive")
    return GeometricPresentation(m, [] if m == 1 else geometric_inverted_primes(m))


def pi_geometric_localized(m: int, N: int | None = None) -> GradedRingPresentation:
    """Z[1/N, beta, q]/Phi_m(q); N defaults to m and must contain its primes."""
    N = m if N is None else N
    if any(N % p for p in prime_factors(m)):
        raise ValueError(f"localization Z[1/{N}] must invert every prime of m={m}")
    base = IntLocalized(N) if N > 1 else Int()
    return GradedRingPresentation(f"geometric C_{m}, {base}", _int_ctx(base, CyclotomicPow(m, 1)),
                                  (("beta", 2),), nonnegative=True)


@dataclass
class PCompletePiece:
    p: int
    alpha: int
    m_p: int
    K: int
    ring: GradedRingPresentation  # Z_p[u, q]/Phi_m(q)
    from_genuine: RingMap  # beta -> (q^(m/p) - 1) u
    prime_power_ring: GradedRingPresentation  # Z_p[u, q]/Phi_(p^alpha)(q)
    base_change_ok: bool  # psi^(m_p) maps Phi_(p^alpha) into Phi_m

    @property
    def m(self) -> int:
        return self.p ** self.alpha * self.m_p

    def completion_check(self, N: int) -> bool:
        """Z/p^K[q]/(Phi_(p^alpha)(q^m_p), Phi_m^N) is exactly Z/p^K[q]/Phi_m."""
        F = pcompose_power(cyclotomic_poly(self.p ** self.alpha), self.m_p)
        G = ppow(cyclotomic_poly(self.m), N)
        width = len(F) - 1
        rows = []
        for poly in (F, G):
            for s in range(width):
                shifted = pmod([0] * s + list(poly), F)
                rows.append({i: int(c) for i, c in enumerate(shifted) if c})
        mod = self.p ** self.K
        factors = invariant_factors(rows, width, mod)
        return sorted(factors) == [mod] * euler_phi(self.m)


def pi_geometric_p_complete(p: int, alpha: int, m_p: int = 1, K: int = 5) -> PCompletePiece:
    """Z_p[u, q]/Phi_m(q) for m = p^alpha m_p, with the map from the genuine ring."""
    if m_p % p == 0 or alpha < 1:
        raise ValueError("need alpha >= 1 and p not dividing m_p")
    m = p ** alpha * m_p
    base = PadicInt(p, K)
    pp = GradedRingPresentation(f"geometric C_{p ** alpha} p-complete", _int_ctx(base, CyclotomicPow(p ** alpha, 1)),
                                (("u", 2),), nonnegative=True)
    ring = GradedRingPresentation(f"geometric C_{m} p-complete", _int_ctx(base, CyclotomicPow(m, 1)),
                                  (("u", 2),), nonnegative=True)
    bc_src = pp.ctx.from_coeffs([0, 1] + [0] * (pp.ctx.size - 2)) if pp.ctx.size > 1 else pp.ctx.q()
    try:
        adams_substitute(bc_src, m_p, ring.ctx)
        bc_ok = True
    except ValueError:
        bc_ok = False
    genuine = pi_genuine(m, base)
    beta_img = ring.gen("u", psub([0] * (m // p) + [1], [1]))
    return PCompletePiece(p, alpha, m_p, K, ring, RingMap(genuine, ring, {"beta": beta_img}), pp, bc_ok)


def hfp_to_geometric_map(p: int, alpha: int, K: int, t_precision: int, q_precision: int) -> dict:
    """beta -> (q^(p^(alpha-1)) - 1) u on residual homotopy fixed points.

    Target: Z_p[u, q][[t]]/(u t - Phi_(p^alpha)(q)).  The source relation maps to
    (q^(p^(alpha-1)) - 1) times the target relation, checked exactly in Z[q][u, t]
    and as ideal membership at truncation.
    """
    n = p ** alpha
    base = PadicInt(p, K)
    src = pi_homotopy_fixed(n, t_precision, q_precision, base)
    phi = cyclotomic_poly(n)
    ctx = _int_ctx(base, CyclotomicPow(n, q_precision))
    tgt = GradedRingPresentation(f"geometric C_{n} homotopy fixed points", ctx, (("u", 2), ("t", -2)),
                                 (kp_add({(1, 1): [1]}, {(0, 0): list(phi)}, -1),), {1: t_precision})
    lift = psub([0] * (n // p) + [1], [1])
    rmap = RingMap(src, tgt, {"beta": tgt.gen("u", lift), "t": tgt.gen("t")})
    image = rmap.apply(src.relations[0])
    expected = kp_scale(tgt.relations[0], lift)
    return {"ring_map": rmap.is_ring_map(), "relation_image_exact": image == expected}


# ---------------------------------------------------------------------------
# inflation


def inflation_map(m: int, n: int) -> RingMap:
    """inf_n: Z[beta, q]/(q^m - 1) -> Z[beta, q]/(q^(mn) - 1), q -> q^n, beta -> beta."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    src, tgt = pi_genuine(m), pi_genuine(m * n)
    return RingMap(src, tgt, {"beta": tgt.gen("beta")}, adams=n)


def base_change_check(m: int, n: int, k: int) -> dict:
    """In degree 2k: the basis q^i (x) q'^r of the base change maps onto Z[q]/(q^(mn) - 1) unimodularly."""
    inf = inflation_map(m, n)
    tgt = inf.target.component(k)
    rows = []
    for i in range(m):
        for r in range(n):
            img = inf.apply({(k,): [0] * i + [1]})
            img = kp_mul(img, {(0,): [0] * r + [1]})
            rows.append(tgt.vector(img))
    lat = Lattice.span(rows, tgt.ncols)
    return {"degree": 2 * k, "square": len(rows) == tgt.ncols, "unimodular": lat == Lattice.full(tgt.ncols)}


# ---------------------------------------------------------------------------
# fracture square


def _mult_matrix(c: list, m: int) -> list[dict]:
    """Multiplication by c in Z[zeta_m], power basis."""
    phi = cyclotomic_poly(m)
    n = len(phi) - 1
    rows = []
    for j in range(n):
        v = pmod(pmul(c, [0] * j + [1]), phi)
        rows.append({i: int(x) for i, x in enumerate(v) if x})
    return rows


def _pullback_lattice(m: int, k: int, D: int, cs: dict) -> Lattice:
    """D * {a in Z[1/m][zeta] with denominators dividing D : a c_p^k p-integral for all p}."""
    n = euler_phi(m)
    lat = Lattice.full(n)
    for p, c in cs.items():
        v = valuation(D, p)
        ck = pmod(ppow(c, k), cyclotomic_poly(m)) if k else [1]
        lat = lat.preimage_kernel(_mult_matrix(ck, m), n, p ** v)
    return lat


def fracture_assemble(m: int, max_degree: int, K: int = 5, N: int = 6) -> dict:
    """Glue the m-inverted piece with the p-complete pieces in each degree and compare.

    Degree 2k of the pullback is computed in beta^k coordinates inside
    Q(zeta_m), with denominators bounded by m^N.  The comparison target is the
    graded ring of :func:`pi_geometric`.
    """
    geo = pi_geometric(m)
    report = {"m": m, "precision": {"p": K, "denominator_exponent": N, "degree": max_degree},
              "inverted_primes": geo.primes, "pieces": [], "degrees": []}
    if m == 1:
        for k in range(max_degree // 2 + 1):
            report["degrees"].append({"degree": 2 * k, "status": "ok", "rank_match": True, "lattice_match": True,
                                      "jointly_surjective": True})
        report["ok"] = True
        return report
    local = pi_geometric_localized(m)
    cs, pieces_ok = {}, True
    phi = cyclotomic_poly(m)
    for p in prime_factors(m):
        alpha = valuation(m, p)
        piece = pi_geometric_p_complete(p, alpha, m // p ** alpha, K)
        c = pmod(psub([0] * (m // p) + [1], [1]), phi)
        image = piece.from_genuine.images["beta"]
        consistent = piece.ring.ctx.element(image[(1,)]) == piece.ring.ctx.element(c)
        info = {"p": p, "alpha": alpha, "ring_map": piece.from_genuine.is_ring_map(),
                "base_change": piece.base_change_ok, "completion": piece.completion_check(N),
                "beta_image_consistent": consistent}
        pieces_ok &= all(v for key, v in info.items() if key not in ("p", "alpha"))
        report["pieces"].append(info)
        cs[p] = [int(x) for x in c]
    D = m ** N
    all_ok = pieces_ok
    for k in range(max_degree // 2 + 1):
        n = euler_phi(m)
        local_rank = local.component(k).rank
        lam = _pullback_lattice(m, k, D, cs)
        lam_next = _pullback_lattice(m, k, D * m, cs)
        stable = lam.image([{i: m} for i in range(n)], n) == lam_next
        surj = {}
        for p, c in cs.items():
            v = valuation(D, p)
            ck = pmod(ppow(c, k), phi) if k else [1]
            f = invariant_factors(_mult_matrix([int(x) for x in ck], m), n, p ** v)
            worst = max((valuation(x, p) for x in f if x), default=0)
            surj[p] = v - worst
        target = geo.beta_coordinates(k, D)
        rank_match = lam.rank == n == geo.rank(k) == local_rank
        lattice_match = target is not None and target == lam
        status = "ok" if stable else "insufficient precision"
        entry = {"degree": 2 * k, "status": status, "rank_match": rank_match, "lattice_match": lattice_match,
                 "pullback_base": "Z", "presentation_base": geo.base,
                 "jointly_surjective": all(w >= 1 for w in surj.values()),
                 "surjectivity_window": {str(p): w for p, w in surj.items()}}
        if not lattice_match:
            entry["mismatch"] = {"pullback_basis": [[str(v) for _, v in sorted(r.items())] for r in lam.rows],
                                 "scale": str(D)}
        all_ok &= stable and rank_match and lattice_match and entry["jointly_surjective"]
        report["degrees"].append(entry)
    report["ok"] = all_ok
    return report


# ---------------------------------------------------------------------------
# the pullback square for C_p


def ku_borel(p: int, K: int, t_precision: int) -> GradedRingPresentation:
    """Z_p[beta][[t]]/[p](t) with [p](t) = ((1 + beta t)^p - 1)/beta."""
    ctx = _int_ctx(PadicInt(p, K), QMinusOnePow(1))
    rel = {e: [c] for e, c in m_series(p).items()}
    return GradedRingPresentation(f"homotopy fixed points C_{p}", ctx, (("beta", 2), ("t", -2)), (rel,),
                                  {1: t_precision})


def genuine_pullback_check(p: int, max_degree: int, K: int = 6, t_precision: int | None = None,
                           min_degree: int | None = None) -> dict:
    """Exactness of 0 -> genuine -> homotopy (+) geometric -> Tate, degree by degree, mod p^K.

    Geometric: Z_p[u, q]/Phi_p(q) in degrees >= 0.  Tate: t^(-k) Z_p[zeta_p]
    in every degree.  Maps: beta -> beta, q -> 1 + beta t into the homotopy
    fixed points; beta -> (q - 1) u into the geometric part; beta -> (q - 1)/t
    and u -> 1/t into the Tate part.
    """
    min_degree = -max_degree if min_degree is None else min_degree
    depth = max(0, -min_degree // 2)
    need = (p - 1) * K + 1 + depth
    T = need if t_precision is None else t_precision
    report = {"p": p, "precision": {"p": K, "t": T, "degree": [min_degree, max_degree]}, "degrees": []}
    if K < 2 or T < need:
        report["status"] = "insufficient precision"
        report["ok"] = None
        return report
    A = pi_genuine(p, PadicInt(p, K))
    B = ku_borel(p, K, T)
    geo = pi_geometric_p_complete(p, 1, 1, K)
    C = geo.ring
    mod = p ** K
    phi_ctx = C.ctx
    n_d = phi_ctx.size
    one_plus_bt = kp_add(B.const([1]), kp_mul(B.gen("beta"), B.gen("t")))

    def a_to_b(e, j):
        return kp_mul(kp_pow(B.gen("beta"), e[0], 2), kp_pow(one_plus_bt, j, 2))

    ok_all = True
    for k in range(min_degree // 2, max_degree // 2 + 1):
        Bk = B.component(k)
        # homotopy fixed points -> Tate: beta^a t^b -> (zeta - 1)^a
        mb = []
        for e in Bk.labels:
            img = phi_ctx.element(ppow([-1, 1], e[0]))
            mb.append(_integral(dict(enumerate(img.coeffs)), phi_ctx))
        if k < 0:
            kernel = Lattice.full(Bk.ncols, mod).preimage_kernel(mb, n_d, mod)
            surj = Lattice.full(Bk.ncols, mod).image(mb, n_d) == Lattice.full(n_d, mod)
            inj = kernel == Bk.relations
            report["degrees"].append({"degree": 2 * k, "exact": inj, "tate_iso": surj})
            ok_all &= inj and surj
            continue
        Ak, Ck = A.component(k), C.component(k)
        nB, nC = Bk.ncols, Ck.ncols
        # geometric -> Tate: u^k q^j -> t^(-k) zeta^j, entered with a minus sign
        mc = [{j: mod - 1} for _ in Ck.labels for j in range(Ck.size)]
        kernel = Lattice.full(nB + nC, mod).preimage_kernel(mb + mc, n_d, mod)
        rels = [r for r in Bk.relations.rows] + [{c + nB: v for c, v in r.items()} for r in Ck.relations.rows]
        imgs = []
        for e in Ak.labels:
            for j in range(Ak.size):
                row = dict(Bk.vector(a_to_b(e, j)))
                for c, v in Ck.vector(geo.from_genuine.apply({e: [0] * j + [1]})).items():
                    row[c + nB] = v
                imgs.append(row)
        exact = kernel == Lattice.span(imgs + rels, nB + nC, mod)
        inj = _injective(imgs, Lattice.span(rels, nB + nC, mod), Ak)
        report["degrees"].append({"degree": 2 * k, "exact": exact, "injective": inj})
        ok_all &= exact and inj
    report["status"] = "ok" if ok_all else "mismatch"
    report["ok"] = ok_all
    return report


def _injective(imgs: list[dict], rel_lat: Lattice, Ak: Component) -> bool:
    """Kernel of A_k -> (B_k + C_k)/relations equals the relations of A_k."""
    rows = imgs + rel_lat.rows
    ker = left_kernel(rows, rel_lat.ncols, rel_lat.modulus)
    coeffs = [{i: v for i, v in kv.items() if i < len(imgs)} for kv in ker]
    return Lattice.span(coeffs, Ak.ncols, Ak.modulus) == Ak.relations


# ---------------------------------------------------------------------------
# TC^- of Z_p[zeta_p]


def tc_minus_zpzeta_presentation(p: int, K: int, N: int, v_precision: int | None = None) -> GradedRingPresentation:
    """Z_p[[q - 1]][u, v]/(u v - [p]_q), v truncated."""
    T = K + N if v_precision is None else v_precision
    ctx = _int_ctx(PadicInt(p, K), QMinusOnePow(N))
    rel = kp_add({(1, 1): [1]}, {(0, 0): [1] * p}, -1)
    return GradedRingPresentation(f"TC^- of Z_{p}[zeta_{p}]", ctx, (("u", 2), ("v", -2)), (rel,), {1: T})
