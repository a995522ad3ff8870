"""q-divided powers in two variables and the q-PD envelope at finite precision.

Polynomials in Z[q][x, y] are dicts ``(a, b, k) -> int`` for x^a y^b q^k.
Envelope elements are homogeneous in x, y and carry truncated (q-1)-adic
coefficients over Q: dicts ``(a, b) -> list[Fraction]`` of length N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .lattice import Lattice, axpy, clean, left_kernel
from .polyqdr import _series_inverse, _series_mul
from .qring import (PadicInt, PrecisionError, QMinusOnePow, TruncContext, cyclotomic_poly, is_prime, pmul,
                    q_pochhammer_poly, to_q_minus_one, valuation)

# ---------------------------------------------------------------------------
# Z[q][x, y]


def zpoly(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v}


def zadd(f: dict, g: dict, sign: int = 1) -> dict:
    out = dict(f)
    for k, v in g.items():
        out[k] = out.get(k, 0) + sign * v
    return zpoly(out)


def zmul(f: dict, g: dict) -> dict:
    out: dict = {}
    for (a1, b1, k1), v1 in f.items():
        for (a2, b2, k2), v2 in g.items():
            key = (a1 + a2, b1 + b2, k1 + k2)
            out[key] = out.get(key, 0) + v1 * v2
    return zpoly(out)


def zscale_q(f: dict, qpoly) -> dict:
    """Multiply by a polynomial in q alone."""
    return zmul(f, {(0, 0, k): int(c) for k, c in enumerate(qpoly) if c})


def zsubst_y(f: dict, shift: int) -> dict:
    """y -> q^shift * y."""
    return {(a, b, k + shift * b): v for (a, b, k), v in f.items()}


def q_partial_z(f: dict, var: int) -> dict:
    """q-derivative in x (var=0) or y (var=1): monomial z^m -> [m]_q z^(m-1)."""
    out: dict = {}
    for (a, b, k), v in f.items():
        m = (a, b)[var]
        for j in range(m):
            key = (a - 1, b, k + j) if var == 0 else (a, b - 1, k + j)
            out[key] = out.get(key, 0) + v
    return zpoly(out)


def numerator_poly(d: int, shift: int = 0) -> dict:
    """prod_{j<d} (x - q^(j+shift) y)."""
    out = {(0, 0, 0): 1}
    for j in range(d):
        out = zmul(out, {(1, 0, 0): 1, (0, 1, j + shift): -1})
    return out


@dataclass(frozen=True)
class QDividedPower:
    """``sign * numerator / denominator`` with ``denominator`` a polynomial in q.

    The plain divided power of order d has numerator prod_{j<d}(x - q^j y)
    and denominator (q; q)_d.
    """

    d: int
    numerator: tuple  # sorted items of a Z[q][x,y] dict
    denominator: tuple  # coefficients of a polynomial in q

    @property
    def num(self) -> dict:
        return dict(self.numerator)

    def equals(self, other: "QDividedPower") -> bool:
        """Equality of rational functions by cross-multiplication."""
        lhs = zscale_q(self.num, other.denominator)
        rhs = zscale_q(other.num, self.denominator)
        return zadd(lhs, rhs, -1) == {}

    def __str__(self) -> str:
        return f"QDividedPower(d={self.d}, terms={len(self.numerator)})"


def _qdp(d: int, num: dict, den) -> QDividedPower:
    return QDividedPower(d, tuple(sorted(zpoly(num).items())), tuple(int(c) for c in den))


def gamma_tilde(d: int, shift: int = 0) -> QDividedPower:
    """q-divided power of order d of (x - y); ``shift`` evaluates it at (x, q^shift y)."""
    if d < 0:
        raise ValueError("order must be nonnegative")
    return _qdp(d, numerator_poly(d, shift), q_pochhammer_poly(d))


def normalized_partial(g: QDividedPower, var: int) -> QDividedPower:
    """Apply (1 - q) times the q-derivative in x (var=0) or y (var=1).

    With this scaling the first divided power (x - y)/(1 - q) has x-derivative 1,
    so the identities lower the order by exactly one.
    """
    num = q_partial_z(g.num, var)
    num = zscale_q(num, [1, -1])
    return _qdp(max(g.d - 1, 0), num, g.denominator)


def dgamma_dx(g: QDividedPower) -> QDividedPower:
    """Right-hand side of the x-derivative identity: the divided power one order lower."""
    if g.d < 1:
        raise ValueError("order must be at least 1")
    return gamma_tilde(g.d - 1)


def dgamma_dy(g: QDividedPower) -> QDividedPower:
    """Right-hand side of the y-derivative identity: minus the lower order evaluated at (x, q y)."""
    if g.d < 1:
        raise ValueError("order must be at least 1")
    low = gamma_tilde(g.d - 1, shift=1)
    return _qdp(low.d, {k: -v for k, v in low.num.items()}, low.denominator)


def verify_derivative_identities(d: int) -> dict:
    g = gamma_tilde(d)
    return {
        "d": d,
        "dx": normalized_partial(g, 0).equals(dgamma_dx(g)),
        "dy": normalized_partial(g, 1).equals(dgamma_dy(g)),
    }


# ---------------------------------------------------------------------------
# envelope lattice


def _qpoly_series(qpoly, N: int) -> list[Fraction]:
    c = to_q_minus_one(list(qpoly), N)
    return [Fraction(x) for x in c] + [Fraction(0)] * (N - len(c))


@lru_cache(maxsize=None)
def _scaled_gamma(d: int, N: int) -> dict:
    """(q-1)^d times the divided power of order d, as an envelope element.

    Equals (-1)^d prod_{j<d}(x - q^j y) / prod_{j<=d} [j]_q.
    """
    den = [1]
    for j in range(1, d + 1):
        den = pmul(den, [1] * j)
    inv = _series_inverse(_qpoly_series(den, N), N)
    num = numerator_poly(d)
    out: dict = {}
    for (a, b, k), v in num.items():
        ser = _qpoly_series([0] * k + [v * (-1) ** d], N)
        out[(a, b)] = [x + y for x, y in zip(out.get((a, b), [Fraction(0)] * N), ser)]
    return {ab: tuple(_series_mul(list(s), inv, N)) for ab, s in out.items()}


def env_mul(f: dict, g: dict, N: int) -> dict:
    out: dict = {}
    for (a1, b1), s1 in f.items():
        for (a2, b2), s2 in g.items():
            key = (a1 + a2, b1 + b2)
            prod = _series_mul(list(s1), list(s2), N)
            out[key] = [x + y for x, y in zip(out.get(key, [Fraction(0)] * N), prod)]
    return {k: tuple(v) for k, v in out.items() if any(v)}


def env_from_z(f: dict, N: int) -> dict:
    """Z[q][x, y] polynomial as an envelope element."""
    out: dict = {}
    for (a, b, k), v in f.items():
        ser = _qpoly_series([0] * k + [v], N)
        out[(a, b)] = [x + y for x, y in zip(out.get((a, b), [Fraction(0)] * N), ser)]
    return {k: tuple(v) for k, v in out.items() if any(v)}


def env_div_qpoly(f: dict, qpoly, N: int) -> dict:
    inv = _series_inverse(_qpoly_series(qpoly, N), N)
    return {k: tuple(_series_mul(list(s), inv, N)) for k, s in f.items()}


def _pval(x: Fraction, p: int) -> int:
    return valuation(x.numerator, p) - valuation(x.denominator, p)


@dataclass
class EnvelopeLattice:
    """Per homogeneous degree e <= D: the lattice spanned by the generators.

    A generator is x^a y^b (q-1)^s prod_i (q-1)^(d_i) gamma_(d_i).  Coordinates
    of degree e are ``a * N + s`` for the monomial x^a y^(e-a); everything is
    multiplied by p^shift[e] and reduced mod p^(K + shift[e]).
    """

    p: int
    D: int
    K: int
    N: int
    lattices: dict = field(default_factory=dict)
    shift: dict = field(default_factory=dict)
    generators: dict = field(default_factory=dict)  # e -> list of (label, element)

    def modulus(self, e: int) -> int:
        return self.p ** (self.K + self.shift[e])

    def vector(self, f: dict, e: int) -> dict | None:
        """Scaled integer vector of a homogeneous element, None if it is not p-integral after scaling."""
        mod = self.modulus(e)
        scale = self.p ** self.shift[e]
        out = {}
        for (a, b), ser in f.items():
            if a + b != e:
                raise ValueError(f"element not homogeneous of degree {e}")
            for s, v in enumerate(ser[:self.N]):
                if not v:
                    continue
                v = v * scale
                if _pval(v, self.p) < 0:
                    return None
                out[a * self.N + s] = v.numerator * pow(v.denominator, -1, mod) % mod
        return clean(out, mod)

    def contains(self, f: dict, e: int) -> bool:
        v = self.vector(f, e)
        return v is not None and v in self.lattices[e]

    def residue(self, f: dict, e: int) -> dict | None:
        """Remainder after reducing against the HNF basis (empty for members)."""
        v = self.vector(f, e)
        if v is None:
            return None
        mod = self.modulus(e)
        for r in self.lattices[e].rows:
            c = min(r)
            f_ = v.get(c, 0) // r[c]
            if f_:
                v = clean(axpy(v, f_, r), mod)
        return v

    def witness(self, f: dict, e: int) -> list[tuple[str, int]] | None:
        """Generator coefficients (mod p^(K + shift)) expressing f, or None."""
        v = self.vector(f, e)
        if v is None:
            return None
        mod = self.modulus(e)
        gens = self.generators[e]
        rows = [v] + [self.vector(g, e) for _, g in gens]
        ncols = (e + 1) * self.N
        ker = left_kernel(rows, ncols, mod)
        for k in ker:
            lead = k.get(0, 0)
            if lead and lead % self.p:
                inv = pow(lead, -1, mod)
                out = []
                for i, (label, _) in enumerate(gens, start=1):
                    c = (-k.get(i, 0) * inv) % mod
                    if c:
                        out.append((label, c - mod if 2 * c > mod else c))
                return out
            if lead:
                break
        return None

    def index_over_monomials(self, e: int) -> int:
        rows = []
        scale = self.p ** self.shift[e]
        for a in range(e + 1):
            for s in range(self.N):
                rows.append({a * self.N + s: scale})
        mono = Lattice.span(rows, (e + 1) * self.N, self.modulus(e))
        return mono.index_in(self.lattices[e])

    def closure_check(self) -> bool:
        """Products of the atomic generators with every generator stay inside, within the bound."""
        atoms = [("x", {(1, 0): _unit(self.N, 0)}, 1), ("y", {(0, 1): _unit(self.N, 0)}, 1)]
        atoms += [(f"g{d}", _scaled_gamma(d, self.N), d) for d in range(2, self.D + 1)]
        for e in range(self.D + 1):
            for label, g in self.generators[e]:
                for _, atom, da in atoms:
                    if e + da <= self.D and not self.contains(env_mul(g, atom, self.N), e + da):
                        return False
        return True


def _unit(N: int, s: int) -> tuple:
    return tuple(Fraction(int(k == s)) for k in range(N))


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 1, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def envelope_generate(p: int, D: int, ctx: TruncContext) -> EnvelopeLattice:
    """Lattice of the q-PD envelope of (x - y) in degrees <= D, at the truncation of ``ctx``."""
    if not isinstance(ctx.base, PadicInt) or ctx.base.p != p:
        raise ValueError(f"envelope needs a Zp({p}, K) base")
    if not isinstance(ctx.qmod, QMinusOnePow):
        raise ValueError("envelope needs a (q-1)-power truncation")
    N, K = ctx.size, ctx.base.K
    env = EnvelopeLattice(p, D, K, N)
    for e in range(D + 1):
        gens = []
        for rest in range(e + 1):
            for part in _partitions(rest):
                prod: dict = {(0, 0): _unit(N, 0)}
                for d in part:
                    prod = env_mul(prod, _scaled_gamma(d, N), N)
                for a in range(e - rest + 1):
                    b = e - rest - a
                    mono = {(a, b): _unit(N, 0)}
                    base = env_mul(prod, mono, N)
                    for s in range(N):
                        shifted = {k: tuple([Fraction(0)] * s + list(v[:N - s])) for k, v in base.items()}
                        shifted = {k: v for k, v in shifted.items() if any(v)}
                        if shifted:
                            label = _gen_label(a, b, s, part)
                            gens.append((label, shifted))
        shift = 0
        for _, g in gens:
            for ser in g.values():
                for v in ser:
                    if v:
                        shift = max(shift, -_pval(v, p))
        env.shift[e] = shift
        env.generators[e] = gens
        mod = p ** (K + shift)
        rows = [env.vector(g, e) for _, g in gens]
        env.lattices[e] = Lattice.span(rows, (e + 1) * N, mod)
    return env


def _gen_label(a: int, b: int, s: int, part: tuple) -> str:
    bits = []
    if a:
        bits.append(f"x^{a}")
    if b:
        bits.append(f"y^{b}")
    if s:
        bits.append(f"t^{s}")
    bits += [f"g{d}" for d in part]
    return "*".join(bits) or "1"


def classical_pd_lattice(p: int, D: int, K: int) -> dict:
    """Span of x^a y^b (x - y)^d / d! per degree, scaled and reduced like the envelope at precision 1."""
    out = {}
    for e in range(D + 1):
        vecs = []
        for d in range(e + 1):
            binom = numerator_poly(d)  # at q = 1 this is (x - y)^d
            fact = 1
            for j in range(2, d + 1):
                fact *= j
            for a in range(e - d + 1):
                f: dict = {}
                for (i, j, _), v in binom.items():
                    key = (i + a, j + e - d - a)
                    f[key] = f.get(key, Fraction(0)) + Fraction(v * (-1) ** d, fact)
                vecs.append(f)
        out[e] = vecs
    return out


def q1_degeneration_check(p: int, D: int, K: int) -> dict:
    """Envelope at precision 1 against the classical divided-power lattice, per degree."""
    env = envelope_generate(p, D, TruncContext(PadicInt(p, K), QMinusOnePow(1)))
    classical = classical_pd_lattice(p, D, K)
    res = {}
    for e in range(D + 1):
        rows = []
        for f in classical[e]:
            v = env.vector({k: (x,) for k, x in f.items()}, e)
            rows.append(v if v is not None else None)
        if any(r is None for r in rows):
            res[e] = False
            continue
        res[e] = Lattice.span(rows, e + 1, env.modulus(e)) == env.lattices[e]
    return res


@dataclass
class DivisibilityResult:
    p: int
    alpha: int
    degree_bound: int
    q_precision: int
    p_precision: int
    stages: list  # per i: membership after dividing by Phi_(p^i)
    witness: list | None
    counterexample: dict | None
    direct_matches_staged: bool

    @property
    def ok(self) -> bool:
        return self.witness is not None and all(self.stages) and self.direct_matches_staged

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "alpha": str(self.alpha),
            "precision": {"degree": str(self.degree_bound), "q": str(self.q_precision), "p": str(self.p_precision)},
            "stages": [{"divisor": f"Phi_{self.p ** (i + 1)}", "member": ok} for i, ok in enumerate(self.stages)],
            "status": "pass" if self.ok else "fail",
            "witness": None if self.witness is None else [{"generator": g, "coefficient": str(c)}
                                                         for g, c in self.witness],
            "counterexample": None if self.counterexample is None else
            {str(k): str(v) for k, v in sorted(self.counterexample.items())},
        }


def check_p_power_divisibility(p: int, alpha: int, ctx: TruncContext, D: int | None = None,
                               env: EnvelopeLattice | None = None) -> DivisibilityResult:
    """Divide x^(p^alpha) - y^(p^alpha) by [p^alpha]_q one cyclotomic factor at a time.

    Each partial quotient must lie in the envelope lattice; the final one is
    returned with its generator coefficients.
    """
    if not is_prime(p) or alpha < 1:
        raise ValueError("need a prime p and alpha >= 1")
    n = p ** alpha
    D = n if D is None else D
    if D < n:
        raise PrecisionError(f"degree bound {D} below p^alpha = {n}")
    N = ctx.size
    env = env or envelope_generate(p, D, ctx)
    f = env_from_z({(n, 0, 0): 1, (0, n, 0): -1}, N)
    stages = []
    for i in range(1, alpha + 1):
        f = env_div_qpoly(f, cyclotomic_poly(p ** i), N)
        stages.append(env.contains(f, n))
    direct = env_div_qpoly(env_from_z({(n, 0, 0): 1, (0, n, 0): -1}, N), [1] * n, N)
    witness = env.witness(f, n)
    counter = None if witness is not None else env.residue(f, n)
    return DivisibilityResult(p, alpha, D, N, ctx.base.K, stages, witness, counter, direct == f)
