"""Truncated q-deformation rings.

Scalars live in one of three bases (the integers, the integers with some N
inverted, or Z/p^K standing in for the p-adic integers) and the variable q
is truncated by one of three moduli: (q-1)^N, (q^m-1)^N or Phi_m(q)^N.

For (q-1)^N the canonical basis is the (q-1)-power basis; otherwise it is
the plain q-power basis below the degree of the modulus.  Converting a
q-polynomial into the (q-1)-basis is a binomial re-expansion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


class PrecisionError(ValueError):
    """A result would need more precision than the context carries."""


# ---------------------------------------------------------------------------
# dense polynomials in q (coefficient lists, low degree first)


def ptrim(a: Sequence[Scalar]) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def psub(a, b):
    return padd(a, [-x for x in b])


def pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def ppow(a, n):
    out = [1]
    for _ in range(n):
        out = pmul(out, a)
    return out


def pdivmod(a, b):
    """Division by ``b``; exact in the integers when ``b`` is monic."""
    a = ptrim(a)
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead = b[-1]
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    for i in range(len(a) - len(b), -1, -1):
        c = r[i + len(b) - 1]
        if c:
            f = c * lead if lead in (1, -1) else Fraction(c) / lead
            q[i] = f
            for j, y in enumerate(b):
                r[i + j] -= f * y
    return ptrim(q), ptrim(r)


def pmod(a, b):
    return pdivmod(a, b)[1]


def pcompose_power(a, n):
    """a(q^n)."""
    if not a:
        return []
    out = [0] * ((len(a) - 1) * n + 1)
    for i, x in enumerate(a):
        out[i * n] = x
    return out


def pgcdex(a, b):
    """Extended Euclid over Q: returns (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = [Fraction(x) for x in ptrim(a)], [Fraction(x) for x in ptrim(b)]
    s0, s1, t0, t1 = [Fraction(1)], [], [], [Fraction(1)]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
        t0, t1 = t1, psub(t0, pmul(q, t1))
    lead = r0[-1]
    return [x / lead for x in r0], [x / lead for x in s0], [x / lead for x in t0]


def pinverse_mod(a, m):
    g, s, _ = pgcdex(a, m)
    if g != [1]:
        raise ZeroDivisionError("not invertible modulo the given polynomial")
    return pmod(s, m)


def presultant(a, b):
    """Resultant of two integer polynomials via the Euclidean remainder sequence."""
    a, b = [Fraction(x) for x in ptrim(a)], [Fraction(x) for x in ptrim(b)]
    res = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db < 0:
            return 0
        if db == 0:
            return res * b[0] ** da
        r = pmod(a, b)
        if not r:
            return 0
        dr = len(r) - 1
        if (da * db) % 2:
            res = -res
        res *= b[-1] ** (da - dr)
        a, b = b, r


def from_q_minus_one(c: Sequence[Scalar]) -> list:
    """Expand sum c_k (q-1)^k into the q-power basis."""
    out: list = []
    for k, x in enumerate(c):
        if x:
            out = padd(out, [x * comb(k, j) * (-1) ** (k - j) for j in range(k + 1)])
    return out


def to_q_minus_one(a: Sequence[Scalar], n: int | None = None) -> list:
    """Re-expand a q-polynomial in powers of (q-1), optionally truncated."""
    size = len(a) if n is None else n
    out = [0] * size
    for k, x in enumerate(a):
        if x:
            for j in range(min(k, size - 1) + 1):
                out[j] += x * comb(k, j)
    return out


@lru_cache(maxsize=None)
def _cyclotomic(d: int) -> tuple:
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num, r = pdivmod(num, list(_cyclotomic(e)))
            assert not r
    return tuple(int(x) for x in num)


def cyclotomic_poly(d: int) -> list[int]:
    """Integer coefficients of Phi_d(q), by exact division of q^d - 1."""
    if d < 1:
        raise ValueError("cyclotomic index must be positive")
    return list(_cyclotomic(d))


def divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == [n]


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class Int:
    def reduce(self, x) -> Scalar:
        x = Fraction(x)
        if x.denominator != 1:
            raise ValueError(f"{x} is not an integer")
        return int(x)

    def __str__(self) -> str:
        return "Z"


@dataclass(frozen=True)
class IntLocalized:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("localization index must be positive")

    def reduce(self, x) -> Scalar:
        x = Fraction(x)
        primes = prime_factors(self.N)
        d = x.denominator
        for p in primes:
            while d % p == 0:
                d //= p
        if d != 1:
            raise ValueError(f"{x} has a denominator not dividing a power of {self.N}")
        return int(x) if x.denominator == 1 else x

    def __str__(self) -> str:
        return f"Z[1/{self.N}]"


@dataclass(frozen=True)
class PadicInt:
    p: int
    K: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.K < 1:
            raise ValueError("p-adic precision must be at least 1")

    @property
    def modulus(self) -> int:
        return self.p ** self.K

    def reduce(self, x) -> Scalar:
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise PrecisionError(f"{x} is not a p-adic integer for p={self.p}")
        return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus

    def __str__(self) -> str:
        return f"Zp({self.p},{self.K})"


@dataclass(frozen=True)
class QMinusOnePow:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation order must be positive")

    @property
    def size(self) -> int:
        return self.N

    def modulus_poly(self) -> list[int]:
        return from_q_minus_one([0] * self.N + [1])

    def __str__(self) -> str:
        return f"(q-1)^{self.N}"


@dataclass(frozen=True)
class QmPowMinusOnePow:
    m: int
    N: int

    def __post_init__(self):
        if self.m < 1 or self.N < 1:
            raise ValueError("level and truncation order must be positive")

    @property
    def size(self) -> int:
        return self.m * self.N

    def modulus_poly(self) -> list[int]:
        return ppow([-1] + [0] * (self.m - 1) + [1], self.N)

    def __str__(self) -> str:
        return f"(q^{self.m}-1)^{self.N}"


@dataclass(frozen=True)
class CyclotomicPow:
    m: int
    N: int

    def __post_init__(self):
        if self.m < 1 or self.N < 1:
            raise ValueError("level and truncation order must be positive")

    @property
    def size(self) -> int:
        return (len(cyclotomic_poly(self.m)) - 1) * self.N

    def modulus_poly(self) -> list[int]:
        return ppow(cyclotomic_poly(self.m), self.N)

    def __str__(self) -> str:
        return f"Phi_{self.m}(q)^{self.N}"


_BASE_RE = re.compile(r"^\s*(?:(Z)|Z\[1/(\d+)\]|Zp\((\d+),(\d+)\))\s*$")
_QMOD_RE = re.compile(
    r"^\s*(?:\(q-1\)\^(\d+)|\(q\^(\d+)-1\)\^(\d+)|Phi_?(\d+)(?:\(q\))?\^(\d+))\s*$")


@dataclass(frozen=True)
class TruncContext:
    """A coefficient universe: scalar base plus q-modulus."""

    base: Union[Int, IntLocalized, PadicInt]
    qmod: Union[QMinusOnePow, QmPowMinusOnePow, CyclotomicPow]

    @classmethod
    def parse(cls, text: str) -> "TruncContext":
        """Parse descriptors such as ``"Z;(q-1)^8"`` or ``"Zp(3,5);(q-1)^10"``."""
        try:
            b, m = text.split(";")
        except ValueError:
            raise ValueError(f"context descriptor needs exactly one ';': {text!r}") from None
        mb = _BASE_RE.match(b)
        mq = _QMOD_RE.match(m)
        if not mb or not mq:
            raise ValueError(f"cannot parse context descriptor {text!r}")
        if mb.group(1):
            base = Int()
        elif mb.group(2):
            base = IntLocalized(int(mb.group(2)))
        else:
            base = PadicInt(int(mb.group(3)), int(mb.group(4)))
        g = mq.groups()
        if g[0]:
            qmod = QMinusOnePow(int(g[0]))
        elif g[1]:
            qmod = QmPowMinusOnePow(int(g[1]), int(g[2]))
        else:
            qmod = CyclotomicPow(int(g[3]), int(g[4]))
        return cls(base, qmod)

    def __str__(self) -> str:
        return f"{self.base};{self.qmod}"

    @property
    def size(self) -> int:
        return self.qmod.size

    @property
    def q_minus_one_basis(self) -> bool:
        return isinstance(self.qmod, QMinusOnePow)

    @property
    def scalar_modulus(self) -> int:
        return self.base.modulus if isinstance(self.base, PadicInt) else 0

    def with_qmod(self, qmod) -> "TruncContext":
        return TruncContext(self.base, qmod)

    def with_base(self, base) -> "TruncContext":
        return TruncContext(base, self.qmod)

    # construction helpers -------------------------------------------------

    def reduce_qpoly(self, a: Sequence[Scalar]) -> tuple:
        """Canonical coefficient tuple of the class of the q-polynomial ``a``."""
        n = self.size
        if self.q_minus_one_basis:
            c = to_q_minus_one(a, n)
        else:
            c = pmod(list(a), self.qmod.modulus_poly())
            c = list(c) + [0] * (n - len(c))
        return tuple(self.base.reduce(x) for x in c)

    def element(self, a: Sequence[Scalar]) -> "QSeries":
        return QSeries(self, self.reduce_qpoly(a))

    def from_coeffs(self, c: Sequence[Scalar]) -> "QSeries":
        c = list(c) + [0] * (self.size - len(c))
        if len(c) > self.size:
            raise ValueError("too many coefficients for this context")
        return QSeries(self, tuple(self.base.reduce(x) for x in c))

    def scalar(self, x: Scalar) -> "QSeries":
        return self.element([x])

    def zero(self) -> "QSeries":
        return self.element([])

    def one(self) -> "QSeries":
        return self.element([1])

    def q(self) -> "QSeries":
        return self.element([0, 1])


def parse_context(text: str) -> TruncContext:
    return TruncContext.parse(text)


def _fmt(x: Scalar) -> str:
    return str(x)


def _parse_scalar(s: str) -> Scalar:
    x = Fraction(s)
    return int(x) if x.denominator == 1 else x


@dataclass(frozen=True)
class QSeries:
    """An element of a truncated q-ring in canonical coefficient form."""

    ctx: TruncContext
    coeffs: tuple

    def _check(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            if other.ctx != self.ctx:
                raise ValueError(f"context mismatch: {self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return QSeries(self.ctx, tuple(self.ctx.base.reduce(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.ctx, tuple(self.ctx.base.reduce(-a) for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        n = self.ctx.size
        if self.ctx.q_minus_one_basis:
            out = [0] * n
            for i, a in enumerate(self.coeffs):
                if a:
                    for j in range(n - i):
                        b = other.coeffs[j]
                        if b:
                            out[i + j] += a * b
            return self.ctx.from_coeffs(out)
        return self.ctx.element(pmul(ptrim(self.coeffs), ptrim(other.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = self.ctx.one(), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_qpoly(self) -> list:
        """A q-polynomial representative of this class."""
        if self.ctx.q_minus_one_basis:
            return from_q_minus_one(self.coeffs)
        return ptrim(self.coeffs)

    def inverse(self) -> "QSeries":
        """Inverse, when it exists in the context (raises otherwise)."""
        ctx = self.ctx
        if ctx.q_minus_one_basis:
            c0 = self.coeffs[0]
            inv0 = ctx.base.reduce(Fraction(1) / Fraction(c0)) if c0 else None
            if inv0 is None:
                raise ZeroDivisionError("constant term is not a unit")
            out = [0] * ctx.size
            for k in range(ctx.size):
                s = (1 if k == 0 else 0) - sum(self.coeffs[j] * out[k - j] for j in range(1, k + 1))
                out[k] = ctx.base.reduce(s * inv0)
            return QSeries(ctx, tuple(out))
        inv = pinverse_mod(ptrim(self.coeffs), ctx.qmod.modulus_poly())
        return ctx.element(inv)

    def change_context(self, target: TruncContext, check: bool = True) -> "QSeries":
        """Image under the quotient map to ``target``.

        With ``check`` the target modulus must divide the source modulus so
        that the map is well defined.
        """
        if check:
            _, r = pdivmod(self.ctx.qmod.modulus_poly(), target.qmod.modulus_poly())
            if r:
                raise ValueError(f"{target.qmod} does not divide {self.ctx.qmod}")
        poly = self.to_qpoly()
        src = self.ctx.base
        if isinstance(src, PadicInt) and not (isinstance(target.base, PadicInt) and target.base.p == src.p
                                              and target.base.K <= src.K):
            raise ValueError(f"cannot map scalars from {src} to {target.base}")
        return target.element(poly)

    def valuation(self) -> int:
        """(q-1)-adic valuation in a (q-1)-basis context (size if zero)."""
        if not self.ctx.q_minus_one_basis:
            raise ValueError("valuation is defined for (q-1)-power contexts")
        for k, a in enumerate(self.coeffs):
            if a:
                return k
        return self.ctx.size

    def multiplication_matrix(self) -> list[dict]:
        """Sparse integer rows: row k is the coordinate vector of self * basis_k."""
        rows = []
        for k in range(self.ctx.size):
            e = self.ctx.from_coeffs([0] * k + [1])
            prod = self * e
            rows.append({i: int(v) for i, v in enumerate(prod.coeffs) if v})
        return rows

    def to_json(self) -> dict:
        return {
            "ctx": str(self.ctx),
            "basis": "(q-1)" if self.ctx.q_minus_one_basis else "q",
            "coeffs": [_fmt(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QSeries":
        ctx = TruncContext.parse(data["ctx"])
        return ctx.from_coeffs([_parse_scalar(s) for s in data["coeffs"]])

    def __str__(self) -> str:
        var = "(q-1)" if self.ctx.q_minus_one_basis else "q"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*{var}^{k}")
        return " + ".join(terms) or "0"


# ---------------------------------------------------------------------------
# operations


def q_integer(m: int, ctx: TruncContext) -> QSeries:
    """[m]_q = 1 + q + ... + q^(m-1)."""
    if m < 1:
        raise ValueError("q-integer needs m >= 1")
    return ctx.element([1] * m)


def cyclotomic(d: int, ctx: TruncContext) -> QSeries:
    return ctx.element(cyclotomic_poly(d))


def q_pochhammer_poly(d: int) -> list[int]:
    out = [1]
    for j in range(1, d + 1):
        out = pmul(out, [1] + [0] * (j - 1) + [-1])
    return out


def q_pochhammer(d: int, ctx: TruncContext) -> QSeries:
    """(q;q)_d = (1-q)(1-q^2)...(1-q^d)."""
    if d < 0:
        raise ValueError("Pochhammer index must be nonnegative")
    return ctx.element(q_pochhammer_poly(d))


def adams_substitute(f: QSeries, n: int, target: TruncContext | None = None, check: bool = True) -> QSeries:
    """Image of ``f`` under q -> q^n.

    In a (q-1)-basis context the substitution is done termwise on
    ((1+t)^n - 1)^k, which keeps the truncation exact.  Otherwise ``f`` is
    taken through its canonical q-polynomial; with ``check`` the map must
    send the source modulus into the target ideal.
    """
    if n < 1:
        raise ValueError("Adams substitution needs n >= 1")
    tgt = f.ctx if target is None else target
    if check:
        image = pcompose_power(f.ctx.qmod.modulus_poly(), n)
        if pmod(image, tgt.qmod.modulus_poly()):
            raise ValueError(f"q -> q^{n} does not descend from {f.ctx.qmod} to {tgt.qmod}")
    if f.ctx.q_minus_one_basis and tgt.q_minus_one_basis:
        size = tgt.size
        step = [0] + [comb(n, j) for j in range(1, n + 1)][:size]
        step = (step + [0] * size)[:size]
        out = [0] * size
        power = [1] + [0] * (size - 1)
        for c in f.coeffs:
            if c:
                for j in range(size):
                    out[j] += c * power[j]
            power = _trunc_mul(power, step, size)
        return tgt.from_coeffs(out)
    return tgt.element(pcompose_power(f.to_qpoly(), n))


def _trunc_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a):
        if x:
            for j in range(n - i):
                out[i + j] += x * b[j]
    return out


def binomial_exact(u: int, n: int) -> int:
    """binom(u, n) for any integer u, divided exactly in Z."""
    num = 1
    for j in range(n):
        num *= u - j
    q, r = divmod(num, factorial(n))
    assert r == 0
    return q


def q_power_u(u: int, ctx: TruncContext, u_precision: int | None = None) -> QSeries:
    """Truncated binomial series q^u = sum binom(u, n) (q-1)^n.

    ``u`` is an integer representative of a p-adic integer.  If it is only
    known modulo p^u_precision, the coefficients binom(u, n) are determined
    modulo p^K only when u_precision >= K + v_p(n!); otherwise
    :class:`PrecisionError` is raised.
    """
    if not isinstance(ctx.base, PadicInt) or not ctx.q_minus_one_basis:
        raise ValueError("q^u needs a p-adic base and a (q-1)-power modulus")
    p, K = ctx.base.p, ctx.base.K
    coeffs = []
    for n in range(ctx.size):
        if u_precision is not None:
            need = K + sum(n // p ** i for i in range(1, n.bit_length() + 1))
            if u_precision < need:
                raise PrecisionError(
                    f"binom(u, {n}) needs u modulo p^{need}, only p^{u_precision} given")
        coeffs.append(binomial_exact(u, n))
    return ctx.from_coeffs(coeffs)


def _crt_idempotents(m: int, base: IntLocalized) -> dict[int, list]:
    full = [-1] + [0] * (m - 1) + [1]
    out = {}
    for d in divisors(m):
        phi = cyclotomic_poly(d)
        rest, r = pdivmod(full, phi)
        assert not r
        e = pmod(pmul(rest, pinverse_mod(rest, phi)), full)
        for x in e:
            base.reduce(x)
        out[d] = e
    return out


def crt_split(f: QSeries, m: int | None = None) -> dict[int, QSeries]:
    """Components of ``f`` modulo Phi_d(q) for every d | m.

    ``f`` must live in (Z[1/N], (q^m-1)^1) with every prime factor of m
    dividing N, which is exactly when the splitting idempotents exist.
    """
    ctx = f.ctx
    if not isinstance(ctx.qmod, QmPowMinusOnePow) or ctx.qmod.N != 1:
        raise ValueError("crt_split expects a (q^m-1)^1 context")
    if m is None:
        m = ctx.qmod.m
    if m != ctx.qmod.m:
        raise ValueError("target level must match the context level")
    base = ctx.base
    if m > 1 and (not isinstance(base, IntLocalized) or any(base.N % p for p in prime_factors(m))):
        raise ValueError(f"splitting over divisors of {m} needs every prime of {m} inverted")
    return {d: f.change_context(ctx.with_qmod(CyclotomicPow(d, 1))) for d in divisors(m)}


def crt_reassemble(parts: dict[int, QSeries], ctx: TruncContext) -> QSeries:
    """Inverse of :func:`crt_split`."""
    m = ctx.qmod.m
    if sorted(parts) != divisors(m):
        raise ValueError("need one component per divisor")
    base = ctx.base if isinstance(ctx.base, IntLocalized) else IntLocalized(1)
    idem = _crt_idempotents(m, base)
    total = ctx.zero()
    for d, part in parts.items():
        total = total + ctx.element(pmul(part.to_qpoly(), idem[d]))
    return total


@dataclass(frozen=True)
class CyclotomicFamily:
    """Compatible truncations at the levels (q^m - 1)^(N_m) of a divisor-closed set."""

    levels: tuple  # sorted tuples (m, QSeries)

    @classmethod
    def from_qpoly(cls, poly: Sequence[Scalar], levels: Iterable[int], N: int, base=Int()) -> "CyclotomicFamily":
        ms = sorted(set(levels))
        for m in ms:
            for d in divisors(m):
                if d not in ms:
                    raise ValueError(f"level set must be divisor-closed ({d} | {m} missing)")
        return cls(tuple((m, TruncContext(base, QmPowMinusOnePow(m, N)).element(poly)) for m in ms))

    def __getitem__(self, m: int) -> QSeries:
        for k, v in self.levels:
            if k == m:
                return v
        raise KeyError(m)

    def is_compatible(self) -> bool:
        for m, f in self.levels:
            for d, g in self.levels:
                if m % d == 0 and d != m:
                    if f.change_context(g.ctx) != g:
                        return False
        return True

    def __mul__(self, other: "CyclotomicFamily") -> "CyclotomicFamily":
        return CyclotomicFamily(tuple((m, f * other[m]) for m, f in self.levels))

    def __add__(self, other: "CyclotomicFamily") -> "CyclotomicFamily":
        return CyclotomicFamily(tuple((m, f + other[m]) for m, f in self.levels))
