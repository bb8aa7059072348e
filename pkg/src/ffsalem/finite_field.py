"""Arithmetic in GF(p^n), the absolute trace and the fixed additive character.

Elements are encoded as integers ``0 .. q-1``; the base-p digits of the
integer (least significant first) are the coefficients of the polynomial
representative modulo the field's defining polynomial.  Points of
``F_q^d`` are encoded as base-q integers with coordinate 0 least
significant.

Scalar operations go through polynomial reduction.  Vectorised operations on
numpy arrays (used by every transform and enumeration kernel) go through a
full multiplication table when ``q <= MUL_TABLE_MAX`` and through
discrete-log tables above that.
"""

from __future__ import annotations

import builtins
import cmath
import functools
import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ContextMismatch,
    DegreeZero,
    DimensionMismatch,
    DivisionByZero,
    FieldTooLarge,
    FormatError,
    NotPrime,
)

DEFAULT_MAX_Q = 2**16
MUL_TABLE_MAX = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p as little-endian coefficient lists ----------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo ``b`` over F_p (``b`` nonzero)."""
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    if not b:
        raise DivisionByZero("polynomial division by zero")
    lead_inv = builtins.pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = (a[-1] * lead_inv) % p
        shift = len(a) - 1 - db
        for j, bj in enumerate(b):
            a[shift + j] = (a[shift + j] - c * bj) % p
        _trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree ``1 .. deg/2``."""
    n = len(_trim(list(poly))) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for deg in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not poly_rem(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Monic irreducible of degree n with the smallest coefficient encoding.

    Candidates ``x^n + c_{n-1} x^{n-1} + ... + c_0`` are scanned in increasing
    order of the integer ``sum c_i p^i``.
    """
    if n == 1:
        return (0, 1)
    for code in range(p**n):
        low = [(code // p**i) % p for i in range(n)]
        cand = low + [1]
        if low[0] != 0 and is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def parse_field_spec(spec: str) -> tuple[int, int]:
    """Parse ``"p^n"`` (or a bare prime power such as ``"9"``) into ``(p, n)``."""
    s = str(spec).strip()
    try:
        if "^" in s:
            a, b = s.split("^", 1)
            return int(a), int(b)
        q = int(s)
    except ValueError as exc:
        raise FormatError(f"bad field spec {spec!r}") from exc
    if q < 2:
        raise NotPrime(f"{q} is not a prime power")
    p = prime_factors(q)[0]
    n = 0
    while q % p == 0:
        q //= p
        n += 1
    if q != 1:
        raise NotPrime(f"{spec} is not a prime power")
    return p, n


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """The field F_q with q = p^n and a fixed defining polynomial.

    Immutable; lookup tables are built lazily and cached on the instance.
    """

    p: int
    n: int
    modulus: tuple[int, ...]
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.n)

    def __eq__(self, other):
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def __repr__(self):
        return f"FieldCtx({self.spec})"

    @property
    def spec(self) -> str:
        return f"{self.p}^{self.n}"

    # -- scalar arithmetic -------------------------------------------------

    def digits(self, a: int) -> list[int]:
        p = self.p
        return [(a // p**i) % p for i in range(self.n)]

    def from_digits(self, ds: Sequence[int]) -> int:
        p = self.p
        return sum((c % p) * p**i for i, c in enumerate(ds))

    def _check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of F_{self.q}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.n == 1:
            return (-a) % self.p
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        p, n = self.p, self.n
        if n == 1:
            return (a * b) % p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        m = self.modulus
        for deg in range(2 * n - 2, n - 1, -1):
            c = prod[deg] % p
            if c:
                for j in range(n + 1):
                    prod[deg - n + j] -= c * m[j]
        return self.from_digits(prod[:n])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if self.n == 1:
            return builtins.pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no inverse")
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def trace(self, a: int) -> int:
        """Absolute trace Tr(a) = a + a^p + ... + a^(p^(n-1)), as an integer in [0, p)."""
        return int(self.trace_table[a])

    def char(self, a: int) -> complex:
        """The fixed additive character exp(2 pi i Tr(a) / p)."""
        return cmath.exp(2j * math.pi * self.trace(a) / self.p)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, self._check(int(value)))

    def elements(self):
        return [FieldElement(self, a) for a in range(self.q)]

    # -- tables ------------------------------------------------------------

    @functools.cached_property
    def _digit_weights(self) -> np.ndarray:
        return self.p ** np.arange(self.n, dtype=np.int64)

    @functools.cached_property
    def primitive_element(self) -> int:
        q = self.q
        if q == 2:
            return 1
        factors = prime_factors(q - 1)
        for g in range(2, q) if self.n == 1 else range(self.p, q):
            if all(self.pow(g, (q - 1) // r) != 1 for r in factors):
                return g
        raise AssertionError("no primitive element")  # unreachable

    @functools.cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        g = self.primitive_element
        exp = np.empty(2 * (q - 1), dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            x = self.mul(x, g)
        exp[q - 1:] = exp[: q - 1]
        log = np.zeros(q, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        return exp, log

    @functools.cached_property
    def mul_table(self) -> np.ndarray:
        """Full q x q multiplication table (only for q <= MUL_TABLE_MAX)."""
        if self.q > MUL_TABLE_MAX:
            raise FieldTooLarge("multiplication table only built for q <= %d" % MUL_TABLE_MAX)
        a = np.arange(self.q)
        return self._vmul_log(a[:, None], a[None, :])

    @functools.cached_property
    def neg_table(self) -> np.ndarray:
        return self.vneg(np.arange(self.q))

    @functools.cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[a] = a^-1 for a != 0; entry 0 is 0 by convention."""
        exp, log = self._exp_log
        out = np.zeros(self.q, dtype=np.int64)
        a = np.arange(1, self.q)
        out[1:] = exp[(self.q - 1 - log[a]) % (self.q - 1)]
        return out

    @functools.cached_property
    def trace_table(self) -> np.ndarray:
        # Tr is F_p-linear, so it is fixed by its values on the power basis 1, t, ..., t^(n-1).
        p, n = self.p, self.n
        basis_tr = []
        for j in range(n):
            x = self.from_digits([1 if i == j else 0 for i in range(n)])
            s = 0
            y = x
            for _ in range(n):
                s = self.add(s, y)
                y = self.pow(y, p)
            if s >= p:
                raise AssertionError("trace left the prime field")
            basis_tr.append(s)
        digits = self.vdigits(np.arange(self.q))
        return (digits @ np.array(basis_tr, dtype=np.int64)) % p

    @functools.cached_property
    def roots_of_unity(self) -> np.ndarray:
        """exp(2 pi i t / p) for t = 0 .. p-1."""
        return np.exp(2j * np.pi * np.arange(self.p) / self.p)

    @functools.cached_property
    def char_table(self) -> np.ndarray:
        return self.roots_of_unity[self.trace_table]

    # -- vectorised arithmetic on integer arrays --------------------------

    def vdigits(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._digit_weights) % self.p

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return ((self.vdigits(a) + self.vdigits(b)) % self.p) @ self._digit_weights

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (-a) % self.p
        if self.p == 2:
            return a.copy()
        return ((-self.vdigits(a)) % self.p) @ self._digit_weights

    def _vmul_log(self, a, b) -> np.ndarray:
        exp, log = self._exp_log
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vmul(self, a, b) -> np.ndarray:
        if self.n == 1:
            return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
        if self.q <= MUL_TABLE_MAX:
            return self.mul_table[a, b]
        return self._vmul_log(a, b)

    def vdot(self, u, v) -> np.ndarray:
        """Dot product over the last axis of broadcastable point-coordinate arrays."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape[-1] != v.shape[-1]:
            raise DimensionMismatch(f"dimensions {u.shape[-1]} and {v.shape[-1]} differ")
        if self.n == 1:
            return np.sum(u * v, axis=-1) % self.p
        acc = None
        for i in range(u.shape[-1]):
            term = self.vmul(u[..., i], v[..., i])
            acc = term if acc is None else self.vadd(acc, term)
        return acc

    # -- points of F_q^d ----------------------------------------------------

    def encode_point(self, coords: Sequence[int]) -> int:
        q = self.q
        out = 0
        for c in reversed(list(coords)):
            c = int(c)
            if not 0 <= c < q:
                raise ValueError(f"coordinate {c} outside F_{q}")
            out = out * q + c
        return out

    def decode_point(self, index: int, d: int) -> tuple[int, ...]:
        q = self.q
        return tuple((int(index) // q**i) % q for i in range(d))

    def vencode(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        d = coords.shape[-1]
        return coords @ (self.q ** np.arange(d, dtype=np.int64))

    def all_points(self, d: int) -> np.ndarray:
        """Coordinates of every point of F_q^d, row ``i`` being the point encoded by ``i``."""
        idx = np.arange(self.q**d, dtype=np.int64)
        return (idx[:, None] // (self.q ** np.arange(d, dtype=np.int64))) % self.q


DEFAULT_MAX_GRID = 2**24


def max_grid() -> int:
    """Cap on q^d for dense grids; ``FFSALEM_MAX_GRID`` overrides the default."""
    env = os.environ.get("FFSALEM_MAX_GRID")
    return int(env) if env else DEFAULT_MAX_GRID


@functools.lru_cache(maxsize=None)
def make_field(p: int, n: int = 1, max_q: int = DEFAULT_MAX_Q) -> FieldCtx:
    """Build F_{p^n} with the smallest monic irreducible modulus of degree n."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1:
        raise DegreeZero("extension degree must be at least 1")
    if p**n > max_q:
        raise FieldTooLarge(f"q = {p}^{n} exceeds the maximum {max_q}")
    return FieldCtx(p, n, smallest_irreducible(p, n))


def field_from_spec(spec) -> FieldCtx:
    if isinstance(spec, FieldCtx):
        return spec
    return make_field(*parse_field_spec(spec))


@dataclass(frozen=True)
class FieldElement:
    """An element of a specific field, with operator overloading."""

    ctx: FieldCtx
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.ctx.q:
            raise ValueError(f"{self.value} is not an element of F_{self.ctx.q}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other.value
        if isinstance(other, int):
            return self.ctx.element(other % self.ctx.q if self.ctx.n == 1 else other).value
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx, self.ctx.add(self.value, b))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.value))

    def __sub__(self, other):
        return self + (-FieldElement(self.ctx, self._other(other)))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx, self.ctx.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx, self.ctx.div(self.value, b))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))

    def __int__(self):
        return self.value

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def trace(self) -> int:
        return self.ctx.trace(self.value)

    def char(self) -> complex:
        return self.ctx.char(self.value)


def _same_ctx(*els: FieldElement) -> FieldCtx:
    ctx = els[0].ctx
    for e in els[1:]:
        if e.ctx != ctx:
            raise ContextMismatch(f"{ctx} vs {e.ctx}")
    return ctx


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    ctx = _same_ctx(a, b)
    return FieldElement(ctx, ctx.add(a.value, b.value))


def neg(a: FieldElement) -> FieldElement:
    return -a


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    ctx = _same_ctx(a, b)
    return FieldElement(ctx, ctx.mul(a.value, b.value))


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def pow(a: FieldElement, e) -> FieldElement:  # noqa: A001 - mirrors the field API
    if isinstance(e, FieldElement):
        e = e.value
    return a ** int(e)


def trace(a: FieldElement) -> int:
    return a.trace()


def char_value(a: FieldElement) -> complex:
    return a.char()


def dot(u: Sequence, v: Sequence, ctx: FieldCtx | None = None) -> FieldElement:
    """Standard dot product of two points of F_q^d.

    Coordinates may be ``FieldElement`` values or integer encodings (then
    ``ctx`` is required).
    """
    if len(u) != len(v):
        raise DimensionMismatch(f"dimensions {len(u)} and {len(v)} differ")
    if len(u) == 0:
        raise DimensionMismatch("dot product needs d >= 1")
    if ctx is None:
        els = [c for c in list(u) + list(v) if isinstance(c, FieldElement)]
        if not els:
            raise ValueError("ctx is required for integer-encoded points")
        ctx = _same_ctx(*els)
    acc = 0
    for a, b in zip(u, v):
        acc = ctx.add(acc, ctx.mul(int(a), int(b)))
    return FieldElement(ctx, acc)
