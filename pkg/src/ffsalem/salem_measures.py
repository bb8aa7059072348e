"""Incidence measures of affine plane families and the Fourier/cardinality bounds they witness."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyFamily, EmptySet, ZeroFrequency
from .finite_field import FieldCtx
from .fourier import Measure, dft_fast, dot_traces, sup_nonzero
from .grassmannian import gaussian_binomial, perp
from .kakeya_sets import AffinePlaneFamily

BOUND_SLACK = 1e-8


@dataclass(eq=False)
class IncidenceFunction:
    """phi(z) = number of planes of the family through z."""

    ctx: FieldCtx
    d: int
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.counts)


def incidence_function(family: AffinePlaneFamily) -> IncidenceFunction:
    n = family.ctx.q**family.d
    idx = family.plane_indices()
    counts = np.bincount(np.concatenate(idx), minlength=n) if idx else np.zeros(n, dtype=np.int64)
    return IncidenceFunction(family.ctx, family.d, counts.astype(np.int64))


def incidence_measure(family: AffinePlaneFamily) -> Measure:
    """mu = phi / sum(phi), with exact integer numerators and denominator |Gamma| q^k."""
    if len(family) == 0:
        raise EmptyFamily("incidence measure of an empty family")
    phi = incidence_function(family)
    return Measure.from_counts(family.ctx, family.d, phi.counts)


def incidence_ft_closed_form(family: AffinePlaneFamily, xi: Sequence[int]) -> complex:
    """mu_hat(xi) = |Gamma|^-1 sum over V with xi in V^perp of chi(-xi . u_V)."""
    ctx = family.ctx
    xi = tuple(int(x) for x in xi)
    if not any(xi):
        raise ZeroFrequency("closed form holds for xi != 0 only")
    if len(family) == 0:
        raise EmptyFamily("empty family")
    xi_arr = np.asarray(xi, dtype=np.int64)
    total = 0j
    for V, u in family.planes:
        if np.all(ctx.vdot(V.basis_array(), xi_arr[None, :]) == 0):
            t = ctx.trace_table[int(ctx.vdot(xi_arr, np.asarray(u, dtype=np.int64)))]
            total += ctx.roots_of_unity[(-t) % ctx.p]
    return total / len(family)


def incidence_ft_closed_form_all(family: AffinePlaneFamily) -> np.ndarray:
    """The closed form at every frequency at once (entry 0 is left at 0).

    Each plane V + u contributes chi(-xi . u) to every xi in V^perp.
    """
    ctx, d = family.ctx, family.d
    if len(family) == 0:
        raise EmptyFamily("empty family")
    out = np.zeros(ctx.q**d, dtype=complex)
    pts = ctx.all_points(d)
    for V, u in family.planes:
        idx = perp(V).span_indices()
        tr = dot_traces(ctx, pts[idx], np.asarray([u], dtype=np.int64))[:, 0]
        np.add.at(out, idx, ctx.roots_of_unity[(-tr) % ctx.p])
    out[0] = 0
    return out / len(family)


# -- exact transform moduli -----------------------------------------------------------
#
# With rational weights, mu_hat(xi) = den^-1 sum_t W_t zeta^-t where W_t sums the
# numerators over {x : Tr(xi . x) = t} and zeta = exp(2 pi i / p).  The only
# linear relation among 1, zeta, ..., zeta^(p-1) is that they sum to zero, so
# when every W_t but one shares a common value m the modulus is exactly
# |W_s - m| / den.

def trace_buckets(mu: Measure, xis: np.ndarray) -> np.ndarray:
    """W[i, t] = sum of numerators over x with Tr(xis[i] . x) = t."""
    if not mu.is_exact:
        raise ValueError("exact path needs a measure with integer numerators")
    ctx = mu.ctx
    supp = mu.support()
    xs = ctx.all_points(mu.d)[supp]
    nums = mu.numerators[supp]
    tr = dot_traces(ctx, np.atleast_2d(xis), xs)
    W = np.zeros((tr.shape[0], ctx.p), dtype=np.int64)
    for t in range(ctx.p):
        W[:, t] = (tr == t) @ nums
    return W


def _single_root_modulus(w: np.ndarray, den: int) -> Optional[Fraction]:
    vals, counts = np.unique(w, return_counts=True)
    if len(vals) == 1:
        return Fraction(0)
    if len(w) == 2:
        return Fraction(abs(int(w[0]) - int(w[1])), den)
    if len(vals) == 2 and counts.min() == 1:
        common = int(vals[np.argmax(counts)])
        odd = int(vals[np.argmin(counts)])
        return Fraction(abs(odd - common), den)
    return None


def exact_modulus(mu: Measure, xi: Sequence[int]) -> Optional[Fraction]:
    """|mu_hat(xi)| as a Fraction when it is a rational multiple of one root of unity, else None."""
    W = trace_buckets(mu, np.asarray([xi], dtype=np.int64))
    return _single_root_modulus(W[0], mu.denominator)


def exact_sup(mu: Measure) -> Optional[tuple[Fraction, tuple[int, ...]]]:
    """Exact sup over xi != 0 of |mu_hat(xi)| with lowest-encoded argmax.

    Returns None if some frequency has no exact rational modulus.
    """
    ctx, d = mu.ctx, mu.d
    xis = ctx.all_points(d)[1:]
    W = trace_buckets(mu, xis)
    best, arg = None, None
    for i in range(W.shape[0]):
        m = _single_root_modulus(W[i], mu.denominator)
        if m is None:
            return None
        if best is None or m > best:
            best, arg = m, i + 1
    return best, ctx.decode_point(arg, d)


# -- bounds --------------------------------------------------------------------------

def salem_bound_dk(d: int, k: int, gamma_size: int, ctx_or_q) -> tuple[Fraction, Fraction]:
    """(|G(d-1,k)| / |Gamma|, q^-k |G(d,k)| / |Gamma|)."""
    q = ctx_or_q.q if isinstance(ctx_or_q, FieldCtx) else int(ctx_or_q)
    if gamma_size < 1:
        raise EmptyFamily("|Gamma| must be at least 1")
    tight = Fraction(gaussian_binomial(d - 1, k, q), gamma_size)
    weak = Fraction(gaussian_binomial(d, k, q), gamma_size * q**k)
    return tight, weak


def min_sup_lower_bound(support_size: int, q: int, d: int) -> float:
    """sqrt((q^d/|E| - 1) / (q^d - 1)): no measure on E does better off zero."""
    n = q**d
    if support_size < 1:
        raise EmptySet("support must be nonempty")
    if support_size > n:
        raise ValueError(f"|E| = {support_size} exceeds q^d = {n}")
    return math.sqrt(max(0.0, (n / support_size - 1) / (n - 1)))


def size_estimate(C: float, beta: float, q: int, d: int) -> float:
    """Lower bound q^d / (C^2 q^-beta (q^d - 1) + 1) on |E| given sup <= C q^(-beta/2)."""
    if C < 0:
        raise ValueError("C must be nonnegative")
    if not 0 < beta <= 2 * d:
        raise ValueError("beta must lie in (0, 2d]")
    n = q**d
    return n / (C * C * q ** (-beta) * (n - 1) + 1)


def support_size_from_sup(sup: float, q: int, d: int) -> float:
    """The size estimate written directly in terms of the attained sup."""
    n = q**d
    return n / (sup * sup * (n - 1) + 1)


def kakeya_planar_bound(q: int) -> float:
    """q^2 / (2 - q^-2)."""
    return size_estimate(1.0, 2.0, q, 2)


def kakeya_bukh_bound(q: int, d: int = 2) -> float:
    """q^d / (2 - q^-1)^(d-1); comparison constant only."""
    return q**d / (2 - 1 / q) ** (d - 1)


def salem_constant(sup: float, support_size: int) -> float:
    """Smallest c with sup <= c |E|^-1/2."""
    return sup * math.sqrt(support_size)


def is_salem_witness(mu: Measure, c_const: float, sup: Optional[float] = None) -> bool:
    if c_const <= 0:
        raise ValueError("c_const must be positive")
    if sup is None:
        sup, _ = sup_nonzero(dft_fast(mu))
    size = len(mu.support())
    return sup <= c_const / math.sqrt(size) + 1e-12


@dataclass
class BoundReport:
    q: int
    p: int
    n: int
    d: int
    k: Optional[int]
    gamma_size: Optional[int]
    support_size: int
    sup_value: float
    sup_argmax: list
    tight_bound: Optional[float]
    weak_bound: Optional[float]
    bound: float
    lowerb1: float
    sizeest: float
    salem_constant: float
    sup_pass: bool
    size_pass: bool
    exact_sup: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.sup_pass and self.size_pass

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = self.passed
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def verify_salem_bound(
    mu: Measure,
    bound: float,
    *,
    k: Optional[int] = None,
    gamma_size: Optional[int] = None,
    exact: bool = False,
) -> BoundReport:
    """Measure sup_{xi != 0} |mu_hat| and compare it with ``bound``.

    ``sup_pass`` is sup <= bound + BOUND_SLACK.  ``size_pass`` checks that the
    support is at least as large as the measured sup forces it to be.
    """
    ctx, d = mu.ctx, mu.d
    sup, arg = sup_nonzero(dft_fast(mu))
    size = len(mu.support())
    tight = weak = None
    if k is not None and gamma_size:
        t, w = salem_bound_dk(d, k, gamma_size, ctx)
        tight, weak = float(t), float(w)
    ex = None
    if exact and mu.is_exact:
        res = exact_sup(mu)
        if res is not None:
            ex = str(res[0])
    est = support_size_from_sup(sup, ctx.q, d)
    return BoundReport(
        q=ctx.q,
        p=ctx.p,
        n=ctx.n,
        d=d,
        k=k,
        gamma_size=gamma_size,
        support_size=size,
        sup_value=sup,
        sup_argmax=list(arg),
        tight_bound=tight,
        weak_bound=weak,
        bound=float(bound),
        lowerb1=min_sup_lower_bound(size, ctx.q, d),
        sizeest=est,
        salem_constant=salem_constant(sup, size),
        sup_pass=bool(sup <= bound + BOUND_SLACK),
        size_pass=bool(size >= est * (1 - 1e-12)),
        exact_sup=ex,
    )


def family_report(family: AffinePlaneFamily, bound: str | float = "tight", exact: bool = False) -> BoundReport:
    """Incidence measure of ``family`` checked against the named bound.

    ``bound`` is ``tight`` (|G(d-1,k)|/|Gamma|), ``weak``, ``qk`` (q^-k) or a number.
    """
    mu = incidence_measure(family)
    tight, weak = salem_bound_dk(family.d, family.k, len(family), family.ctx)
    named = {"tight": float(tight), "weak": float(weak), "qk": float(family.ctx.q ** (-family.k))}
    value = named[bound] if isinstance(bound, str) else float(bound)
    return verify_salem_bound(mu, value, k=family.k, gamma_size=len(family), exact=exact)
