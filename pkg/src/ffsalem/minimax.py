"""Minimise sup_{xi != 0} |mu_hat(xi)| over probability measures supported in a set.

The objective is a maximum of moduli of linear functionals of mu, so it is
convex and has cheap exact subgradients.  We run projected subgradient
descent on the simplex over the support and keep the best iterate.  A lower
bound comes from two places: the L2 argument (every measure on E has sup at
least ``min_sup_lower_bound(|E|)``) and step-weighted averages of the
subgradients.  Each subgradient is Re(e^{-i theta} chi(-xi . x)) for some
(xi, theta), so any convex combination g of them satisfies
sup |mu_hat| >= sum_x mu(x) g(x) >= min_E g for every measure on E.  Averages
restart at powers of two and the best bound seen is kept.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import EmptySupport, NotKakeya, TooLarge
from .fourier import TIE_TOL, Measure, dft_fast, dot_traces, project, sup_nonzero
from .grassmannian import enumerate_grassmannian
from .kakeya_sets import PointSet, is_dk_set, product_with_full, AffinePlaneFamily
from .salem_measures import incidence_measure, min_sup_lower_bound

log = logging.getLogger(__name__)

MAX_GRID = 2401
DEFAULT_ITERS = 50_000
DEFAULT_TOL = 1e-3
CHECK_EVERY = 250


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, n + 1)
    rho = np.flatnonzero(u - css / ks > 0)[-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def character_matrix(E: PointSet) -> np.ndarray:
    """Rows xi != 0, columns x in E: chi(-xi . x)."""
    ctx = E.ctx
    pts = ctx.all_points(E.d)
    tr = dot_traces(ctx, pts[1:], pts[E.indices()])
    return ctx.roots_of_unity[(-tr) % ctx.p]


def objective(mu: Measure) -> float:
    return sup_nonzero(dft_fast(mu))[0]


@dataclass(eq=False)
class MinimaxResult:
    measure: Measure
    value: float
    argmax: tuple
    lower_bound: float
    dual_bound: float
    iterations: int
    gap: float
    converged: bool
    history: list = field(default_factory=list, repr=False)

    @property
    def kappa_effective(self) -> float:
        return self.value * self.measure.ctx.q

    def to_dict(self) -> dict:
        return {
            "q": self.measure.ctx.q,
            "d": self.measure.d,
            "support_size": int(len(self.measure.support())),
            "value": self.value,
            "argmax": list(self.argmax),
            "lower_bound": self.lower_bound,
            "dual_bound": self.dual_bound,
            "iterations": self.iterations,
            "gap": self.gap,
            "converged": self.converged,
            "kappa_effective": self.kappa_effective,
        }


def minimax_measure(
    E: PointSet,
    max_iters: int = DEFAULT_ITERS,
    tol: float = DEFAULT_TOL,
    seed: Optional[int] = None,
    warm_start: Optional[Measure] = None,
    eta0: float = 0.1,
    normalize: bool = True,
    random_init: bool = False,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> MinimaxResult:
    """Projected subgradient descent for min over mu on E of sup_{xi != 0} |mu_hat(xi)|.

    Step t is ``eta0 / sqrt(t)``, divided by the subgradient norm when
    ``normalize`` is set.  Starts from ``warm_start`` if given, from a seeded
    random point of the simplex if ``random_init``, and from the uniform
    measure on E otherwise.
    The returned ``value`` is the best objective over all iterates.
    ``converged`` is False when the certified gap still exceeds ``tol`` after
    ``max_iters`` iterations.  ``callback(t, w)`` sees every iterate's
    weights on the support.
    """
    ctx, d = E.ctx, E.d
    n = ctx.q**d
    if E.cardinality == 0:
        raise EmptySupport("cannot place a measure on the empty set")
    if n > MAX_GRID:
        raise TooLarge(f"q^d = {n} exceeds the dense optimisation cap {MAX_GRID}")
    S = E.indices()
    A = character_matrix(E)
    l2_bound = min_sup_lower_bound(len(S), ctx.q, d)

    if warm_start is not None:
        w = warm_start.weights[S].copy()
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("warm start is not supported inside E")
    elif random_init:
        w = np.random.default_rng(seed).dirichlet(np.ones(len(S)))
    else:
        w = np.full(len(S), 1.0 / len(S))

    best_val, best_w = math.inf, w.copy()
    dual_acc = np.zeros(len(S))
    dual_weight = 0.0
    dual_bound = -math.inf
    history = []
    it = 0
    for it in range(1, max_iters + 1):
        if callback is not None:
            callback(it, w)
        v = A @ w
        mags = np.abs(v)
        top = mags.max()
        j = int(np.flatnonzero(mags >= top - TIE_TOL)[0])
        if top < best_val:
            best_val, best_w = float(top), w.copy()
        g = np.real(np.exp(-1j * np.angle(v[j])) * A[j])
        eta = eta0 / math.sqrt(it)
        if normalize:
            eta /= max(float(np.linalg.norm(g)), 1e-300)
        if it & (it - 1) == 0 and dual_weight > 0:
            dual_bound = max(dual_bound, float((dual_acc / dual_weight).min()))
            dual_acc[:] = 0.0
            dual_weight = 0.0
        dual_acc += eta * g
        dual_weight += eta
        if it % CHECK_EVERY == 0:
            history.append(best_val)
            dual_bound = max(dual_bound, float((dual_acc / dual_weight).min()))
            if best_val - max(dual_bound, l2_bound) <= tol or best_val <= tol:
                break
        w = project_to_simplex(w - eta * g)
        if best_val == 0.0:
            break
    if dual_weight > 0:
        dual_bound = max(dual_bound, float((dual_acc / dual_weight).min()))

    weights = np.zeros(n)
    weights[S] = best_w / best_w.sum()
    mu = Measure(ctx, d, weights)
    value, arg = sup_nonzero(dft_fast(mu))
    certified = max(dual_bound, l2_bound)
    gap = max(0.0, value - certified)
    converged = gap <= tol or value <= tol
    if not converged:
        log.warning("minimax did not converge: gap %.3g > tol %.3g after %d iterations", gap, tol, it)
    return MinimaxResult(
        measure=mu,
        value=value,
        argmax=arg,
        lower_bound=l2_bound,
        dual_bound=dual_bound,
        iterations=it,
        gap=gap,
        converged=converged,
        history=history,
    )


def projection_defect(mu: Measure, m: int = 2) -> float:
    """max over xi1 in F_q^m of |nu_hat(xi1) - mu_hat(xi1, 0)| with nu the marginal."""
    if mu.d == m:
        return 0.0
    nu = project(mu, m)
    # (xi1, 0) has encoding equal to that of xi1, so the slice is the first q^m entries.
    return float(np.abs(dft_fast(nu).values - dft_fast(mu).values[: mu.ctx.q**m]).max())


@dataclass
class SharpnessReport:
    q: int
    d: int
    base_size: int
    set_size: int
    c: float
    lower_bound: float
    upper_bound: float
    incidence_sup: float
    l2_lower_bound: float
    value: float
    slice_sup: float
    kappa_effective: float
    projection_defect: float
    iterations: int
    gap: float
    converged: bool
    tol: float

    @property
    def in_window(self) -> bool:
        return self.lower_bound - self.tol <= self.value <= self.upper_bound + self.tol

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["in_window"] = self.in_window
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def sharpness_report(
    K0: PointSet,
    d: int,
    max_iters: int = DEFAULT_ITERS,
    tol: float = DEFAULT_TOL,
    seed: Optional[int] = None,
) -> tuple[SharpnessReport, MinimaxResult]:
    """Sandwich the minimax value on K0 x F_q^(d-2) between the two bounds.

    Lower: sqrt((1 - c)/c) / q with c = |K0| / q^2, valid for every measure on
    the product because its marginal lives on K0.  Upper: 1/q, attained by
    the incidence measure of any Kakeya family inside the product.
    """
    ctx, q = K0.ctx, K0.ctx.q
    ok, _ = is_dk_set(K0, enumerate_grassmannian(2, 1, ctx))
    if not ok:
        raise NotKakeya("base set is not a planar Kakeya set")
    K = product_with_full(K0, d)
    lines = enumerate_grassmannian(d, 1, ctx)
    ok, wit = is_dk_set(K, lines)
    if not ok:
        raise NotKakeya("product set is not Kakeya")
    family = AffinePlaneFamily(ctx, d, 1, [(V, wit[V]) for V in lines])
    inc = incidence_measure(family)
    inc_sup = objective(inc)

    c = K0.cardinality / q**2
    lower = math.sqrt((1 - c) / c) / q
    res = minimax_measure(K, max_iters=max_iters, tol=tol, seed=seed, warm_start=inc)
    fhat = dft_fast(res.measure)
    slice_sup = float(np.abs(fhat.values[1: q**2]).max())
    rep = SharpnessReport(
        q=q,
        d=d,
        base_size=K0.cardinality,
        set_size=K.cardinality,
        c=c,
        lower_bound=lower,
        upper_bound=1 / q,
        incidence_sup=inc_sup,
        l2_lower_bound=res.lower_bound,
        value=res.value,
        slice_sup=slice_sup,
        kappa_effective=res.kappa_effective,
        projection_defect=projection_defect(res.measure, 2),
        iterations=res.iterations,
        gap=res.gap,
        converged=res.converged,
        tol=tol,
    )
    return rep, res
