"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (shown in the terminal summary) and then
asserts, so a failing criterion is visible both ways.  Runtime budgets are
asserted alongside the numerical checks.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from ffsalem.finite_field import field_from_spec, make_field
from ffsalem.fourier import GridFunction, Measure, dft_fast, dft_naive, dft_naive_many, inverse_dft, sup_nonzero
from ffsalem.grassmannian import (
    enumerate_grassmannian,
    gaussian_binomial,
    perp,
    stabbing_count,
    stabbing_counts,
)
from ffsalem.kakeya_sets import (
    construct_mt_kakeya_2d,
    coordinate_hyperplane,
    expand,
    family_from_gamma,
    hyperplane_gamma,
    is_kakeya,
    random_gamma,
)
from ffsalem.minimax import minimax_measure, objective, sharpness_report
from ffsalem.salem_measures import (
    exact_modulus,
    exact_sup,
    incidence_ft_closed_form,
    incidence_ft_closed_form_all,
    incidence_function,
    incidence_measure,
    kakeya_planar_bound,
    min_sup_lower_bound,
    salem_bound_dk,
)

PLANAR_QS = ["3", "5", "7", "3^2", "11", "13"]
STRATEGIES = ["zero", "random", "mt"]

# Families from criteria 1-3, collected for the closed-form oracle in criterion 4.
FAMILIES: list = []


def _criterion1_families():
    out = []
    for spec in PLANAR_QS:
        F = field_from_spec(spec)
        G = enumerate_grassmannian(2, 1, F)
        for strategy in STRATEGIES:
            out.append(family_from_gamma(G, strategy, seed=17))
    return out


def _criterion3_families():
    out = []
    for q in (3, 5):
        F = make_field(q)
        full = q * q + q + 1
        for m in (3, full, full // 2):
            for seed in range(100):
                gamma = random_gamma(3, 1, m, seed, F)
                out.append(family_from_gamma(gamma, "random", seed=seed))
    return out


def test_c1_planar_sup_exact(record):
    t0 = time.perf_counter()
    worst = 0.0
    exact_ok = True
    bound_ok = True
    for fam in _criterion1_families():
        q = fam.ctx.q
        mu = incidence_measure(fam)
        ex = exact_sup(mu)
        exact_ok &= ex is not None and ex[0] == Fraction(1, q + 1)
        fsup, _ = sup_nonzero(dft_naive(mu))
        worst = max(worst, abs(fsup - 1 / (q + 1)))
        bound_ok &= ex is not None and ex[0] <= Fraction(1, q)
        FAMILIES.append(fam)
    elapsed = time.perf_counter() - t0
    ok = exact_ok and bound_ok and worst <= 1e-9 and elapsed < 1.0
    record("C1 planar sup = 1/(q+1) exactly and <= 1/q", ok,
           f"18 families, float dev {worst:.1e}, {elapsed:.2f}s")
    assert ok


def test_c2_weight_identity(record):
    t0 = time.perf_counter()
    configs = [(2, 1, q) for q in (3, 4, 5, 7, 8, 9, 11, 13)]
    configs += [(3, 1, q) for q in (3, 4, 5, 7)]
    configs += [(3, 2, q) for q in (3, 4, 5)]
    configs += [(4, 2, 3)]
    rng = np.random.default_rng(2024)
    n_fam, bad = 0, 0
    for d, k, q in configs:
        F = make_field(*_prime_power(q))
        size = gaussian_binomial(d, k, q)
        for _ in range(4):
            m = int(rng.integers(1, size + 1))
            seed = int(rng.integers(2**31))
            gamma = random_gamma(d, k, m, seed, F)
            phi = incidence_function(family_from_gamma(gamma, "random", seed=seed))
            n_fam += 1
            bad += phi.total != len(gamma) * q**k
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and n_fam >= 50 and elapsed < 5.0
    record("C2 sum phi = |Gamma| q^k exactly", ok, f"{n_fam} families, {bad} mismatches, {elapsed:.2f}s")
    assert ok


def test_c3_partial_gamma_bound(record):
    t0 = time.perf_counter()
    worst_margin = -math.inf
    count = 0
    for fam in _criterion3_families():
        mu = incidence_measure(fam)
        sup, _ = sup_nonzero(dft_fast(mu))
        tight, _ = salem_bound_dk(3, 1, len(fam), fam.ctx)
        worst_margin = max(worst_margin, sup - float(tight))
        FAMILIES.append(fam)
        count += 1
    elapsed = time.perf_counter() - t0
    ok = worst_margin <= 1e-8 and count == 600 and elapsed < 30.0
    record("C3 sup <= |G(2,1)|/m for random partial Gamma", ok,
           f"{count} instances, max(sup - bound) = {worst_margin:.3g}, {elapsed:.2f}s")
    assert ok


def test_c4_closed_form_oracle(record):
    fams = FAMILIES or (_criterion1_families() + _criterion3_families())
    worst = 0.0
    for fam in fams:
        fh = dft_naive(incidence_measure(fam)).values
        cf = incidence_ft_closed_form_all(fam)
        worst = max(worst, float(np.abs(cf[1:] - fh[1:]).max()))
    # The batch form is itself checked against the per-frequency form on a sample.
    sample = fams[:: max(1, len(fams) // 20)]
    scalar_worst = 0.0
    for fam in sample:
        cf = incidence_ft_closed_form_all(fam)
        pts = fam.ctx.all_points(fam.d)
        for i in range(1, len(pts)):
            scalar_worst = max(scalar_worst, abs(incidence_ft_closed_form(fam, pts[i]) - cf[i]))
    ok = worst <= 1e-10 and scalar_worst <= 1e-10
    record("C4 closed form matches naive DFT", ok,
           f"{len(fams)} families, max dev {worst:.1e}, per-xi sample dev {scalar_worst:.1e}")
    assert ok


def _prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            n, r = 0, q
            while r % p == 0:
                r //= p
                n += 1
            return p, n


def _grids(limit=3125):
    for q in (2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25):
        d = 1
        while q**d <= limit:
            yield q, d
            d += 1


def test_c5_plancherel_inversion_fast_naive(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = {"plancherel": 0.0, "inversion": 0.0, "fast_naive": 0.0}
    n_grids = 0
    for q, d in _grids():
        F = make_field(*_prime_power(q))
        n = q**d
        vals = rng.normal(size=(100, n)) + 1j * rng.normal(size=(100, n))
        naive = dft_naive_many(F, d, vals)
        for i in range(100):
            f = GridFunction(F, d, vals[i])
            fh = dft_fast(f)
            norm_f = float(np.sum(np.abs(vals[i]) ** 2))
            lhs = float(np.sum(np.abs(fh.values) ** 2))
            worst["plancherel"] = max(worst["plancherel"], abs(lhs - n * norm_f) / (n * norm_f))
            back = inverse_dft(fh).values
            worst["inversion"] = max(worst["inversion"],
                                     float(np.linalg.norm(back - vals[i]) / np.linalg.norm(vals[i])))
            worst["fast_naive"] = max(worst["fast_naive"],
                                      float(np.linalg.norm(fh.values - naive[i]) / np.linalg.norm(naive[i])))
        n_grids += 1
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-9 and elapsed < 30.0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record("C5 Plancherel, inversion, fast = naive", ok, f"{n_grids} grids x 100, {detail}, {elapsed:.2f}s")
    assert ok


def test_c6_grassmannian_counts(record):
    t0 = time.perf_counter()
    count_bad, stab_bad, cases = 0, 0, 0
    for q in (2, 3, 4, 5):
        F = make_field(*_prime_power(q))
        for d in range(2, 5):
            for k in range(1, d):
                G = enumerate_grassmannian(d, k, F)
                cases += 1
                count_bad += len(G) != gaussian_binomial(d, k, q) or len(set(G)) != len(G)
                if q**d <= 1024:
                    counts = stabbing_counts(G, F, d)[1:]
                    stab_bad += not np.all(counts == gaussian_binomial(d - 1, k, q))
                    # per-xi route on a few frequencies
                    pts = F.all_points(d)
                    for i in (1, len(pts) // 2, len(pts) - 1):
                        if i:
                            stab_bad += stabbing_count(tuple(pts[i]), G) != gaussian_binomial(d - 1, k, q)
    elapsed = time.perf_counter() - t0
    ok = count_bad == 0 and stab_bad == 0 and elapsed < 60.0
    record("C6 |G(d,k)| = Gaussian binomial; stabbing = |G(d-1,k)|", ok,
           f"{cases} (q,d,k) cases, {count_bad}+{stab_bad} mismatches, {elapsed:.2f}s")
    assert ok


def test_c7_planar_cardinality(record):
    t0 = time.perf_counter()
    bad = []
    rows = 0
    for q in (3, 4, 5, 7, 8, 9, 11, 13):
        F = make_field(*_prime_power(q))
        lo = kakeya_planar_bound(q)
        kinds = [("random", family_from_gamma(enumerate_grassmannian(2, 1, F), "random", seed=s)) for s in range(3)]
        if q % 2:
            kinds.append(("mt", construct_mt_kakeya_2d(F)))
        for name, fam in kinds:
            K = expand(fam)
            rows += 1
            if not is_kakeya(K) or K.cardinality < lo:
                bad.append((q, name, K.cardinality))
            if name == "mt" and q >= 5 and K.cardinality > 0.7 * q * q:
                bad.append((q, name, K.cardinality))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5.0
    record("C7 |K| >= q^2/(2 - q^-2); MT |K| <= 0.7 q^2", ok, f"{rows} sets, violations {bad}, {elapsed:.2f}s")
    assert ok


@pytest.mark.parametrize("d", [2, 3])
def test_c8_sharpness_window(record, d):
    t0 = time.perf_counter()
    K0 = expand(construct_mt_kakeya_2d(make_field(5)))
    rep, res = sharpness_report(K0, d, seed=0)
    c = K0.cardinality / 25
    lower, upper = math.sqrt((1 - c) / c) / 5, 1 / 5
    elapsed = time.perf_counter() - t0
    ok = (lower - 1e-3 <= res.value <= upper + 1e-3) and rep.projection_defect <= 1e-10 and elapsed < 300
    record(f"C8 q=5 d={d} minimax value in [{lower:.4f}, {upper:.4f}] +- 1e-3", ok,
           f"v* = {res.value:.5f}, gap {res.gap:.1e}, projection defect {rep.projection_defect:.1e}, {elapsed:.2f}s")
    assert ok


def test_c9_hyperplane_gamma(record):
    bad = []
    for spec, d, k in [("2", 3, 1), ("3", 3, 1), ("3", 3, 2), ("5", 3, 1), ("2", 4, 2), ("3", 4, 1), ("3^2", 3, 1)]:
        F = field_from_spec(spec)
        V0 = coordinate_hyperplane(F, d)
        mu = incidence_measure(family_from_gamma(hyperplane_gamma(F, d, k, V0), "zero"))
        ex = exact_sup(mu)
        if ex is None or ex[0] != 1:
            bad.append((spec, d, k, "sup"))
        pts = F.all_points(d)
        for xi in perp(V0).span_indices():
            if xi and exact_modulus(mu, pts[xi]) != 1:
                bad.append((spec, d, k, int(xi)))
    ok = not bad
    record("C9 hyperplane Gamma0: |mu_hat| = 1 on V0^perp exactly", ok, f"7 configs, failures {bad}")
    assert ok


def test_c10_property_suites(record):
    rng = np.random.default_rng(10)
    # L2 minimality: sum_{xi != 0} |mu_hat|^2 >= q^d/|E| - 1 for every measure on E.
    l2_bad = 0
    for _ in range(1000):
        q = int(rng.choice([2, 3, 4, 5]))
        d = int(rng.integers(1, 4))
        F = make_field(*_prime_power(q))
        n = q**d
        size = int(rng.integers(1, n + 1))
        supp = rng.choice(n, size=size, replace=False)
        w = np.zeros(n)
        w[supp] = rng.dirichlet(np.ones(size))
        fh = dft_fast(Measure(F, d, w)).values
        l2_bad += float(np.sum(np.abs(fh[1:]) ** 2)) < n / size - 1 - 1e-9
        l2_bad += sup_nonzero(GridFunction(F, d, fh))[0] < min_sup_lower_bound(size, q, d) - 1e-9
    # Monotonicity of the lower bound in |E|.
    mono_bad = 0
    for _ in range(1000):
        q = int(rng.choice([2, 3, 4, 5, 7]))
        d = int(rng.integers(1, 5))
        a, b = sorted(rng.integers(1, q**d + 1, size=2))
        mono_bad += min_sup_lower_bound(int(a), q, d) < min_sup_lower_bound(int(b), q, d)
    # Convexity of the objective.
    conv_bad = 0
    F = make_field(3)
    for _ in range(1000):
        m1, m2 = rng.dirichlet(np.ones(27)), rng.dirichlet(np.ones(27))
        lam = rng.random()
        lhs = objective(Measure(F, 3, lam * m1 + (1 - lam) * m2))
        rhs = lam * objective(Measure(F, 3, m1)) + (1 - lam) * objective(Measure(F, 3, m2))
        conv_bad += lhs > rhs + 1e-12
    # Feasibility of every optimizer iterate.
    feas = {"n": 0, "bad": 0}

    def check(t, w):
        feas["n"] += 1
        feas["bad"] += w.min() < 0 or abs(w.sum() - 1) > 1e-12

    for q in (3, 5):
        E = expand(construct_mt_kakeya_2d(make_field(q)))
        minimax_measure(E, max_iters=600, tol=0.0, seed=q, random_init=True, callback=check)
    ok = l2_bad == 0 and mono_bad == 0 and conv_bad == 0 and feas["bad"] == 0 and feas["n"] >= 1000
    record("C10 property suites (L2 minimality, monotonicity, convexity, feasibility)", ok,
           f"1000/1000/1000/{feas['n']} cases, violations {l2_bad}/{mono_bad}/{conv_bad}/{feas['bad']}")
    assert ok
