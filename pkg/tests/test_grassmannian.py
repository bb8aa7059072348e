import itertools

import numpy as np
import pytest

from ffsalem.errors import BadDimensions, TooManySubspaces, ZeroFrequency
from ffsalem.finite_field import field_from_spec, make_field
from ffsalem.grassmannian import (
    Subspace,
    enumerate_by_dedup,
    enumerate_grassmannian,
    format_gamma,
    gaussian_binomial,
    parse_gamma,
    perp,
    stabbing_count,
    stabbing_counts,
)


@pytest.mark.parametrize("d,k,spec,expected", [(4, 2, "2", 35), (3, 1, "2", 7), (4, 2, "3", 130), (2, 1, "5", 6)])
def test_enumeration_against_dedup_oracle(d, k, spec, expected):
    F = field_from_spec(spec)
    oracle = enumerate_by_dedup(d, k, F)
    got = enumerate_grassmannian(d, k, F)
    assert len(oracle) == expected
    assert got == oracle  # same members, same lexicographic order
    assert gaussian_binomial(d, k, F.q) == expected


def test_gaussian_binomial_examples():
    assert gaussian_binomial(5, 0, 7) == 1
    assert gaussian_binomial(2, 1, 3) == 4
    assert (80 * 26) // (8 * 2) == gaussian_binomial(4, 2, 3) == 130
    with pytest.raises(BadDimensions):
        gaussian_binomial(2, 3, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_gaussian_binomial_growth_bounds(q, d):
    for k in range(1, d):
        g = gaussian_binomial(d, k, q)
        assert q ** (k * (d - k)) <= g
        # |G(d-1,k)| / |G(d,k)| <= q^-k, cross-multiplied
        assert gaussian_binomial(d - 1, k, q) * q**k <= g


def test_rref_canonical_and_lexicographic():
    F = make_field(3)
    V = Subspace.span([(2, 2, 0), (0, 1, 1)], F)
    W = Subspace.span([(1, 1, 0), (1, 2, 1)], F)
    assert V == W and hash(V) == hash(W)
    assert V.basis == ((1, 0, 2), (0, 1, 1))
    G = enumerate_grassmannian(3, 2, F)
    assert [V.basis for V in G] == sorted(V.basis for V in G)
    assert len(set(G)) == len(G)


def test_enumeration_errors():
    F = make_field(5)
    with pytest.raises(BadDimensions):
        enumerate_grassmannian(3, 3, F)
    with pytest.raises(TooManySubspaces):
        enumerate_grassmannian(6, 3, F, cap=10**4)


def test_perp_examples():
    F3 = make_field(3)
    assert perp(Subspace.span([(1, 1)], F3)).basis == ((1, 2),)
    for spec in ("3", "5", "2^2"):
        F = field_from_spec(spec)
        assert perp(Subspace.span([(1, 0)], F)).basis == ((0, 1),)


@pytest.mark.parametrize("spec,d", [("2", 4), ("3", 3), ("2^2", 3), ("5", 3)])
def test_perp_properties(spec, d):
    F = field_from_spec(spec)
    for k in range(1, d):
        for V in enumerate_grassmannian(d, k, F):
            P = perp(V)
            assert P.k == d - k
            B, C = V.basis_array(), P.basis_array()
            assert np.all(F.vdot(B[:, None, :], C[None, :, :]) == 0)
            assert perp(P) == V


def test_stabbing_examples():
    for spec in ("3", "5"):
        F = field_from_spec(spec)
        G = enumerate_grassmannian(2, 1, F)
        for xi in F.all_points(2)[1:]:
            assert stabbing_count(tuple(xi), G) == 1
    F2 = make_field(2)
    G31 = enumerate_grassmannian(3, 1, F2)
    for xi in F2.all_points(3)[1:]:
        assert stabbing_count(tuple(xi), G31) == 3 == gaussian_binomial(2, 1, 2)
    V = Subspace.span([(1, 0)], make_field(3))
    assert stabbing_count((1, 0), [V]) == 0
    with pytest.raises(ZeroFrequency):
        stabbing_count((0, 0), G31)


@pytest.mark.parametrize("spec,d", [("3", 3), ("2", 4), ("2^2", 3)])
def test_stabbing_routes_agree(spec, d, monkeypatch):
    import ffsalem.grassmannian as gr
    F = field_from_spec(spec)
    rng = np.random.default_rng(0)
    G = enumerate_grassmannian(d, 1, F)
    sub = [G[i] for i in rng.choice(len(G), size=len(G) // 2, replace=False)]
    direct = [stabbing_count(tuple(x), sub) for x in F.all_points(d)[1:]]
    monkeypatch.setattr(gr, "PERP_TABLE_THRESHOLD", 0)
    via_perp = stabbing_counts(sub, F, d)
    monkeypatch.setattr(gr, "PERP_TABLE_THRESHOLD", 1 << 30)
    via_membership = stabbing_counts(sub, F, d)
    assert list(via_perp[1:]) == direct == list(via_membership[1:])


def test_gamma_text_round_trip():
    F = make_field(3, 2)
    G = enumerate_grassmannian(3, 2, F)[:5]
    text = format_gamma(G, F, 3, 2)
    assert text.startswith("q=3^2 d=3 k=2\n")
    ctx, d, k, back = parse_gamma(text)
    assert (ctx, d, k) == (F, 3, 2) and back == G
