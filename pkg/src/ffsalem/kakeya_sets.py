"""Kakeya and (d, k, Gamma)-sets: constructions, membership checks and file formats."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import BadDimension, EvenCharacteristic, FormatError, GridTooLarge, TooMany
from .finite_field import FieldCtx, field_from_spec, max_grid
from .grassmannian import (
    Subspace,
    enumerate_grassmannian,
    gaussian_binomial,
    parse_header,
)

TRANSLATE_CHUNK = 1 << 20


@dataclass(eq=False)
class PointSet:
    """Subset of F_q^d as a membership mask over point encodings."""

    ctx: FieldCtx
    d: int
    bits: np.ndarray

    def __post_init__(self):
        n = self.ctx.q**self.d
        if n > max_grid():
            raise GridTooLarge(f"q^d = {n} exceeds the grid cap {max_grid()}")
        self.bits = np.asarray(self.bits, dtype=bool).reshape(-1)
        if self.bits.shape[0] != n:
            raise ValueError(f"expected a mask of length {n}")
        self._card = int(np.count_nonzero(self.bits))

    @classmethod
    def empty(cls, ctx: FieldCtx, d: int) -> "PointSet":
        return cls(ctx, d, np.zeros(ctx.q**d, dtype=bool))

    @classmethod
    def full(cls, ctx: FieldCtx, d: int) -> "PointSet":
        return cls(ctx, d, np.ones(ctx.q**d, dtype=bool))

    @classmethod
    def from_indices(cls, ctx: FieldCtx, d: int, indices) -> "PointSet":
        bits = np.zeros(ctx.q**d, dtype=bool)
        bits[np.asarray(indices, dtype=np.int64)] = True
        return cls(ctx, d, bits)

    @classmethod
    def from_points(cls, ctx: FieldCtx, d: int, points) -> "PointSet":
        pts = np.asarray(list(points), dtype=np.int64).reshape(-1, d)
        return cls.from_indices(ctx, d, ctx.vencode(pts))

    @property
    def cardinality(self) -> int:
        return self._card

    def __len__(self):
        return self._card

    def __contains__(self, point) -> bool:
        return bool(self.bits[self.ctx.encode_point(point)])

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.ctx == other.ctx and self.d == other.d and np.array_equal(self.bits, other.bits)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def points(self) -> list[tuple[int, ...]]:
        return [self.ctx.decode_point(i, self.d) for i in self.indices()]

    def issubset(self, other: "PointSet") -> bool:
        return not np.any(self.bits & ~other.bits)


@dataclass(eq=False)
class AffinePlaneFamily:
    """Affine k-planes u_V + V, at most one per subspace V."""

    ctx: FieldCtx
    d: int
    k: int
    planes: list[tuple[Subspace, tuple[int, ...]]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for V, u in self.planes:
            if V.d != self.d or V.k != self.k:
                raise BadDimension(f"plane of shape ({V.d},{V.k}) in a ({self.d},{self.k}) family")
            if len(u) != self.d:
                raise BadDimension("translate has the wrong dimension")
            if V in seen:
                raise ValueError(f"subspace {V.basis} appears twice")
            seen.add(V)
        self.planes = [(V, tuple(int(x) for x in u)) for V, u in self.planes]

    def __len__(self):
        return len(self.planes)

    @property
    def gamma(self) -> list[Subspace]:
        return [V for V, _ in self.planes]

    def plane_indices(self) -> list[np.ndarray]:
        """Encodings of u_V + sum a_i v_i, one array of q^k entries per plane."""
        ctx = self.ctx
        out = []
        for V, u in self.planes:
            coords = ctx.vadd(V.span_coords(), np.asarray(u, dtype=np.int64)[None, :])
            out.append(ctx.vencode(coords))
        return out


def expand(family: AffinePlaneFamily) -> PointSet:
    """Union of the family's affine planes."""
    K = PointSet.empty(family.ctx, family.d)
    bits = K.bits.copy()
    for idx in family.plane_indices():
        bits[idx] = True
    return PointSet(family.ctx, family.d, bits)


def find_translate(K: PointSet, V: Subspace) -> Optional[tuple[int, ...]]:
    """Lowest-encoded u with u + V inside K, or None."""
    ctx = K.ctx
    span = V.span_coords()
    n = ctx.q**K.d
    rows = max(1, TRANSLATE_CHUNK // (span.shape[0] * K.d))
    for start in range(0, n, rows):
        idx = np.arange(start, min(n, start + rows), dtype=np.int64)
        cand = idx[K.bits[idx]]  # u itself is on u + V
        if cand.size == 0:
            continue
        us = _decode_many(ctx, cand, K.d)
        pts = ctx.vencode(ctx.vadd(us[:, None, :], span[None, :, :]))
        ok = np.all(K.bits[pts], axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            return ctx.decode_point(int(cand[hit[0]]), K.d)
    return None


def _decode_many(ctx: FieldCtx, idx: np.ndarray, d: int) -> np.ndarray:
    return (idx[:, None] // (ctx.q ** np.arange(d, dtype=np.int64))) % ctx.q


def is_dk_set(K: PointSet, gamma: Sequence[Subspace]):
    """Check that K holds a translate of every V in gamma.

    Returns ``(True, {V: u_V})`` with the lowest-encoded witness per V, or
    ``(False, V)`` for the first V (in the given order) with no translate.
    """
    witnesses = {}
    for V in gamma:
        if V.d != K.d:
            raise BadDimension(f"subspace of F_q^{V.d} tested against a set in F_q^{K.d}")
        u = find_translate(K, V)
        if u is None:
            return False, V
        witnesses[V] = u
    return True, witnesses


def is_kakeya(K: PointSet) -> bool:
    ok, _ = is_dk_set(K, enumerate_grassmannian(K.d, 1, K.ctx))
    return ok


def witness_family(K: PointSet, gamma: Sequence[Subspace]) -> AffinePlaneFamily:
    """Family of the witnessing planes inside K; raises if K misses some V."""
    ok, w = is_dk_set(K, gamma)
    if not ok:
        raise ValueError(f"set holds no translate of {w.basis}")
    k = gamma[0].k if gamma else 1
    return AffinePlaneFamily(K.ctx, K.d, k, [(V, w[V]) for V in gamma])


# -- constructions ----------------------------------------------------------------

def construct_mt_kakeya_2d(ctx: FieldCtx) -> AffinePlaneFamily:
    """Planar Kakeya family from parabola intercepts.

    Direction (1, m) gets the line through (0, -m^2/4); the vertical
    direction gets the line x = 0.  Needs 2 invertible, so q odd.
    """
    if ctx.p == 2:
        raise EvenCharacteristic("the parabola construction needs q odd")
    quarter = ctx.inv(4 % ctx.p)  # 4 lies in the prime subfield
    planes = [(Subspace.span([(0, 1)], ctx), (0, 0))]
    for m in range(ctx.q):
        V = Subspace.span([(1, m)], ctx)
        planes.append((V, (0, ctx.neg(ctx.mul(ctx.mul(m, m), quarter)))))
    planes.sort(key=lambda vu: vu[0].basis)
    return AffinePlaneFamily(ctx, 2, 1, planes)


def intercepts(gamma: Sequence[Subspace], strategy: str = "zero", seed: Optional[int] = None) -> list[tuple[int, ...]]:
    """Translates for each subspace: ``zero`` or ``random`` (seeded)."""
    if not gamma:
        return []
    ctx, d = gamma[0].ctx, gamma[0].d
    if strategy == "zero":
        return [(0,) * d for _ in gamma]
    if strategy == "random":
        rng = np.random.default_rng(seed)
        return [tuple(int(x) for x in rng.integers(0, ctx.q, size=d)) for _ in gamma]
    raise ValueError(f"unknown intercept strategy {strategy!r}")


def family_from_gamma(gamma: Sequence[Subspace], strategy: str = "zero", seed: Optional[int] = None) -> AffinePlaneFamily:
    if not gamma:
        raise ValueError("gamma is empty")
    ctx, d, k = gamma[0].ctx, gamma[0].d, gamma[0].k
    if strategy == "mt":
        if (d, k) != (2, 1) or len(gamma) != ctx.q + 1:
            raise ValueError("mt intercepts are defined only for the full planar family")
        return construct_mt_kakeya_2d(ctx)
    return AffinePlaneFamily(ctx, d, k, list(zip(gamma, intercepts(gamma, strategy, seed))))


def product_with_full(K0: PointSet, d: int) -> PointSet:
    """K0 x F_q^(d-2): (x, y) is in the result iff x is in K0."""
    if K0.d != 2:
        raise BadDimension("base set must lie in F_q^2")
    if d < 2:
        raise BadDimension(f"target dimension {d} < 2")
    if d == 2:
        return K0
    return PointSet(K0.ctx, d, np.tile(K0.bits, K0.ctx.q ** (d - 2)))


def random_gamma(d: int, k: int, m: int, seed, ctx: FieldCtx) -> list[Subspace]:
    """m distinct subspaces drawn uniformly from G(d, k), kept in enumeration order."""
    total = gaussian_binomial(d, k, ctx.q)
    if not 0 <= m <= total:
        raise TooMany(f"cannot draw {m} of {total} subspaces")
    G = enumerate_grassmannian(d, k, ctx)
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(total, size=m, replace=False))
    return [G[i] for i in pick]


def coordinate_hyperplane(ctx: FieldCtx, d: int) -> Subspace:
    """V0 = {x : x_(d-1) = 0}."""
    return Subspace.span([tuple(int(i == j) for j in range(d)) for i in range(d - 1)], ctx, d)


def hyperplane_gamma(ctx: FieldCtx, d: int, k: int, V0: Optional[Subspace] = None) -> list[Subspace]:
    """All V in G(d, k) lying inside the hyperplane V0."""
    V0 = V0 or coordinate_hyperplane(ctx, d)
    return [V for V in enumerate_grassmannian(d, k, ctx) if V.is_subspace_of(V0)]


# -- files ----------------------------------------------------------------------

def _header(ctx: FieldCtx, d: int) -> str:
    return f"q={ctx.p}^{ctx.n} d={d}"


def format_pointset(K: PointSet) -> str:
    lines = [_header(K.ctx, K.d)]
    lines += [",".join(str(c) for c in p) for p in K.points()]
    return "\n".join(lines) + "\n"


def parse_pointset(text: str) -> PointSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty point file")
    hdr = parse_header(lines[0])
    ctx, d = field_from_spec(hdr["q"]), int(hdr["d"])
    pts = []
    for ln in lines[1:]:
        p = tuple(int(x) for x in ln.split(","))
        if len(p) != d or not all(0 <= c < ctx.q for c in p):
            raise FormatError(f"bad point line {ln!r}")
        pts.append(p)
    if not pts:
        return PointSet.empty(ctx, d)
    return PointSet.from_points(ctx, d, pts)


def write_pointset(K: PointSet, path) -> None:
    Path(path).write_text(format_pointset(K))


def read_pointset(path) -> PointSet:
    return parse_pointset(Path(path).read_text())


def format_family(F: AffinePlaneFamily) -> str:
    """Gamma-file layout with a ``u=`` line opening each block."""
    blocks = [f"u={','.join(map(str, u))}\n{V.text()}" for V, u in F.planes]
    return f"q={F.ctx.p}^{F.ctx.n} d={F.d} k={F.k}\n" + "\n\n".join(blocks) + "\n"


def parse_family(text: str) -> AffinePlaneFamily:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty family file")
    hdr = parse_header(lines[0])
    ctx, d, k = field_from_spec(hdr["q"]), int(hdr["d"]), int(hdr["k"])
    planes, u, rows = [], None, []

    def flush():
        if u is None and not rows:
            return
        if u is None or len(rows) != k:
            raise FormatError("family block needs a u= line and k basis rows")
        V = Subspace.span(rows, ctx, d)
        if V.k != k:
            raise FormatError(f"rows {rows} are not independent")
        planes.append((V, u))

    for line in lines[1:] + [""]:
        s = line.strip()
        if not s:
            flush()
            u, rows = None, []
        elif s.startswith("u="):
            u = tuple(int(x) for x in s[2:].split(","))
        else:
            rows.append(tuple(int(x) for x in s.split(",")))
    return AffinePlaneFamily(ctx, d, k, planes)


def write_family(F: AffinePlaneFamily, path) -> None:
    Path(path).write_text(format_family(F))


def read_family(path) -> AffinePlaneFamily:
    return parse_family(Path(path).read_text())
