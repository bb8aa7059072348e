"""Linear subspaces of F_q^d: RREF canonical forms, enumeration, perps and stabbing counts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BadDimensions, FormatError, TooManySubspaces, ZeroFrequency
from .finite_field import FieldCtx, field_from_spec

DEFAULT_ENUM_CAP = 10**6
PERP_TABLE_THRESHOLD = 1 << 16


def rref(rows: Sequence[Sequence[int]], ctx: FieldCtx) -> tuple[list[list[int]], list[int]]:
    """Reduced row-echelon form over F_q; zero rows are dropped."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return [], []
    d = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(d):
        pr = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        s = ctx.inv(m[r][col])
        m[r] = [ctx.mul(s, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                c = m[i][col]
                m[i] = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


@dataclass(frozen=True)
class Subspace:
    """k-dimensional subspace of F_q^d held as its RREF basis matrix.

    Two values are equal iff they describe the same subspace.  Row i of
    ``basis`` is the i-th basis vector used when parametrising the subspace.
    """

    ctx: FieldCtx
    d: int
    basis: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...] = field(compare=False, default=())

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ctx: FieldCtx, d: int | None = None) -> "Subspace":
        vectors = [tuple(v) for v in vectors]
        if d is None:
            if not vectors:
                raise BadDimensions("cannot infer d from an empty spanning set")
            d = len(vectors[0])
        if any(len(v) != d for v in vectors):
            raise BadDimensions("spanning vectors have inconsistent lengths")
        rows, piv = rref(vectors, ctx)
        return cls(ctx, d, tuple(tuple(r) for r in rows), tuple(piv))

    @property
    def k(self) -> int:
        return len(self.basis)

    def basis_array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.k, self.d)

    def contains(self, point: Sequence[int]) -> bool:
        return Subspace.span(list(self.basis) + [tuple(point)], self.ctx, self.d).k == self.k

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def span_coords(self) -> np.ndarray:
        """Coordinates of all q^k points sum_i a_i v_i, in base-q order of (a_1, ..., a_k)."""
        ctx, k = self.ctx, self.k
        coeffs = ctx.all_points(k) if k else np.zeros((1, 0), dtype=np.int64)
        acc = np.zeros((coeffs.shape[0], self.d), dtype=np.int64)
        B = self.basis_array()
        for i in range(k):
            acc = ctx.vadd(acc, ctx.vmul(coeffs[:, i:i + 1], B[i][None, :]))
        return acc

    def span_indices(self) -> np.ndarray:
        return self.ctx.vencode(self.span_coords())

    def text(self) -> str:
        return "\n".join(",".join(str(x) for x in row) for row in self.basis)


def gaussian_binomial(d: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^d, in exact integer arithmetic."""
    if not 0 <= k <= d:
        raise BadDimensions(f"need 0 <= k <= d, got d={d}, k={k}")
    num = den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def _check_dims(d: int, k: int) -> None:
    if not 1 <= k < d:
        raise BadDimensions(f"need 1 <= k < d, got d={d}, k={k}")


def iter_schubert_cells(d: int, k: int, ctx: FieldCtx) -> Iterator[Subspace]:
    """Every RREF k x d matrix, grouped by pivot pattern."""
    q = ctx.q
    for piv in itertools.combinations(range(d), k):
        pset = set(piv)
        free = [(i, j) for i, c in enumerate(piv) for j in range(c + 1, d) if j not in pset]
        for vals in itertools.product(range(q), repeat=len(free)):
            m = [[0] * d for _ in range(k)]
            for i, c in enumerate(piv):
                m[i][c] = 1
            for (i, j), v in zip(free, vals):
                m[i][j] = v
            yield Subspace(ctx, d, tuple(tuple(r) for r in m), piv)


def enumerate_grassmannian(d: int, k: int, ctx: FieldCtx, cap: int = DEFAULT_ENUM_CAP) -> list[Subspace]:
    """All of G(d, k) over F_q, sorted lexicographically by RREF matrix."""
    _check_dims(d, k)
    if ctx.q ** (k * (d - k)) > cap:
        raise TooManySubspaces(f"q^(k(d-k)) = {ctx.q ** (k * (d - k))} exceeds cap {cap}")
    return sorted(iter_schubert_cells(d, k, ctx), key=lambda V: V.basis)


def enumerate_by_dedup(d: int, k: int, ctx: FieldCtx) -> list[Subspace]:
    """Reference enumeration: row spaces of all rank-k k x d matrices, deduplicated."""
    _check_dims(d, k)
    seen = set()
    for flat in itertools.product(range(ctx.q), repeat=k * d):
        rows = [flat[i * d:(i + 1) * d] for i in range(k)]
        V = Subspace.span(rows, ctx, d)
        if V.k == k:
            seen.add(V.basis)
    return [Subspace.span(b, ctx, d) for b in sorted(seen)]


def perp(V: Subspace) -> Subspace:
    """{u : u . v = 0 for all v in V}, in RREF."""
    ctx, d = V.ctx, V.d
    pivots = V.pivots or tuple(rref(V.basis, ctx)[1])
    free = [j for j in range(d) if j not in pivots]
    vecs = []
    for f in free:
        u = [0] * d
        u[f] = 1
        for i, c in enumerate(pivots):
            u[c] = ctx.neg(V.basis[i][f])
        vecs.append(u)
    return Subspace.span(vecs, ctx, d)


def stabbing_count(xi: Sequence[int], gamma: Sequence[Subspace]) -> int:
    """|{V in gamma : xi in V^perp}| by testing xi . v = 0 on each basis row."""
    if all(int(x) == 0 for x in xi):
        raise ZeroFrequency("stabbing count is only defined for xi != 0")
    if not gamma:
        return 0
    ctx = gamma[0].ctx
    xi = np.asarray(xi, dtype=np.int64)
    bases = np.stack([V.basis_array() for V in gamma])  # (m, k, d)
    dots = ctx.vdot(bases, xi[None, None, :])
    return int(np.count_nonzero(np.all(dots == 0, axis=1)))


def stabbing_counts(gamma: Sequence[Subspace], ctx: FieldCtx, d: int) -> np.ndarray:
    """Stabbing count for every xi in F_q^d at once (entry 0 is |gamma|).

    Small sweeps test membership directly; larger ones accumulate the
    point sets of the perps.
    """
    n = ctx.q**d
    if not gamma:
        return np.zeros(n, dtype=np.int64)
    if len(gamma) * n <= PERP_TABLE_THRESHOLD:
        pts = ctx.all_points(d)
        bases = np.stack([V.basis_array() for V in gamma])
        dots = ctx.vdot(pts[:, None, None, :], bases[None, :, :, :])  # (n, m, k)
        return np.all(dots == 0, axis=2).sum(axis=1).astype(np.int64)
    idx = np.concatenate([perp(V).span_indices() for V in gamma])
    return np.bincount(idx, minlength=n).astype(np.int64)


# -- gamma files ----------------------------------------------------------------

def gamma_header(ctx: FieldCtx, d: int, k: int) -> str:
    return f"q={ctx.p}^{ctx.n} d={d} k={k}"


def parse_header(line: str) -> dict:
    out = {}
    for tok in line.split():
        if "=" not in tok:
            raise FormatError(f"bad header token {tok!r}")
        key, val = tok.split("=", 1)
        out[key] = val
    if "q" not in out or "d" not in out:
        raise FormatError(f"header {line!r} lacks q= or d=")
    return out


def format_gamma(gamma: Sequence[Subspace], ctx: FieldCtx, d: int, k: int) -> str:
    blocks = [V.text() for V in gamma]
    return gamma_header(ctx, d, k) + "\n" + "\n\n".join(blocks) + "\n"


def write_gamma(gamma: Sequence[Subspace], path, ctx: FieldCtx, d: int, k: int) -> None:
    Path(path).write_text(format_gamma(gamma, ctx, d, k))


def parse_gamma(text: str) -> tuple[FieldCtx, int, int, list[Subspace]]:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty gamma file")
    hdr = parse_header(lines[0])
    ctx = field_from_spec(hdr["q"])
    d, k = int(hdr["d"]), int(hdr["k"])
    gamma, block = [], []
    for line in lines[1:] + [""]:
        if line.strip():
            block.append(tuple(int(x) for x in line.split(",")))
        elif block:
            V = Subspace.span(block, ctx, d)
            if V.k != k or len(block) != k:
                raise FormatError(f"block {block} is not a {k}-dimensional basis")
            gamma.append(V)
            block = []
    return ctx, d, k, gamma


def read_gamma(path) -> tuple[FieldCtx, int, int, list[Subspace]]:
    return parse_gamma(Path(path).read_text())
