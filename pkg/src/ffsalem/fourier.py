"""Discrete Fourier transform on F_q^d.

The forward transform carries no normalisation,

    fhat(xi) = sum_x chi(-xi . x) f(x),

so a probability measure has ``fhat(0) == 1``.  ``dft_naive`` evaluates this
sum directly and is the reference for ``dft_fast``, which factors the
transform axis by axis.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import BadDimensionSplit, DimensionMismatch, DimensionZero, FormatError, GridTooLarge
from .finite_field import FieldCtx, max_grid

MEASURE_SUM_TOL = 1e-12
NAIVE_CHUNK = 1 << 22  # phase-matrix entries materialised at once


@dataclass(eq=False)
class GridFunction:
    """Complex-valued function on F_q^d, indexed by point encoding."""

    ctx: FieldCtx
    d: int
    values: np.ndarray

    def __post_init__(self):
        if self.d < 1:
            raise DimensionZero("grid dimension must be at least 1")
        size = self.ctx.q**self.d
        if size > max_grid():
            raise GridTooLarge(f"q^d = {size} exceeds the grid cap {max_grid()}")
        self.values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if self.values.shape[0] != size:
            raise ValueError(f"expected {size} values, got {self.values.shape[0]}")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.ctx, self.d, self.values + other.values)

    def __mul__(self, scalar) -> "GridFunction":
        return GridFunction(self.ctx, self.d, self.values * scalar)

    __rmul__ = __mul__

    def at(self, point) -> complex:
        return complex(self.values[self.ctx.encode_point(point)])


class Measure(GridFunction):
    """Probability measure on F_q^d.

    When built from integer incidence counts, ``numerators``/``denominator``
    hold the exact rational weights.
    """

    def __init__(self, ctx, d, values, numerators=None, denominator=None):
        super().__init__(ctx, d, values)
        w = self.values
        if np.any(np.abs(w.imag) > 0) or np.any(w.real < 0):
            raise ValueError("measure weights must be nonnegative reals")
        if abs(w.real.sum() - 1.0) > MEASURE_SUM_TOL:
            raise ValueError(f"measure weights sum to {w.real.sum()!r}, not 1")
        self.numerators = None if numerators is None else np.asarray(numerators, dtype=np.int64)
        self.denominator = None if denominator is None else int(denominator)
        if self.numerators is not None and int(self.numerators.sum()) != self.denominator:
            raise ValueError("exact weights do not sum to 1")

    @classmethod
    def from_counts(cls, ctx: FieldCtx, d: int, counts) -> "Measure":
        counts = np.asarray(counts, dtype=np.int64)
        total = int(counts.sum())
        return cls(ctx, d, counts / total, numerators=counts, denominator=total)

    @classmethod
    def from_weights(cls, ctx: FieldCtx, d: int, weights) -> "Measure":
        w = np.asarray(weights, dtype=np.float64)
        return cls(ctx, d, w / w.sum())

    @classmethod
    def uniform_on(cls, ctx: FieldCtx, d: int, indices) -> "Measure":
        counts = np.zeros(ctx.q**d, dtype=np.int64)
        counts[np.asarray(indices, dtype=np.int64)] = 1
        return cls.from_counts(ctx, d, counts)

    @property
    def weights(self) -> np.ndarray:
        return self.values.real

    @property
    def is_exact(self) -> bool:
        return self.numerators is not None

    def support(self) -> np.ndarray:
        if self.is_exact:
            return np.flatnonzero(self.numerators)
        return np.flatnonzero(self.weights > 0)

    def exact_weight(self, index: int) -> Fraction:
        if not self.is_exact:
            raise ValueError("measure has no exact weights")
        return Fraction(int(self.numerators[index]), self.denominator)


# -- transforms ---------------------------------------------------------------

def _axis_kernel(ctx: FieldCtx, conjugate: bool = False) -> np.ndarray:
    """q x q matrix with entry [xi, x] = chi(-xi x) (or chi(+xi x) when conjugate)."""
    a = np.arange(ctx.q)
    tr = ctx.trace_table[ctx.vmul(a[:, None], a[None, :])]
    sign = 1 if conjugate else -1
    return ctx.roots_of_unity[(sign * tr) % ctx.p]


def dot_traces(ctx: FieldCtx, xis: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Tr(xi . x) for coordinate arrays ``xis`` (m, d) and ``xs`` (k, d); shape (m, k)."""
    return ctx.trace_table[ctx.vdot(xis[:, None, :], xs[None, :, :])]


def dft_naive_many(ctx: FieldCtx, d: int, values: np.ndarray) -> np.ndarray:
    """Defining-sum transform of every row of ``values`` (shape (m, q^d)).

    The phase matrix is built once per chunk and shared by all rows.
    """
    pts = ctx.all_points(d)
    n = pts.shape[0]
    values = np.atleast_2d(np.asarray(values, dtype=np.complex128))
    if values.shape[1] != n:
        raise DimensionMismatch(f"expected rows of length {n}, got {values.shape[1]}")
    out = np.empty(values.shape, dtype=np.complex128)
    rows = max(1, NAIVE_CHUNK // n)
    for start in range(0, n, rows):
        tr = dot_traces(ctx, pts[start:start + rows], pts)
        phase = ctx.roots_of_unity[(-tr) % ctx.p]
        out[:, start:start + rows] = values @ phase.T
    return out


def dft_naive(f: GridFunction) -> GridFunction:
    """Transform by the defining sum over every (xi, x) pair; O(q^(2d))."""
    return GridFunction(f.ctx, f.d, dft_naive_many(f.ctx, f.d, f.values)[0])


def _apply_axes(values: np.ndarray, q: int, d: int, kernel: np.ndarray) -> np.ndarray:
    # C-order reshape puts coordinate 0 (least significant) on the last axis.
    arr = values.reshape((q,) * d)
    for axis in range(d):
        arr = np.moveaxis(np.tensordot(kernel, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def dft_fast(f: GridFunction) -> GridFunction:
    """Same transform as ``dft_naive`` via one q x q kernel per axis; O(d q^(d+1))."""
    kernel = _axis_kernel(f.ctx)
    return GridFunction(f.ctx, f.d, _apply_axes(f.values, f.ctx.q, f.d, kernel))


dft = dft_fast


def inverse_dft(fhat: GridFunction) -> GridFunction:
    """f(x) = q^-d sum_xi chi(xi . x) fhat(xi)."""
    ctx, d = fhat.ctx, fhat.d
    kernel = _axis_kernel(ctx, conjugate=True)
    return GridFunction(ctx, d, _apply_axes(fhat.values, ctx.q, d, kernel) / ctx.q**d)


def plancherel_defect(f: GridFunction, fhat: Optional[GridFunction] = None) -> float:
    """Relative gap |sum |fhat|^2 - q^d sum |f|^2| / (q^d sum |f|^2 + 1)."""
    if fhat is None:
        fhat = dft_fast(f)
    lhs = float(np.sum(np.abs(fhat.values) ** 2))
    rhs = float(f.ctx.q**f.d * np.sum(np.abs(f.values) ** 2))
    return abs(lhs - rhs) / (rhs + 1.0)


TIE_TOL = 1e-12


def sup_nonzero(fhat: GridFunction) -> tuple[float, tuple[int, ...]]:
    """Largest |fhat(xi)| over xi != 0 and the lowest-encoded xi attaining it.

    Values within ``TIE_TOL`` of the maximum count as ties so that rounding
    noise cannot move the reported argmax.
    """
    if fhat.d < 1:
        raise DimensionZero("no nonzero frequencies")
    mags = np.abs(fhat.values[1:])
    if mags.size == 0:
        raise DimensionZero("no nonzero frequencies")
    top = float(mags.max())
    idx = int(np.flatnonzero(mags >= top - TIE_TOL)[0]) + 1
    return top, fhat.ctx.decode_point(idx, fhat.d)


def project(mu: Measure, m: int) -> Measure:
    """Marginal on the first m coordinates: nu(x) = sum_y mu(x, y)."""
    d, q = mu.d, mu.ctx.q
    if not 1 <= m < d:
        raise BadDimensionSplit(f"need 1 <= m < d, got m={m}, d={d}")
    # index = x + q^m * y with x the low coordinates
    if mu.is_exact:
        nums = mu.numerators.reshape(q ** (d - m), q**m).sum(axis=0)
        return Measure.from_counts(mu.ctx, m, nums)
    w = mu.weights.reshape(q ** (d - m), q**m).sum(axis=0)
    return Measure(mu.ctx, m, w)


def l2_mass(mu: Measure) -> float:
    return float(np.sum(mu.weights**2))


# -- serialisation -------------------------------------------------------------

def write_grid_csv(f: GridFunction, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in enumerate(f.values):
        w.writerow([i, repr(float(v.real)), repr(float(v.imag))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_grid_csv(source, ctx: FieldCtx, d: int) -> GridFunction:
    rows = _csv_rows(source, ("index", "re", "im"))
    vals = np.zeros(ctx.q**d, dtype=np.complex128)
    for row in rows:
        vals[int(row[0])] = complex(float(row[1]), float(row[2]))
    return GridFunction(ctx, d, vals)


def write_measure_csv(mu: Measure, path=None) -> str:
    """``index,weight`` rows for the support; weights are ``a/b`` when exact."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "weight"])
    for i in mu.support():
        if mu.is_exact:
            fr = mu.exact_weight(int(i))
            w.writerow([int(i), f"{fr.numerator}/{fr.denominator}"])
        else:
            w.writerow([int(i), repr(float(mu.weights[i]))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_measure_csv(source, ctx: FieldCtx, d: int) -> Measure:
    rows = _csv_rows(source, ("index", "weight"))
    entries = [(int(r[0]), r[1].strip()) for r in rows]
    if entries and all("/" in s or s.isdigit() for _, s in entries):
        fracs = [(i, Fraction(s)) for i, s in entries]
        den = math.lcm(*(fr.denominator for _, fr in fracs))
        nums = np.zeros(ctx.q**d, dtype=np.int64)
        for i, fr in fracs:
            nums[i] = fr.numerator * (den // fr.denominator)
        return Measure.from_counts(ctx, d, nums)
    w = np.zeros(ctx.q**d)
    for i, s in entries:
        w[i] = float(s)
    return Measure(ctx, d, w)


def _csv_rows(source, header):
    """``source`` is a path or an open text stream."""
    text = source.read() if hasattr(source, "read") else Path(source).read_text()
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if not rows or tuple(c.strip() for c in rows[0]) != header:
        raise FormatError(f"expected CSV header {','.join(header)}")
    return rows[1:]
