"""Quadratic B-spline spaces on the unit interval.

Supports open-uniform, open-stretched (geometric element widths), and
periodic-uniform meshes. Evaluation uses the standard knot-based recursion and
is written for general degree even though the rest of the package fixes
degree 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeshError, ParameterError

DEGREE = 2

FAMILIES = ("open-uniform", "open-stretched", "periodic-uniform")


@dataclass(frozen=True)
class KnotVector:
    knots: tuple[float, ...]
    degree: int
    family: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise MeshError(f"unknown mesh family {self.family!r}")
        if any(b < a for a, b in zip(self.knots, self.knots[1:])):
            raise MeshError("knots must be non-decreasing")


@dataclass(frozen=True)
class BSplineSpace:
    knot_vector: KnotVector
    n_elements: int
    dof_count: int

    @property
    def degree(self) -> int:
        return self.knot_vector.degree

    @property
    def periodic(self) -> bool:
        return self.knot_vector.family == "periodic-uniform"

    @property
    def breakpoints(self) -> np.ndarray:
        """Element boundaries 0 = x_0 < ... < x_n = 1."""
        kv = self.knot_vector
        if self.periodic:
            return np.asarray(kv.knots)
        p = kv.degree
        return np.asarray(kv.knots[p : len(kv.knots) - p])


def build_knots(family: str, n: int, stretch: float = 1.0) -> KnotVector:
    """Knot vector for n elements of the given mesh family.

    open-stretched uses geometric element widths h_i = h_0 * stretch**i
    normalized to total length 1, smallest element at x = 0.
    """
    if family not in FAMILIES:
        raise MeshError(f"unknown mesh family {family!r}")
    if n < 3:
        raise MeshError(f"need at least 3 elements, got {n}")
    if stretch < 1.0:
        raise ParameterError(f"stretch factor must be >= 1, got {stretch}")
    p = DEGREE
    if family == "periodic-uniform":
        breaks = np.linspace(0.0, 1.0, n + 1)
        return KnotVector(tuple(breaks), p, family)
    if family == "open-uniform":
        interior = np.linspace(0.0, 1.0, n + 1)[1:-1]
    else:
        r = stretch
        if r == 1.0:
            interior = np.linspace(0.0, 1.0, n + 1)[1:-1]
        else:
            h0 = (1.0 - r) / (1.0 - r**n)
            widths = h0 * r ** np.arange(n)
            interior = np.cumsum(widths)[:-1]
    knots = [0.0] * (p + 1) + list(interior) + [1.0] * (p + 1)
    return KnotVector(tuple(knots), p, family)


def build_space(family: str, n: int, stretch: float = 1.0) -> BSplineSpace:
    kv = build_knots(family, n, stretch)
    if family == "periodic-uniform":
        return BSplineSpace(kv, n, n)
    return BSplineSpace(kv, n, n + DEGREE)


def _find_span(knots: np.ndarray, p: int, x: float) -> int:
    """Index i with knots[i] <= x < knots[i+1], left-closed; x at the right
    end of the domain is attributed to the last non-empty span."""
    n_kn = len(knots)
    hi = n_kn - p - 1
    if x >= knots[hi]:
        i = hi - 1
        while knots[i] == knots[i + 1]:
            i -= 1
        return i
    i = int(np.searchsorted(knots, x, side="right")) - 1
    return max(i, p)


def _basis_rows(knots: np.ndarray, p: int, span: int, x: float) -> list[list[float]]:
    """Triangular table of basis values; rows[k] holds the k-degree values of
    the functions active on the span, ordered by global index."""
    rows = [[1.0]]
    left = np.empty(p)
    right = np.empty(p)
    for j in range(1, p + 1):
        left[j - 1] = x - knots[span + 1 - j]
        right[j - 1] = knots[span + j] - x
        row = [0.0] * (j + 1)
        saved = 0.0
        for r in range(j):
            denom = right[r] + left[j - r - 1]
            temp = rows[j - 1][r] / denom if denom != 0.0 else 0.0
            row[r] = saved + right[r] * temp
            saved = left[j - r - 1] * temp
        row[j] = saved
        rows.append(row)
    return rows


def _values_and_derivs(knots: np.ndarray, p: int, span: int, x: float):
    rows = _basis_rows(knots, p, span, x)
    values = np.array(rows[p])
    lower = rows[p - 1]
    derivs = np.empty(p + 1)
    for r in range(p + 1):
        i = span - p + r
        left_term = 0.0
        if r > 0:
            d = knots[i + p] - knots[i]
            if d != 0.0:
                left_term = lower[r - 1] / d
        right_term = 0.0
        if r < p:
            d = knots[i + p + 1] - knots[i + 1]
            if d != 0.0:
                right_term = lower[r] / d
        derivs[r] = p * (left_term - right_term)
    return values, derivs


def eval_basis(space: BSplineSpace, x: float):
    """Active basis values and first derivatives at x in [0, 1].

    Returns (indices, values, derivatives) for the degree+1 active functions;
    periodic indices are reduced modulo the dof count.
    """
    if x < 0.0 or x > 1.0:
        raise ParameterError(f"evaluation point {x} outside [0, 1]")
    p = space.degree
    kv = space.knot_vector
    if space.periodic:
        n = space.n_elements
        h = 1.0 / n
        elem = min(int(x / h), n - 1)
        ext = (np.arange(-p, n + p + 1)) * h
        span = elem + p
        values, derivs = _values_and_derivs(ext, p, span, x)
        indices = np.array([(elem + r) % n for r in range(p + 1)])
        return indices, values, derivs
    knots = np.asarray(kv.knots)
    span = _find_span(knots, p, x)
    values, derivs = _values_and_derivs(knots, p, span, x)
    indices = np.arange(span - p, span + 1)
    return indices, values, derivs


def element_ranges(space: BSplineSpace):
    """Per-element records (a, b, active global indices) tiling [0, 1]."""
    p = space.degree
    breaks = space.breakpoints
    out = []
    for e in range(space.n_elements):
        a, b = float(breaks[e]), float(breaks[e + 1])
        if space.periodic:
            active = tuple((e + r) % space.dof_count for r in range(p + 1))
        else:
            active = tuple(range(e, e + p + 1))
        out.append((a, b, active))
    return out
