"""Quadrature rule catalog on the reference interval [0, 1].

Closed-form nodes and weights for the small Gauss-Legendre and Gauss-Lobatto
families, the dispersion-optimal two-point rule (nq2), the 2.5-point
Gauss-Radau-type rule (g25), and weighted blends of rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError, UnsupportedOrderError

#: absolute node distance below which blended points are merged
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    """Immutable quadrature rule: nodes strictly increasing in [0, 1]."""

    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    kind: str

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ParameterError("nodes and weights must have equal length")
        if any(n < -1e-15 or n > 1.0 + 1e-15 for n in self.nodes):
            raise ParameterError(f"nodes outside [0, 1]: {self.nodes}")
        if any(b - a <= 0 for a, b in zip(self.nodes, self.nodes[1:])):
            raise ParameterError(f"nodes not strictly increasing: {self.nodes}")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ParameterError(f"weights do not sum to 1: {self.weights}")

    @property
    def nodes_array(self) -> np.ndarray:
        return np.asarray(self.nodes)

    @property
    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights)

    def reflected(self) -> "QuadratureRule":
        """Mirror image of the rule, n -> 1-n, with matching weights."""
        pairs = sorted((1.0 - n, w) for n, w in zip(self.nodes, self.weights))
        return QuadratureRule(
            nodes=tuple(p[0] for p in pairs),
            weights=tuple(p[1] for p in pairs),
            kind=self.kind,
        )

    def moment(self, degree: int) -> float:
        """Apply the rule to x**degree on [0, 1]."""
        return float(np.sum(self.weights_array * self.nodes_array**degree))


def _sorted_rule(nodes: Sequence[float], weights: Sequence[float], kind: str) -> QuadratureRule:
    order = np.argsort(nodes)
    return QuadratureRule(
        nodes=tuple(float(nodes[i]) for i in order),
        weights=tuple(float(weights[i]) for i in order),
        kind=kind,
    )


def gauss_legendre(m: int) -> QuadratureRule:
    """m-point Gauss-Legendre rule on [0, 1]; exact through degree 2m-1."""
    if m == 1:
        n, w = [0.0], [2.0]
    elif m == 2:
        a = 1.0 / math.sqrt(3.0)
        n, w = [-a, a], [1.0, 1.0]
    elif m == 3:
        a = math.sqrt(3.0 / 5.0)
        n, w = [-a, 0.0, a], [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]
    elif m == 4:
        c = 2.0 / 7.0 * math.sqrt(6.0 / 5.0)
        a = math.sqrt(3.0 / 7.0 - c)
        b = math.sqrt(3.0 / 7.0 + c)
        wa = (18.0 + math.sqrt(30.0)) / 36.0
        wb = (18.0 - math.sqrt(30.0)) / 36.0
        n, w = [-b, -a, a, b], [wb, wa, wa, wb]
    elif m == 5:
        c = 2.0 * math.sqrt(10.0 / 7.0)
        a = math.sqrt(5.0 - c) / 3.0
        b = math.sqrt(5.0 + c) / 3.0
        wa = (322.0 + 13.0 * math.sqrt(70.0)) / 900.0
        wb = (322.0 - 13.0 * math.sqrt(70.0)) / 900.0
        n, w = [-b, -a, 0.0, a, b], [wb, wa, 128.0 / 225.0, wa, wb]
    else:
        raise UnsupportedOrderError(f"Gauss-Legendre supported for m in 1..5, got {m}")
    nodes = [(x + 1.0) / 2.0 for x in n]
    weights = [x / 2.0 for x in w]
    return _sorted_rule(nodes, weights, f"g{m}")


def gauss_lobatto(m: int) -> QuadratureRule:
    """m-point Gauss-Lobatto rule on [0, 1]; exact through degree 2m-3."""
    if m == 2:
        n, w = [-1.0, 1.0], [1.0, 1.0]
    elif m == 3:
        n, w = [-1.0, 0.0, 1.0], [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]
    elif m == 4:
        a = 1.0 / math.sqrt(5.0)
        n, w = [-1.0, -a, a, 1.0], [1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0]
    elif m == 5:
        a = math.sqrt(3.0 / 7.0)
        n = [-1.0, -a, 0.0, a, 1.0]
        w = [1.0 / 10.0, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 1.0 / 10.0]
    else:
        raise UnsupportedOrderError(f"Gauss-Lobatto supported for m in 2..5, got {m}")
    nodes = [(x + 1.0) / 2.0 for x in n]
    weights = [x / 2.0 for x in w]
    return _sorted_rule(nodes, weights, f"l{m}")


def nq2(variant: int = 1) -> QuadratureRule:
    """Two-point rule minimizing the dispersion error of C1 quadratic elements.

    The defining algebraic system has four closed-form solutions; they are the
    two reflection-equivalent rules listed in both index orders. All variants
    yield the same assembled operators; the returned rule is node-sorted.
    """
    if variant not in (1, 2, 3, 4):
        raise ParameterError(f"nq2 variant must be 1..4, got {variant}")
    n1, n2, w1, w2 = nq2_solution(variant)
    return _sorted_rule([n1, n2], [w1, w2], "nq2")


def nq2_solution(variant: int) -> tuple[float, float, float, float]:
    """Raw (n1, n2, w1, w2) closed-form solution vector for one variant.

    Variants 1 and 2 are one rule and its reflection; variants 3 and 4 repeat
    them with the node/weight indices swapped.
    """
    s = math.sqrt(266.0)
    w_hi = (133.0 + 2.0 * s) / 266.0
    w_lo = (133.0 - 2.0 * s) / 266.0

    def pair(a: float) -> tuple[float, float]:
        r = math.sqrt(3.0 * a)
        return (5.0 - math.sqrt(a / 3.0)) / 10.0, (75.0 + (66.0 - a) * r) / 150.0

    a_lo = 33.0 - 2.0 * s
    a_hi = 33.0 + 2.0 * s
    if variant == 1:
        n1, n2 = pair(a_lo)
        return n1, n2, w_hi, w_lo
    if variant == 2:
        n1, n2 = pair(a_lo)
        return 1.0 - n1, 1.0 - n2, w_hi, w_lo
    if variant == 3:
        n1, n2 = pair(a_hi)
        return n1, n2, w_lo, w_hi
    if variant == 4:
        n1, n2 = pair(a_hi)
        return 1.0 - n1, 1.0 - n2, w_lo, w_hi
    raise ParameterError(f"nq2 variant must be 1..4, got {variant}")


def g25(anchor: str = "right") -> QuadratureRule:
    """2.5-point rule: exact on discontinuous cubics with one node anchored.

    The right-anchored rule places a node at 1; the left-anchored rule is its
    mirror with a node at 0. The shared endpoint evaluation is what makes it
    cost 2.5 points per element on a mesh.
    """
    r = math.sqrt(51.0)
    n1 = (9.0 - r) / 30.0
    n2 = (9.0 + r) / 30.0
    w1 = (79.0 + 12.0 * (9.0 - r)) / 442.0
    w2 = (295.0 - 12.0 * (9.0 - r)) / 442.0
    w3 = 2.0 / 13.0
    right = _sorted_rule([n1, n2, 1.0], [w1, w2, w3], "g25")
    if anchor == "right":
        return right
    if anchor == "left":
        return right.reflected()
    raise ParameterError(f"anchor must be 'right' or 'left', got {anchor!r}")


def blend(a: QuadratureRule, b: QuadratureRule, tau: float) -> QuadratureRule:
    """Weighted union tau*a + (1-tau)*b; coincident nodes are merged.

    tau is not restricted to [0, 1]: useful blends live outside the convex
    hull and carry negative weights.
    """
    points = [(n, tau * w) for n, w in zip(a.nodes, a.weights)]
    points += [(n, (1.0 - tau) * w) for n, w in zip(b.nodes, b.weights)]
    points.sort()
    merged: list[list[float]] = []
    for n, w in points:
        if merged and n - merged[-1][0] <= MERGE_TOL:
            merged[-1][1] += w
        else:
            merged.append([n, w])
    return QuadratureRule(
        nodes=tuple(p[0] for p in merged),
        weights=tuple(p[1] for p in merged),
        kind=f"blend({a.kind},{b.kind})",
    )


def integrate(rule: QuadratureRule, f: Callable[[float], float], a: float, b: float) -> float:
    """Apply the rule to f over [a, b] through the affine map of the interval."""
    if not b > a:
        raise ParameterError(f"integration interval requires b > a, got [{a}, {b}]")
    width = b - a
    return float(sum(w * width * f(a + n * width) for n, w in zip(rule.nodes, rule.weights)))


_CATALOG: dict[str, Callable[[], QuadratureRule]] = {}


def catalog_rule(name: str) -> QuadratureRule:
    """Look up a rule by its catalog name (g1..g5, l2..l5, nq2[-v], g25[-side])."""
    if not _CATALOG:
        for m in range(1, 6):
            _CATALOG[f"g{m}"] = lambda m=m: gauss_legendre(m)
        for m in range(2, 6):
            _CATALOG[f"l{m}"] = lambda m=m: gauss_lobatto(m)
        _CATALOG["nq2"] = lambda: nq2(1)
        for v in range(1, 5):
            _CATALOG[f"nq2-{v}"] = lambda v=v: nq2(v)
        _CATALOG["g25"] = lambda: g25("right")
        _CATALOG["g25-right"] = lambda: g25("right")
        _CATALOG["g25-left"] = lambda: g25("left")
    key = name.strip().lower()
    if key not in _CATALOG:
        raise ParameterError(f"unknown rule name {name!r}; known: {sorted(_CATALOG)}")
    return _CATALOG[key]()
