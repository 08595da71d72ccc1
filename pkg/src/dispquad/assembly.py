"""Stiffness/mass assembly under configurable quadrature policies.

Entries are accumulated element by element into symmetric band storage. On
open meshes a policy may name a separate boundary rule; matrix entries whose
support touches the first or last element are then integrated with the
boundary rule over their entire support. Applying the boundary rule per
entry rather than per element keeps the cross-element exactness pattern of
the two-point rule intact (a per-element switch would leave one half of a
split C0-cubic pattern integrated by each rule and break the scheme near the
switch point).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import rules as rules_mod
from .errors import (
    ConfigError,
    InconsistencyError,
    ParameterError,
    PolicyError,
    SizeError,
    StencilError,
)
from .rules import QuadratureRule, blend, gauss_legendre, g25, nq2
from .splines import BSplineSpace, element_ranges, eval_basis

#: translation-invariance tolerance for stencil extraction
STENCIL_TOL = 1e-12

#: largest materialized 2D operator (unknowns)
MATERIALIZE_CAP = 10_000

PRESET_NAMES = ("full-g3", "nq2", "g25", "nq2-g25-boundary", "blend-g3-g2")


@dataclass(frozen=True)
class QuadraturePolicy:
    """Pair of rules for stiffness and mass, plus an optional boundary rule.

    boundary_anchoring chooses where an anchored quadrature node of the
    boundary rule sits on the outermost elements: at the domain endpoint
    ("domain", default) or at the first interior interface ("interface").
    Both give identical matrices for quartic integrands; the switch exists to
    make the orientation choice explicit and testable.
    """

    name: str
    stiffness_interior: QuadratureRule
    mass_interior: QuadratureRule
    stiffness_boundary: QuadratureRule | None = None
    mass_boundary: QuadratureRule | None = None
    boundary_anchoring: str = "domain"

    def __post_init__(self):
        if self.boundary_anchoring not in ("domain", "interface"):
            raise ParameterError(
                f"boundary_anchoring must be 'domain' or 'interface', "
                f"got {self.boundary_anchoring!r}"
            )
        if (self.stiffness_boundary is None) != (self.mass_boundary is None):
            raise PolicyError("boundary rules must be given for both forms or neither")

    @property
    def has_boundary_rule(self) -> bool:
        return self.stiffness_boundary is not None


def policy_preset(name: str) -> QuadraturePolicy:
    """Named policy presets used throughout the experiments."""
    key = name.strip().lower()
    if key == "full-g3":
        g3 = gauss_legendre(3)
        return QuadraturePolicy("full-g3", g3, g3)
    if key in ("nq2", "nq2-g25-boundary"):
        two = nq2(1)
        bdry = g25("right")
        return QuadraturePolicy(key, two, two, bdry, bdry)
    if key == "g25":
        r = g25("right")
        return QuadraturePolicy("g25", r, r, r, r)
    if key == "blend-g3-g2":
        tau = optimal_blend_tau()
        b = blend(gauss_legendre(3), gauss_legendre(2), tau)
        return QuadraturePolicy("blend-g3-g2", b, b)
    raise ConfigError(f"unknown policy preset {name!r}; known: {PRESET_NAMES}")


@dataclass
class SymBandMatrix:
    """Symmetric band matrix; band[d, i] holds A[i, i+d] (cyclically for
    periodic storage). Treated as immutable once assembled."""

    dim: int
    bandwidth: int
    periodic: bool
    bands: np.ndarray

    @classmethod
    def zeros(cls, dim: int, bandwidth: int, periodic: bool) -> "SymBandMatrix":
        bw = min(bandwidth, dim - 1)
        return cls(dim, bw, periodic, np.zeros((bw + 1, dim)))

    def add(self, i: int, j: int, value: float) -> None:
        if self.periodic:
            d = (j - i) % self.dim
            if d <= self.bandwidth:
                self.bands[d, i] += value
        else:
            d = j - i
            if 0 <= d <= self.bandwidth:
                self.bands[d, i] += value

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        for d in range(self.bandwidth + 1):
            for i in range(self.dim):
                j = (i + d) % self.dim if self.periodic else i + d
                if j >= self.dim:
                    continue
                a[i, j] = self.bands[d, i]
                a[j, i] = self.bands[d, i]
        return a


def _map_rule(rule: QuadratureRule, a: float, b: float):
    width = b - a
    pts = a + rule.nodes_array * width
    wts = rule.weights_array * width
    return pts, wts


def _accumulate(space: BSplineSpace, mat: SymBandMatrix, rule_for_element, derivative: bool):
    for e, (a, b, _active) in enumerate(element_ranges(space)):
        rule = rule_for_element(e)
        pts, wts = _map_rule(rule, a, b)
        for x, w in zip(pts, wts):
            idx, vals, ders = eval_basis(space, float(x))
            f = ders if derivative else vals
            for li in range(len(idx)):
                for lj in range(len(idx)):
                    mat.add(int(idx[li]), int(idx[lj]), w * f[li] * f[lj])


def _full_pass(space: BSplineSpace, stiff_rule_for_element, mass_rule_for_element):
    dof = space.dof_count
    k = SymBandMatrix.zeros(dof, space.degree, space.periodic)
    m = SymBandMatrix.zeros(dof, space.degree, space.periodic)
    _accumulate(space, k, stiff_rule_for_element, derivative=True)
    _accumulate(space, m, mass_rule_for_element, derivative=False)
    return k, m


def _oriented(rule: QuadratureRule, e: int, nel: int, anchoring: str):
    first = e == 0
    last = e == nel - 1
    if anchoring == "domain":
        return rule.reflected() if first and not last else rule
    return rule.reflected() if last and not first else rule


def _boundary_affected(a: int, b: int, n_elements: int, degree: int) -> bool:
    return max(a, b) <= degree or min(a, b) >= n_elements - 1


def _combine_with_boundary(space: BSplineSpace, interior: SymBandMatrix, boundary: SymBandMatrix):
    out = SymBandMatrix.zeros(interior.dim, interior.bandwidth, interior.periodic)
    for d in range(out.bandwidth + 1):
        for i in range(out.dim):
            j = i + d
            if j >= out.dim:
                continue
            src = boundary if _boundary_affected(i, j, space.n_elements, space.degree) else interior
            out.bands[d, i] = src.bands[d, i]
    return out


def _drop_boundary_dofs(mat: SymBandMatrix) -> SymBandMatrix:
    dim = mat.dim - 2
    out = SymBandMatrix.zeros(dim, mat.bandwidth, periodic=False)
    for d in range(out.bandwidth + 1):
        out.bands[d, : dim - d] = mat.bands[d, 1 : 1 + dim - d]
    return out


def assemble_1d(space: BSplineSpace, policy: QuadraturePolicy, bc: str):
    """Assemble (K, M) for the space under the policy and boundary condition.

    Dirichlet removes the first and last basis functions. Periodic assembly
    wraps indices; the policy's boundary rule is unused there.
    """
    if bc not in ("dirichlet", "periodic"):
        raise ConfigError(f"bc must be 'dirichlet' or 'periodic', got {bc!r}")
    if bc == "periodic" and not space.periodic:
        raise ConfigError("periodic bc requires the periodic-uniform family")
    if bc == "dirichlet" and space.periodic:
        raise ConfigError("dirichlet bc requires an open knot family")

    if bc == "periodic":
        k, m = _full_pass(
            space,
            lambda e: policy.stiffness_interior,
            lambda e: policy.mass_interior,
        )
    else:
        needs_boundary = any(
            "nq2" in r.kind for r in (policy.stiffness_interior, policy.mass_interior)
        )
        if needs_boundary and not policy.has_boundary_rule:
            raise PolicyError(
                "two-point pattern rules need a boundary rule on open meshes"
            )
        k, m = _full_pass(
            space,
            lambda e: policy.stiffness_interior,
            lambda e: policy.mass_interior,
        )
        if policy.has_boundary_rule:
            nel = space.n_elements
            anch = policy.boundary_anchoring
            kb, mb = _full_pass(
                space,
                lambda e: _oriented(policy.stiffness_boundary, e, nel, anch),
                lambda e: _oriented(policy.mass_boundary, e, nel, anch),
            )
            k = _combine_with_boundary(space, k, kb)
            m = _combine_with_boundary(space, m, mb)
        k = _drop_boundary_dofs(k)
        m = _drop_boundary_dofs(m)

    try:
        np.linalg.cholesky(m.to_dense())
    except np.linalg.LinAlgError as exc:
        raise PolicyError(f"policy {policy.name!r} yields a non-SPD mass matrix") from exc
    return k, m


@dataclass(frozen=True)
class Stencil:
    """Dimensionless interior coefficients of the uniform-mesh operators.

    The assembled stiffness row times h reads (k2, -k1, k0, -k1, k2) and the
    mass row over h reads (m2, m1, m0, m1, m2).
    """

    k0: float
    k1: float
    k2: float
    m0: float
    m1: float
    m2: float

    def stiffness_row_sum(self) -> float:
        return self.k0 - 2.0 * self.k1 + 2.0 * self.k2

    def mass_row_sum(self) -> float:
        return self.m0 + 2.0 * self.m1 + 2.0 * self.m2

    def as_array(self) -> np.ndarray:
        return np.array([self.k0, self.k1, self.k2, self.m0, self.m1, self.m2])


def uniform_stencil(stiffness_rule: QuadratureRule, mass_rule: QuadratureRule | None = None) -> Stencil:
    """Interior stencil evaluated directly from node/weight sums.

    Equivalent to assembling on a uniform periodic mesh and reading one row;
    used as the independent cross-check for extract_stencil.
    """
    if mass_rule is None:
        mass_rule = stiffness_rule
    ns, ws = stiffness_rule.nodes_array, stiffness_rule.weights_array
    nm, wm = mass_rule.nodes_array, mass_rule.weights_array
    k0 = 2.0 * float(np.sum(ws * (3.0 * ns**2 - 3.0 * ns + 1.0)))
    k1 = float(np.sum(ws * (1.0 - 2.0 * ns) ** 2))
    k2 = float(np.sum(ws * ns * (ns - 1.0)))
    m0 = 0.5 * float(np.sum(wm * (3.0 * nm**4 - 6.0 * nm**3 + 3.0 * nm**2 + 1.0)))
    m1 = 0.25 * float(np.sum(wm * (-4.0 * nm**4 + 8.0 * nm**3 - 4.0 * nm**2 + 1.0)))
    m2 = 0.25 * float(np.sum(wm * nm**2 * (nm - 1.0) ** 2))
    return Stencil(k0, k1, k2, m0, m1, m2)


def extract_stencil(k: SymBandMatrix, m: SymBandMatrix, h: float) -> Stencil:
    """Read the interior stencil from assembled uniform periodic matrices."""
    if not (k.periodic and m.periodic):
        raise StencilError("stencil is only defined for periodic assembly")
    if k.dim < 5:
        raise ParameterError(f"stencil extraction needs at least 5 elements, got {k.dim}")
    coeffs = []
    for mat, scale in ((k, h), (m, 1.0 / h)):
        for d in range(3):
            row = mat.bands[d] * scale
            mean = float(row.mean())
            if np.abs(row - mean).max() > STENCIL_TOL:
                raise InconsistencyError(
                    f"band {d} is not translation invariant "
                    f"(max deviation {np.abs(row - mean).max():.3e})"
                )
            coeffs.append(mean)
    return Stencil(
        k0=coeffs[0],
        k1=-coeffs[1],
        k2=coeffs[2],
        m0=coeffs[3],
        m1=coeffs[4],
        m2=coeffs[5],
    )


def policy_stencil(policy: QuadraturePolicy) -> Stencil:
    """Interior stencil of a policy (its rules applied on a uniform mesh)."""
    return uniform_stencil(policy.stiffness_interior, policy.mass_interior)


def optimal_blend_tau(
    a: QuadratureRule | None = None,
    b: QuadratureRule | None = None,
    reference: QuadratureRule | None = None,
) -> float:
    """Blend parameter matching the reference rule's m2 stencil entry.

    Defaults reproduce the three-point/two-point Gauss blend equivalent to
    the two-point optimal rule.
    """
    a = a or gauss_legendre(3)
    b = b or gauss_legendre(2)
    reference = reference or nq2(1)
    target = uniform_stencil(reference).m2

    def gap(tau: float) -> float:
        return uniform_stencil(blend(a, b, tau)).m2 - target

    return float(brentq(gap, -10.0, 10.0, xtol=1e-14))


@dataclass(frozen=True)
class TensorProductOperator:
    """2D operators built from 1D factors: K2 = K(x)M + M(x)K, M2 = M(x)M."""

    k1: np.ndarray
    m1: np.ndarray

    @property
    def dim(self) -> int:
        return self.k1.shape[0] ** 2

    def materialize(self):
        if self.dim > MATERIALIZE_CAP:
            raise SizeError(
                f"{self.dim} unknowns exceed the materialization cap "
                f"({MATERIALIZE_CAP}); use the 1D spectrum shortcut instead"
            )
        k2 = np.kron(self.k1, self.m1) + np.kron(self.m1, self.k1)
        m2 = np.kron(self.m1, self.m1)
        return k2, m2


def tensorize_2d(k: SymBandMatrix | np.ndarray, m: SymBandMatrix | np.ndarray) -> TensorProductOperator:
    kd = k.to_dense() if isinstance(k, SymBandMatrix) else np.asarray(k)
    md = m.to_dense() if isinstance(m, SymBandMatrix) else np.asarray(m)
    if kd.shape != md.shape:
        raise ParameterError("1D stiffness and mass must have matching shapes")
    return TensorProductOperator(kd, md)
