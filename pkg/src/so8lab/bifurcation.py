"""Phase vector fields of the cubic equivariants and their zeros on fixed-point circles."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyFault, ParameterError, ToleranceFault
from .equivariants import PolyMap, g3_cubic_basis, reynolds_equivariant_basis, restrict_map
from .matgroup import (
    QUAT_I,
    QUAT_J,
    QUAT_K,
    FiniteMatrixGroup,
    QuaternionPair,
    build_g8_generators,
    close_group,
    quaternion_pair_to_matrix,
)
from .repanalysis import Subspace, fixed_subspace, pointwise_stabilizer

__all__ = [
    "GRID",
    "BISECT_TOL",
    "DERIV_STEP",
    "EPS_REG",
    "DEGENERATE_TOL",
    "PhaseFieldFamily",
    "CircleScalar",
    "Zero",
    "BranchReport",
    "tangent_field",
    "g3_phase_family",
    "g3_isotropy_spaces",
    "circle_scalar",
    "find_branches",
    "g3_branches",
    "lift_branches_g8",
    "sweep",
]

GRID = 4096
BISECT_TOL = 1e-12
DERIV_STEP = 1e-6
EPS_REG = 1e-6
DEGENERATE_TOL = 1e-10
ZERO_TOL = 1e-10
TANGENCY_TOL = 1e-9


def tangent_field(e: PolyMap) -> PolyMap:
    """t(v) = |v|^2 e(v) - <e(v), v> v.

    On the unit sphere this is e minus its radial part; the factor |v|^2 keeps the
    result homogeneous (degree deg(e) + 2).
    """
    if e.is_scalar or len(e.components) != e.n:
        raise ParameterError("tangent_field needs a map R^n -> R^n")
    ident = PolyMap.identity(e.n)
    return e.times(ident.dot(ident)) - ident.times(e.dot(ident))


@dataclass(frozen=True)
class PhaseFieldFamily:
    """The combination a * t1 + b * t2."""

    a: float
    t1: PolyMap = field(repr=False)
    t2: PolyMap = field(repr=False)
    b: float = 1.0

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.a * self.t1(v) + self.b * self.t2(v)

    @property
    def n(self) -> int:
        return self.t1.n

    def with_a(self, a: float) -> PhaseFieldFamily:
        return PhaseFieldFamily(float(a), self.t1, self.t2, self.b)


_G3_FIELDS: tuple[PolyMap, PolyMap] | None = None


def g3_phase_family(a: float, b: float = 1.0) -> PhaseFieldFamily:
    global _G3_FIELDS
    if _G3_FIELDS is None:
        e31, e32 = g3_cubic_basis()
        _G3_FIELDS = (tangent_field(e31), tangent_field(e32))
    return PhaseFieldFamily(float(a), _G3_FIELDS[0], _G3_FIELDS[1], float(b))


def g3_isotropy_spaces() -> dict[str, Subspace]:
    """Fix(H1), Fix(H2), Fix(H3) for H1 = <[j,i]>, H2 = <[j,j]>, H3 = <[j,k]>."""
    out = {}
    for label, right in (("H1", QUAT_I), ("H2", QUAT_J), ("H3", QUAT_K)):
        h = quaternion_pair_to_matrix(QuaternionPair(QUAT_J, right)).entries
        out[label] = Subspace.kernel(h - np.eye(4))
    return out


@dataclass(frozen=True)
class CircleScalar:
    """f(phi) = <F(v(phi)), n(phi)> with v(phi) = cos(phi) b1 + sin(phi) b2 and n = v'."""

    fix: Subspace = field(repr=False)
    family: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def point(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        b1, b2 = self.fix.basis
        return np.cos(phi)[..., None] * b1 + np.sin(phi)[..., None] * b2

    def tangent(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        b1, b2 = self.fix.basis
        return -np.sin(phi)[..., None] * b1 + np.cos(phi)[..., None] * b2

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        pts = np.atleast_2d(self.point(phi))
        vals = np.einsum("bi,bi->b", np.atleast_2d(self.family(pts)), np.atleast_2d(self.tangent(phi)))
        return vals.reshape(phi.shape)

    def tangency_defect(self, samples: int = 64) -> float:
        phi = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        pts, tan = self.point(phi), self.tangent(phi)
        vals = np.atleast_2d(self.family(pts))
        along = np.einsum("bi,bi->b", vals, tan)[:, None] * tan
        scale = 1.0 + np.abs(vals).max()
        return float(np.abs(vals - along).max() / scale)


def circle_scalar(fix: Subspace, a: float | None = None, *, family=None) -> CircleScalar:
    """Reduce the phase field on the unit circle of a 2-dimensional fixed space to a scalar."""
    if fix.dim != 2:
        raise ParameterError(f"circle_scalar needs a 2-dimensional fixed space, got dim {fix.dim}")
    if family is None:
        if a is None:
            raise ParameterError("need either a or an explicit field")
        family = g3_phase_family(a)
    cs = CircleScalar(fix, family)
    defect = cs.tangency_defect()
    if defect > TANGENCY_TOL:
        raise ConsistencyFault(f"field is not tangent to the circle in the fixed space (defect {defect:.3e})")
    return cs


@dataclass(frozen=True)
class Zero:
    angle: float
    point: np.ndarray = field(repr=False)
    derivative: float
    regular: bool
    stabilizer_order: int | None = None
    fixed_dim: int | None = None

    def to_dict(self) -> dict:
        out = {
            "angle": self.angle,
            "point": [float(x) for x in self.point],
            "scalarDerivative": self.derivative,
            "regular": self.regular,
        }
        if self.stabilizer_order is not None:
            out["stabilizerOrder"] = self.stabilizer_order
            out["fixedDim"] = self.fixed_dim
        return out


@dataclass(frozen=True)
class BranchReport:
    label: str
    a: float
    zeros: tuple[Zero, ...]
    degenerate: bool
    max_abs_f: float = 0.0

    @property
    def angles(self) -> np.ndarray:
        return np.array([z.angle for z in self.zeros])

    @property
    def all_regular(self) -> bool:
        return all(z.regular for z in self.zeros)

    def to_dict(self) -> dict:
        return {
            "fixedSpace": self.label,
            "a": self.a,
            "degenerate": self.degenerate,
            "zeroCount": len(self.zeros),
            "zeros": [z.to_dict() for z in self.zeros],
        }


def _bisect(f: CircleScalar, lo: float, hi: float, flo: float) -> float:
    while hi - lo >= BISECT_TOL:
        mid = 0.5 * (lo + hi)
        fm = float(f(mid))
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_branches(fix: Subspace, a: float | None = None, *, family=None, label: str = "") -> BranchReport:
    """Zeros of the circle scalar, located on a uniform grid and refined by bisection."""
    f = circle_scalar(fix, a, family=family)
    a_val = float(a) if a is not None else float(getattr(family, "a", math.nan))
    phi = 2 * np.pi * np.arange(GRID) / GRID
    vals = f(phi)
    fmax = float(np.abs(vals).max())
    if fmax < DEGENERATE_TOL:
        return BranchReport(label, a_val, (), True, fmax)

    tiny = 1e-13 * fmax
    sign = np.where(np.abs(vals) <= tiny, 0, np.sign(vals)).astype(int)
    roots: list[float] = []
    for i in range(GRID):
        j = (i + 1) % GRID
        if sign[i] == 0:
            if sign[i - 1] != 0:  # first grid point of a run of zeros
                roots.append(float(phi[i]))
            continue
        if sign[j] != 0 and sign[i] != sign[j]:
            hi = float(phi[j]) if j else 2 * np.pi
            roots.append(_bisect(f, float(phi[i]), hi, float(vals[i])))

    zeros = []
    for r in roots:
        r = r % (2 * np.pi)
        fr = float(f(r))
        if abs(fr) >= ZERO_TOL:
            raise ToleranceFault(f"refinement lost the sign change near phi={r:.6f}: |f| = {abs(fr):.3e}")
        deriv = float((f(r + DERIV_STEP) - f(r - DERIV_STEP)) / (2 * DERIV_STEP))
        zeros.append(Zero(r, f.point(r), deriv, abs(deriv) > EPS_REG))
    zeros.sort(key=lambda z: z.angle)
    return BranchReport(label, a_val, tuple(zeros), False, fmax)


def g3_branches(a: float) -> list[BranchReport]:
    return [find_branches(w, a, label=label) for label, w in g3_isotropy_spaces().items()]


# --------------------------------------------------------------------------
# lifting to R^8
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedFields:
    group: FiniteMatrixGroup = field(repr=False)
    fix_h: Subspace = field(repr=False)
    t1: PolyMap = field(repr=False)
    t2: PolyMap = field(repr=False)
    residual: float


_LIFT_CACHE: dict[int, LiftedFields] = {}


def lifted_fields(ell: int, group: FiniteMatrixGroup | None = None) -> LiftedFields:
    """G(l)-equivariant cubics on R^8 whose restrictions to Fix(<R2^2>) are e31 and e32."""
    if ell in _LIFT_CACHE:
        return _LIFT_CACHE[ell]
    gs = build_g8_generators(ell)
    g = group if group is not None else close_group(gs)
    r2sq = np.linalg.matrix_power(gs.named["R2"].entries, 2)
    fix_h = fixed_subspace(g, [g.index_of(r2sq)])
    basis = reynolds_equivariant_basis(g, 3)
    restricted = np.array([restrict_map(p, fix_h).coefficient_matrix().ravel() for p in basis.maps])
    coeffs = np.array([p.coefficient_matrix() for p in basis.maps])
    lifts, worst = [], 0.0
    for e in g3_cubic_basis():
        target = e.coefficient_matrix().ravel()
        x, *_ = np.linalg.lstsq(restricted.T, target, rcond=None)
        worst = max(worst, float(np.abs(restricted.T @ x - target).max()))
        lifted = np.tensordot(x, coeffs, axes=1)
        lifted[np.abs(lifted) < 1e-13] = 0.0
        lifts.append(PolyMap.from_coefficients(lifted, 8, 3))
    if worst > 1e-9:
        raise ConsistencyFault(f"cubic equivariants on Fix(H) do not lift (residual {worst:.3e})")
    out = LiftedFields(g, fix_h, tangent_field(lifts[0]), tangent_field(lifts[1]), worst)
    _LIFT_CACHE[ell] = out
    return out


def lift_branches_g8(ell: int, a: float, *, group: FiniteMatrixGroup | None = None) -> list[BranchReport]:
    """Branch reports on the three planes Fix(H_i) inside Fix(<R2^2>) in R^8.

    Each zero also records the order of its stabilizer in G(l) and that stabilizer's
    fixed-space dimension.
    """
    lf = lifted_fields(ell, group)
    family = PhaseFieldFamily(float(a), lf.t1, lf.t2)
    reports = []
    for label, w in g3_isotropy_spaces().items():
        plane = Subspace.from_rows(w.basis @ lf.fix_h.basis, 8)
        rep = find_branches(plane, family=family, label=f"{label} in Fix(R2^2)")
        zeros = []
        for z in rep.zeros:
            stab = pointwise_stabilizer(lf.group, z.point)
            fdim = fixed_subspace(lf.group, stab).dim
            zeros.append(Zero(z.angle, z.point, z.derivative, z.regular, len(stab), fdim))
        reports.append(BranchReport(rep.label, rep.a, tuple(zeros), rep.degenerate, rep.max_abs_f))
    return reports


def sweep(a0: float, a1: float, steps: int) -> list[tuple[float, str, int, bool]]:
    """(a, fixed space, zero count, degenerate) on an even grid of a values, endpoints included."""
    if steps < 1:
        raise ParameterError("sweep needs at least one step")
    rows = []
    for a in np.linspace(a0, a1, steps + 1):
        for rep in g3_branches(float(a)):
            rows.append((float(a), rep.label, len(rep.zeros), rep.degenerate))
    return rows
