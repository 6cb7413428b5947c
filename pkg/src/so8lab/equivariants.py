"""Homogeneous polynomial maps and the spaces of equivariant ones.

Monomials of a fixed degree are ordered lexicographically by exponent vector, largest
first (so ``x1^d`` comes first).  A ``PolyMap`` stores one ``{exponents: coefficient}``
dict per output component; scalar polynomials are PolyMaps with a single component.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import ParameterError, ToleranceFault
from .matgroup import FiniteMatrixGroup
from .repanalysis import Subspace, fixed_subspace, numerical_rank, weyl_action

__all__ = [
    "D_MAX",
    "EPS_EQ",
    "REYNOLDS_BUDGET",
    "PolyMap",
    "EquivariantBasis",
    "GradientCheck",
    "RestrictionReport",
    "monomials",
    "substitution_matrix",
    "equivariant_dimension",
    "dimension_table",
    "reynolds_projector",
    "reynolds_equivariant_basis",
    "g3_invariants",
    "g3_cubic_basis",
    "radial_cubic",
    "gradient_check",
    "restriction_rank",
]

D_MAX = 6
EPS_EQ = 1e-8
# n ** (d + 1) must not exceed this; allows n=4 up to d=6 and n=8 up to d=3
REYNOLDS_BUDGET = 4**7

Exponent = tuple[int, ...]


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[Exponent, ...]:
    exps = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        exps.append(tuple(e))
    return tuple(sorted(exps, reverse=True))


@lru_cache(maxsize=None)
def _monomial_index(n: int, d: int) -> dict[Exponent, int]:
    return {e: i for i, e in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def _aggregation(n: int, d: int) -> np.ndarray:
    """(n**d, M) 0/1 matrix sending an index tuple to the monomial it multiplies out to."""
    index = _monomial_index(n, d)
    agg = np.zeros((n**d, len(index)))
    for flat, tup in enumerate(itertools.product(range(n), repeat=d)):
        e = [0] * n
        for i in tup:
            e[i] += 1
        agg[flat, index[tuple(e)]] = 1.0
    agg.setflags(write=False)
    return agg


@lru_cache(maxsize=None)
def _index_tuples(n: int, d: int) -> np.ndarray:
    rows = []
    for e in monomials(n, d):
        rows.append([i for i in range(n) for _ in range(e[i])])
    return np.array(rows, dtype=np.int64).reshape(len(rows), d)


def substitution_matrix(lin: np.ndarray, d: int) -> np.ndarray:
    """Row m holds the coefficients of ``(L x)^m`` in the degree-d monomials of x.

    ``L`` is ``n_out x n_in``; rows are indexed by monomials in n_out variables and
    columns by monomials in n_in variables.
    """
    lin = np.asarray(lin, dtype=float)
    n_out, n_in = lin.shape
    if d == 0:
        return np.ones((1, 1))
    idx = _index_tuples(n_out, d)
    rows = lin[idx[:, 0]]
    for t in range(1, d):
        rows = (rows[:, :, None] * lin[idx[:, t]][:, None, :]).reshape(len(idx), -1)
    return rows @ _aggregation(n_in, d)


# --------------------------------------------------------------------------
# polynomial maps
# --------------------------------------------------------------------------


def _clean(poly: dict) -> dict:
    return {e: c for e, c in poly.items() if c != 0.0}


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0.0) + c1 * c2
    return _clean(out)


def _poly_add(p: dict, q: dict, scale: float = 1.0) -> dict:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0.0) + scale * c
    return _clean(out)


@dataclass(frozen=True)
class PolyMap:
    """A homogeneous polynomial map R^n -> R^len(components)."""

    n: int
    degree: int
    components: tuple[dict, ...]

    def __post_init__(self):
        comps = tuple(_clean({tuple(int(x) for x in e): float(c) for e, c in comp.items()}) for comp in self.components)
        for comp in comps:
            for e in comp:
                if len(e) != self.n or sum(e) != self.degree or min(e) < 0:
                    raise ParameterError(f"monomial {e} is not of degree {self.degree} in {self.n} variables")
        object.__setattr__(self, "components", comps)

    # construction -----------------------------------------------------

    @classmethod
    def variable(cls, n: int, i: int) -> PolyMap:
        e = [0] * n
        e[i] = 1
        return cls(n, 1, ({tuple(e): 1.0},))

    @classmethod
    def identity(cls, n: int) -> PolyMap:
        return cls(n, 1, tuple(cls.variable(n, i).components[0] for i in range(n)))

    @classmethod
    def from_coefficients(cls, coeffs: np.ndarray, n: int, d: int) -> PolyMap:
        """Inverse of ``coefficient_matrix``: rows are components, columns monomials."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        mons = monomials(n, d)
        if coeffs.shape[1] != len(mons):
            raise ParameterError(f"expected {len(mons)} coefficient columns, got {coeffs.shape[1]}")
        return cls(n, d, tuple({m: c for m, c in zip(mons, row) if c != 0.0} for row in coeffs))

    # algebra ------------------------------------------------------------

    @property
    def is_scalar(self) -> bool:
        return len(self.components) == 1

    def _same_shape(self, other: PolyMap) -> None:
        if (self.n, self.degree, len(self.components)) != (other.n, other.degree, len(other.components)):
            raise ParameterError("polynomial maps of different shape")

    def __add__(self, other: PolyMap) -> PolyMap:
        self._same_shape(other)
        return PolyMap(self.n, self.degree, tuple(_poly_add(p, q) for p, q in zip(self.components, other.components)))

    def __sub__(self, other: PolyMap) -> PolyMap:
        self._same_shape(other)
        return PolyMap(self.n, self.degree, tuple(_poly_add(p, q, -1.0) for p, q in zip(self.components, other.components)))

    def __mul__(self, s: float) -> PolyMap:
        return PolyMap(self.n, self.degree, tuple({e: s * c for e, c in p.items()} for p in self.components))

    __rmul__ = __mul__

    def times(self, scalar: PolyMap) -> PolyMap:
        """Multiply every component by a scalar polynomial."""
        if not scalar.is_scalar or scalar.n != self.n:
            raise ParameterError("times() needs a scalar polynomial in the same variables")
        q = scalar.components[0]
        return PolyMap(self.n, self.degree + scalar.degree, tuple(_poly_mul(p, q) for p in self.components))

    def dot(self, other: PolyMap) -> PolyMap:
        """Scalar polynomial sum_i p_i q_i."""
        if len(self.components) != len(other.components) or self.n != other.n:
            raise ParameterError("dot() needs maps with the same number of components")
        acc: dict = {}
        for p, q in zip(self.components, other.components):
            acc = _poly_add(acc, _poly_mul(p, q))
        return PolyMap(self.n, self.degree + other.degree, (acc,))

    def gradient(self) -> PolyMap:
        if not self.is_scalar:
            raise ParameterError("gradient of a vector valued map")
        if self.degree == 0:
            raise ParameterError("gradient of a constant")
        comps = []
        for i in range(self.n):
            out: dict = {}
            for e, c in self.components[0].items():
                if e[i]:
                    f = list(e)
                    f[i] -= 1
                    out[tuple(f)] = out.get(tuple(f), 0.0) + c * e[i]
            comps.append(out)
        return PolyMap(self.n, self.degree - 1, tuple(comps))

    # numeric views ----------------------------------------------------

    @cached_property
    def _coefficients(self) -> np.ndarray:
        index = _monomial_index(self.n, self.degree)
        out = np.zeros((len(self.components), len(index)))
        for r, comp in enumerate(self.components):
            for e, c in comp.items():
                out[r, index[e]] = c
        out.setflags(write=False)
        return out

    @cached_property
    def _support(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponents of the monomials that occur, and the matching coefficient columns."""
        cols = np.nonzero(np.any(self._coefficients != 0.0, axis=0))[0]
        exps = np.array(monomials(self.n, self.degree), dtype=np.int64).reshape(-1, self.n)[cols]
        return exps, self._coefficients[:, cols]

    def coefficient_matrix(self) -> np.ndarray:
        return self._coefficients.copy()

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        single = v.ndim == 1
        pts = np.atleast_2d(v)
        exps, coeffs = self._support
        powers = pts[:, :, None] ** np.arange(self.degree + 1)  # (B, n, d+1)
        mon = np.ones((pts.shape[0], exps.shape[0]))
        for i in range(self.n):
            mon *= powers[:, i, exps[:, i]]
        out = mon @ coeffs.T
        if self.is_scalar:
            out = out[:, 0]
        return out[0] if single else out

    def is_equivariant(self, gens: Iterable[np.ndarray], *, points: int = 50, seed: int = 0, tol: float = EPS_EQ) -> bool:
        return self.equivariance_defect(gens, points=points, seed=seed) < tol

    def equivariance_defect(self, gens: Iterable[np.ndarray], *, points: int = 50, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        vs = rng.standard_normal((points, self.n))
        vs /= np.linalg.norm(vs, axis=1, keepdims=True)
        pv = self(vs)
        worst = 0.0
        for g in gens:
            g = np.asarray(g)
            worst = max(worst, float(np.abs(self(vs @ g.T) - pv @ g.T).max()))
        return worst

    def to_json(self) -> list[dict]:
        out = []
        for r, comp in enumerate(self.components):
            for e in sorted(comp, reverse=True):
                out.append({"component": r, "monomial": list(e), "coefficient": comp[e]})
        return out


# --------------------------------------------------------------------------
# dimensions by characters
# --------------------------------------------------------------------------


def _sym_traces(mats: np.ndarray, d: int) -> np.ndarray:
    """trace(Sym^d g) for a stack of matrices, from power sums and the Newton recursion."""
    p = np.zeros((d + 1, mats.shape[0]))
    power = np.broadcast_to(np.eye(mats.shape[1]), mats.shape).copy()
    for i in range(1, d + 1):
        power = power @ mats
        p[i] = np.trace(power, axis1=1, axis2=2)
    h = [np.ones(mats.shape[0])]
    for j in range(1, d + 1):
        h.append(sum(p[i] * h[j - i] for i in range(1, j + 1)) / j)
    return h[d]


def equivariant_dimension(group: FiniteMatrixGroup | np.ndarray, d: int, *, d_max: int = D_MAX) -> int:
    """dim of the space of degree-d equivariant maps: average of trace(g) trace(Sym^d g)."""
    if d < 0 or d > d_max:
        raise ParameterError(f"degree {d} outside 0..{d_max}")
    mats = group.matrices if isinstance(group, FiniteMatrixGroup) else np.asarray(group, dtype=float)
    chi = np.trace(mats, axis1=1, axis2=2)
    value = float(np.sum(chi * _sym_traces(mats, d)) / mats.shape[0])
    rounded = round(value)
    if abs(value - rounded) >= 1e-6:
        raise ToleranceFault(f"character average {value!r} is not within 1e-6 of an integer")
    return int(rounded)


def dimension_table(group: FiniteMatrixGroup, d_max: int = D_MAX) -> dict[int, int]:
    return {d: equivariant_dimension(group, d, d_max=d_max) for d in range(1, d_max + 1)}


# --------------------------------------------------------------------------
# Reynolds averaging
# --------------------------------------------------------------------------


def reynolds_projector(group: FiniteMatrixGroup | np.ndarray, d: int) -> np.ndarray:
    """Averaging operator on row-major coefficient matrices C (n x M): C -> mean g^-1 C S(g)."""
    mats = group.matrices if isinstance(group, FiniteMatrixGroup) else np.asarray(group, dtype=float)
    n = mats.shape[1]
    if n ** (d + 1) > REYNOLDS_BUDGET:
        raise ParameterError(f"Reynolds averaging for n={n}, d={d} exceeds the budget n^(d+1) <= {REYNOLDS_BUDGET}")
    m = len(monomials(n, d))
    subs = np.stack([substitution_matrix(g, d) for g in mats])
    # entry ((i, a), (j, b)) = mean over g of g[j, i] * S(g)[b, a]; g^-1 = g^T
    acc = np.tensordot(mats.reshape(len(mats), -1), subs.reshape(len(mats), -1), axes=(0, 0))
    acc = acc.reshape(n, n, m, m).transpose(1, 3, 0, 2).reshape(n * m, n * m)
    return acc / mats.shape[0]


def _rref(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    a = np.array(rows, dtype=float)
    r, c = a.shape
    pivot_row = 0
    for col in range(c):
        if pivot_row == r:
            break
        p = pivot_row + int(np.argmax(np.abs(a[pivot_row:, col])))
        if abs(a[p, col]) < tol:
            continue
        a[[pivot_row, p]] = a[[p, pivot_row]]
        a[pivot_row] /= a[pivot_row, col]
        others = np.arange(r) != pivot_row
        a[others] -= np.outer(a[others, col], a[pivot_row])
        pivot_row += 1
    a = a[:pivot_row]
    a[np.abs(a) < 1e-12] = 0.0
    return a


@dataclass(frozen=True)
class EquivariantBasis:
    degree: int
    maps: tuple[PolyMap, ...]
    group: FiniteMatrixGroup | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.maps)

    def coefficient_rows(self) -> np.ndarray:
        if not self.maps:
            return np.zeros((0, 0))
        return np.array([m.coefficient_matrix().ravel() for m in self.maps])

    def rank(self) -> int:
        return numerical_rank(self.coefficient_rows()) if self.maps else 0

    def max_equivariance_defect(self, *, points: int = 50, seed: int = 0) -> float:
        if self.group is None or not self.maps:
            return 0.0
        gens = [self.group.matrices[i] for i in (self.group.generators or range(self.group.order))]
        return max(m.equivariance_defect(gens, points=points, seed=seed) for m in self.maps)

    def to_json(self) -> list:
        return [m.to_json() for m in self.maps]


def reynolds_equivariant_basis(group: FiniteMatrixGroup, d: int) -> EquivariantBasis:
    """Basis of the equivariant maps of degree d, obtained by averaging every monomial map.

    The basis is the reduced row echelon form of the averaged coefficient vectors, so
    each map has leading coefficient +1 in the monomial order.
    """
    n = group.dim
    proj = reynolds_projector(group, d)
    rank = numerical_rank(proj)
    if rank == 0:
        return EquivariantBasis(d, (), group)
    u, _, _ = np.linalg.svd(proj)
    rows = _rref(u[:, :rank].T)
    if rows.shape[0] != rank:
        raise ToleranceFault("row reduction lost rank; coefficient vectors nearly dependent")
    m = len(monomials(n, d))
    maps = tuple(PolyMap.from_coefficients(row.reshape(n, m), n, d) for row in rows)
    return EquivariantBasis(d, maps, group)


# --------------------------------------------------------------------------
# the explicit cubic equivariants in dimension four
# --------------------------------------------------------------------------


def g3_invariants() -> dict[str, PolyMap]:
    """The quartics I41 = rho1 rho2 / 2 and I42 = (sigma1 sigma2 + 4 tau1 tau2) / 2, expanded."""
    v = [PolyMap.variable(4, i) for i in range(4)]
    sq = [x.dot(x) for x in v]
    rho1, rho2 = sq[0] + sq[1], sq[2] + sq[3]
    sigma1, sigma2 = sq[0] - sq[1], sq[2] - sq[3]
    tau1, tau2 = v[0].dot(v[1]), v[2].dot(v[3])
    i41 = rho1.dot(rho2) * 0.5
    i42 = (sigma1.dot(sigma2) + tau1.dot(tau2) * 4.0) * 0.5
    return {"I41": i41, "I42": i42, "rho1": rho1, "rho2": rho2, "sigma1": sigma1, "sigma2": sigma2, "tau1": tau1, "tau2": tau2}


def g3_cubic_basis() -> tuple[PolyMap, PolyMap]:
    """e31 and e32 written out in monomials."""
    s = g3_invariants()
    v = [PolyMap.variable(4, i) for i in range(4)]
    rho1, rho2 = s["rho1"], s["rho2"]
    sigma1, sigma2 = s["sigma1"], s["sigma2"]
    tau1, tau2 = s["tau1"], s["tau2"]

    def stack(parts: list[PolyMap]) -> PolyMap:
        return PolyMap(4, 3, tuple(p.components[0] for p in parts))

    e31 = stack([rho2.dot(v[0]), rho2.dot(v[1]), rho1.dot(v[2]), rho1.dot(v[3])])
    e32 = stack(
        [
            sigma2.dot(v[0]) + v[1].dot(tau2) * 2.0,
            sigma2.dot(v[1]) * -1.0 + v[0].dot(tau2) * 2.0,
            sigma1.dot(v[2]) + tau1.dot(v[3]) * 2.0,
            sigma1.dot(v[3]) * -1.0 + tau1.dot(v[2]) * 2.0,
        ]
    )
    return e31, e32


def radial_cubic(n: int = 4) -> PolyMap:
    """|v|^2 v."""
    ident = PolyMap.identity(n)
    return ident.times(ident.dot(ident))


@dataclass(frozen=True)
class GradientCheck:
    proportional: bool
    scale: float | None
    symbolic_residual: float
    numeric_residual: float

    def __bool__(self) -> bool:
        return self.proportional


def gradient_check(
    invariant: PolyMap, candidate: PolyMap, *, step: float = 1e-5, tol: float = 1e-6, points: int = 20, seed: int = 0
) -> GradientCheck:
    """Is ``candidate`` a scalar multiple of the gradient of ``invariant``?

    Decided symbolically on coefficient matrices and confirmed with central finite
    differences at random points.
    """
    if not invariant.is_scalar or invariant.degree != candidate.degree + 1 or invariant.n != candidate.n:
        raise ParameterError("invariant degree must be candidate degree + 1 in the same variables")
    grad = invariant.gradient().coefficient_matrix().ravel()
    cand = candidate.coefficient_matrix().ravel()
    cn = float(cand @ cand)
    if cn == 0.0:
        return GradientCheck(bool(np.all(grad == 0)), None, float(np.abs(grad).max()), 0.0)
    lam = float(grad @ cand) / cn
    sym_res = float(np.abs(grad - lam * cand).max())
    symbolic_ok = sym_res < 1e-12 * max(1.0, float(np.abs(grad).max())) and lam != 0.0

    rng = np.random.default_rng(seed)
    vs = rng.standard_normal((points, invariant.n))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    fd = np.empty_like(vs)
    for i in range(invariant.n):
        e = np.zeros(invariant.n)
        e[i] = step
        fd[:, i] = (invariant(vs + e) - invariant(vs - e)) / (2 * step)
    num_res = float(np.abs(fd - lam * candidate(vs)).max())
    ok = symbolic_ok and num_res < tol
    return GradientCheck(ok, lam if ok else None, sym_res, num_res)


# --------------------------------------------------------------------------
# restriction to fixed-point spaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RestrictionReport:
    domain_dim: int
    image_rank: int
    target_dim: int
    fixed_dim: int

    @property
    def surjective(self) -> bool:
        return self.image_rank == self.target_dim

    def as_tuple(self) -> tuple[int, int]:
        return (self.domain_dim, self.image_rank)


def restrict_map(p: PolyMap, fix: Subspace) -> PolyMap:
    """The map x -> B p(B^T x) on coordinates of the subspace with basis rows B."""
    b = fix.basis
    s = substitution_matrix(b.T, p.degree)
    coeffs = b @ p.coefficient_matrix() @ s
    return PolyMap.from_coefficients(coeffs, fix.dim, p.degree)


def restriction_rank(group: FiniteMatrixGroup, k: Iterable[int], d: int) -> RestrictionReport:
    """Rank of restricting G-equivariant degree-d maps to Fix(K), against the target dimension
    of maps equivariant for the Weyl group of K acting on Fix(K)."""
    k_idx = sorted(set(int(i) for i in k))
    fix = fixed_subspace(group, k_idx)
    if fix.dim == 0:
        raise ParameterError("Fix(K) = {0}; nothing to restrict to")
    try:
        weyl = weyl_action(group, k_idx)
    except ParameterError as exc:
        raise ParameterError(f"Weyl action unavailable: {exc}") from exc
    basis = reynolds_equivariant_basis(group, d)
    if basis.maps:
        rows = np.array([restrict_map(p, fix).coefficient_matrix().ravel() for p in basis.maps])
        image = numerical_rank(rows)
    else:
        image = 0
    return RestrictionReport(
        domain_dim=len(basis),
        image_rank=image,
        target_dim=equivariant_dimension(weyl, d),
        fixed_dim=fix.dim,
    )
