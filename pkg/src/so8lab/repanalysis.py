"""Irreducibility, isotropy, normalizers and Weyl groups of finite orthogonal groups."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, ConsistencyFault, ParameterError, ToleranceFault
from .matgroup import (
    EPS_ORTH,
    FiniteMatrixGroup,
    QuaternionPair,
    QUAT_1,
    QUAT_J,
    QUAT_I,
    build_g3_generators,
    build_g8_generators,
    close_group,
    quaternion_pair_to_matrix,
)

__all__ = [
    "EPS_RANK",
    "RANK_GAP",
    "Subspace",
    "IsotropyType",
    "IsomorphismResult",
    "OmegaCheck",
    "OmegaReport",
    "NormalizerReport",
    "numerical_rank",
    "nullspace",
    "fixed_subspace",
    "pointwise_stabilizer",
    "commutant_dimension",
    "canonical_conjugate",
    "isotropy_types",
    "sampled_isotropy_types",
    "normalizer",
    "weyl_action",
    "find_isomorphism",
    "verify_weyl_is_g3",
    "omega_exponents",
    "verify_omega_formulas",
    "normalizer_report",
]

EPS_RANK = 1e-7
RANK_GAP = 1e3
# deviations in [EPS_RANK / RANK_GAP, EPS_RANK * RANK_GAP) are treated as undecidable
_AMBIGUOUS_LOW = EPS_RANK / RANK_GAP
_AMBIGUOUS_HIGH = EPS_RANK * RANK_GAP


# --------------------------------------------------------------------------
# rank and subspaces
# --------------------------------------------------------------------------


def _split_singular_values(s: np.ndarray) -> tuple[int, float]:
    """Number of singular values above EPS_RANK and the ratio across the cut."""
    keep = s > EPS_RANK
    rank = int(keep.sum())
    if rank == 0 or rank == s.size:
        gap = math.inf
        if rank and s[keep].min() < _AMBIGUOUS_HIGH:
            gap = float(s[keep].min() / EPS_RANK)
    else:
        lo = float(s[~keep].max())
        gap = math.inf if lo == 0.0 else float(s[keep].min() / lo)
    if gap < RANK_GAP:
        raise ToleranceFault(
            f"singular value gap {gap:.3e} below {RANK_GAP:g} at threshold {EPS_RANK:g}: {np.array2string(s, precision=3)}"
        )
    return rank, gap


def numerical_rank(m: np.ndarray, *, with_gap: bool = False):
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return (0, math.inf) if with_gap else 0
    s = np.linalg.svd(m, compute_uv=False)
    rank, gap = _split_singular_values(s)
    return (rank, gap) if with_gap else rank


def nullspace(m: np.ndarray) -> np.ndarray:
    """Rows form an orthonormal basis of ker(m)."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(m)
    padded = np.zeros(n)
    padded[: s.size] = s
    rank, _ = _split_singular_values(padded)
    return vt[rank:].copy()


def _gram_schmidt_columns(p: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal rows obtained from the columns of a projector, taken in order."""
    rows: list[np.ndarray] = []
    for col in p.T:
        v = col.copy()
        for b in rows:
            v -= (b @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            rows.append(v / nv)
            if len(rows) == dim:
                break
    if len(rows) != dim:
        raise ConsistencyFault("could not extract a basis from the projector columns")
    basis = np.array(rows)
    basis[np.abs(basis) < 1e-15] = 0.0
    return basis


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of R^n stored by an orthonormal basis (rows of ``basis``).

    The basis is canonical: Gram-Schmidt applied to the columns of the orthogonal
    projector, so equal subspaces get equal bases regardless of how they were computed.
    """

    ambient: int
    basis: np.ndarray = field(repr=False)

    @classmethod
    def from_rows(cls, rows: np.ndarray, ambient: int) -> Subspace:
        rows = np.asarray(rows, dtype=float).reshape(-1, ambient)
        if rows.shape[0] == 0:
            return cls(ambient, np.zeros((0, ambient)))
        q, _ = np.linalg.qr(rows.T)
        dim = numerical_rank(rows)
        q = q[:, :dim]
        basis = _gram_schmidt_columns(q @ q.T, dim)
        basis.setflags(write=False)
        return cls(ambient, basis)

    @classmethod
    def kernel(cls, m: np.ndarray) -> Subspace:
        m = np.atleast_2d(np.asarray(m, dtype=float))
        ns = nullspace(m)
        if ns.shape[0] == 0:
            return cls(m.shape[1], np.zeros((0, m.shape[1])))
        basis = _gram_schmidt_columns(ns.T @ ns, ns.shape[0])
        basis.setflags(write=False)
        return cls(m.shape[1], basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.projector @ np.asarray(v, dtype=float)

    def coordinates(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ np.asarray(v, dtype=float)

    def embed(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.basis

    def contains(self, v: np.ndarray, tol: float = EPS_ORTH) -> bool:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.project(v))) < tol * max(1.0, float(np.linalg.norm(v)))

    def orthonormality_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.abs(self.basis @ self.basis.T - np.eye(self.dim)).max())

    def same_as(self, other: Subspace, tol: float = 1e-8) -> bool:
        return self.dim == other.dim and float(np.abs(self.projector - other.projector).max()) < tol


def _as_index_list(group: FiniteMatrixGroup, s: Iterable) -> list[int]:
    out = []
    for x in s:
        out.append(group.index_of(x) if not isinstance(x, (int, np.integer)) else int(x))
    return out


def fixed_subspace(group: FiniteMatrixGroup, s: Iterable) -> Subspace:
    """Common fixed vectors of the listed elements (indices or matrices)."""
    idx = _as_index_list(group, s)
    if not idx:
        raise ParameterError("fixed_subspace needs a nonempty element set")
    n = group.dim
    stacked = (group.matrices[idx] - np.eye(n)).reshape(-1, n)
    return Subspace.kernel(stacked)


def _classify_deviation(dev: np.ndarray) -> np.ndarray:
    """True where dev is clearly zero; raise if any deviation is in the ambiguous band."""
    bad = (dev >= _AMBIGUOUS_LOW) & (dev < _AMBIGUOUS_HIGH)
    if bad.any():
        raise ToleranceFault(f"stabilizer decision ambiguous: deviation {float(dev[bad].min()):.3e}")
    return dev < _AMBIGUOUS_LOW


def pointwise_stabilizer(group: FiniteMatrixGroup, w: Subspace | np.ndarray) -> tuple[int, ...]:
    """Indices of all elements fixing every vector of ``w`` (a Subspace or a single vector)."""
    if isinstance(w, Subspace):
        if w.dim == 0:
            return tuple(range(group.order))
        cols = w.basis.T
    else:
        v = np.asarray(w, dtype=float)
        cols = (v / np.linalg.norm(v)).reshape(-1, 1)
    dev = np.abs(np.einsum("gij,jb->gib", group.matrices, cols) - cols).max(axis=(1, 2))
    return tuple(int(i) for i in np.nonzero(_classify_deviation(dev))[0])


def commutant_dimension(group: FiniteMatrixGroup, *, with_gap: bool = False):
    """Dimension of the algebra of matrices commuting with the group."""
    n = group.dim
    gens = group.generators or tuple(range(group.order))
    eye = np.eye(n)
    rows = [np.kron(eye, group.matrices[i].T) - np.kron(group.matrices[i], eye) for i in gens]
    rank, gap = numerical_rank(np.vstack(rows), with_gap=True)
    dim = n * n - rank
    return (dim, gap) if with_gap else dim


# --------------------------------------------------------------------------
# isotropy types
# --------------------------------------------------------------------------


def canonical_conjugate(group: FiniteMatrixGroup, s: Iterable[int]) -> tuple[int, ...]:
    """Lexicographically least sorted index tuple among all conjugates of ``s``."""
    s_arr = np.asarray(sorted(set(int(i) for i in s)), dtype=np.int64)
    t, inv = group.table, group.inverses
    # row c holds the sorted indices of c x c^-1, x in s
    conjugates = np.sort(t[t[:, s_arr], inv[:, None]], axis=1)
    best = min(map(tuple, conjugates.tolist()))
    return tuple(int(i) for i in best)


def _conjugacy_count(group: FiniteMatrixGroup, s: Sequence[int]) -> int:
    s_arr = np.asarray(s, dtype=np.int64)
    t, inv = group.table, group.inverses
    conjugates = np.sort(t[t[:, s_arr], inv[:, None]], axis=1)
    return len({row.tobytes() for row in conjugates})


@dataclass(frozen=True)
class IsotropyType:
    representative: tuple[int, ...]
    fixed_dim: int
    conjugates: int
    witness: np.ndarray = field(repr=False, compare=False)
    fixed_space: Subspace = field(repr=False, compare=False)

    @property
    def subgroup_order(self) -> int:
        return len(self.representative)

    def to_dict(self) -> dict:
        return {
            "fixedDim": self.fixed_dim,
            "subgroupOrder": self.subgroup_order,
            "conjugates": self.conjugates,
            "witness": [float(x) for x in self.witness],
        }


def _generic_point(w: Subspace, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(w.dim) @ w.basis
    return v / np.linalg.norm(v)


def _witness(group: FiniteMatrixGroup, stab: tuple[int, ...], w: Subspace, rng, tries: int = 20) -> np.ndarray:
    for _ in range(tries):
        v = _generic_point(w, rng)
        try:
            if pointwise_stabilizer(group, v) == stab:
                return v
        except ToleranceFault:
            continue
    raise ConsistencyFault(f"no witness point found with stabilizer of order {len(stab)}")


def isotropy_types(
    group: FiniteMatrixGroup, *, seed: int = 0, include_trivial: bool = False
) -> list[IsotropyType]:
    """Isotropy types up to conjugacy, found through the lattice of fixed-point subspaces.

    Lattice members are intersections of the fixed spaces Fix(g).  Each member W is
    represented by its pointwise stabilizer K = Stab(W), which is exactly the isotropy
    subgroup of a generic point of W.  Only one member per conjugacy class is expanded,
    which suffices because intersecting a conjugate with Fix(g) is conjugate to an
    intersection with Fix of a conjugate of g.

    By default the types with Fix = {0} and Fix = R^n are left out.
    """
    if group.dim > 8:
        raise ParameterError("isotropy_types supports ambient dimension up to 8")
    n = group.dim
    rng = np.random.default_rng(seed)

    # distinct atoms Fix(g), keyed by their stabilizer
    atoms: dict[tuple[int, ...], Subspace] = {}
    for g in range(group.order):
        w = fixed_subspace(group, [g])
        if w.dim == n:
            continue
        stab = pointwise_stabilizer(group, w)
        atoms.setdefault(stab, w)

    full = Subspace(n, np.eye(n))
    top = pointwise_stabilizer(group, full)
    found: dict[tuple[int, ...], tuple[tuple[int, ...], Subspace]] = {}
    canon_cache: dict[tuple[int, ...], tuple[int, ...]] = {}

    def canon(stab):
        c = canon_cache.get(stab)
        if c is None:
            c = canonical_conjugate(group, stab)
            canon_cache[stab] = c
        return c

    found[canon(top)] = (top, full)
    queue = [(top, full)]
    while queue:
        stab_w, w = queue.pop()
        if w.dim == 0:
            continue
        stab_set = set(stab_w)
        for atom_stab, atom in atoms.items():
            if set(atom_stab) <= stab_set:
                continue  # W already inside Fix(atom)
            # W cap Fix(atom): solve in W-coordinates
            coeff = Subspace.kernel(atom.basis.T @ atom.basis @ w.basis.T - w.basis.T) if atom.dim else None
            if coeff is None or coeff.dim == 0:
                meet = Subspace(n, np.zeros((0, n)))
            else:
                meet = Subspace.from_rows(coeff.basis @ w.basis, n)
            stab = pointwise_stabilizer(group, meet)
            key = canon(stab)
            if key not in found:
                found[key] = (stab, meet)
                queue.append((stab, meet))

    types = []
    for key in sorted(found, key=lambda c: (len(c), c)):
        stab, w = found[key]
        if not include_trivial and (w.dim == 0 or w.dim == n):
            continue
        rep = key
        if rep != stab:
            w = fixed_subspace(group, rep)
        witness = _witness(group, rep, w, rng) if w.dim else np.zeros(n)
        if pointwise_stabilizer(group, w) != rep:
            raise ConsistencyFault("lattice member is not closed under Fix/Stab")
        types.append(
            IsotropyType(
                representative=rep,
                fixed_dim=w.dim,
                conjugates=_conjugacy_count(group, rep),
                witness=witness,
                fixed_space=w,
            )
        )
    return types


def sampled_isotropy_types(
    group: FiniteMatrixGroup,
    *,
    samples: int = 100_000,
    seed: int = 0,
    max_subset: int = 4,
    batch: int = 4096,
) -> dict[tuple[int, ...], int]:
    """Brute-force oracle: stabilizers of random points, keyed by canonical conjugate.

    Points are drawn from Fix(S) for random element subsets S of size 0..max_subset
    (size 0 means a uniformly random direction).  Each stabilizer is found by scanning
    every element.  Returns canonical representative -> fixed-space dimension.
    """
    n, order = group.dim, group.order
    rng = np.random.default_rng(seed)
    mats = group.matrices
    eye = np.eye(n)
    seen: dict[bytes, None] = {}
    drawn = 0
    while drawn < samples:
        b = min(batch, samples - drawn)
        drawn += b
        sizes = rng.integers(0, max_subset + 1, size=b)
        pts = np.empty((b, n))
        for size in range(max_subset + 1):
            sel = np.nonzero(sizes == size)[0]
            if sel.size == 0:
                continue
            if size == 0:
                pts[sel] = rng.standard_normal((sel.size, n))
                continue
            picks = rng.integers(0, order, size=(sel.size, size))
            stacks = (mats[picks] - eye).reshape(sel.size, size * n, n)
            if size * n < n:
                stacks = np.concatenate([stacks, np.zeros((sel.size, n - size * n, n))], axis=1)
            _, s, vt = np.linalg.svd(stacks)
            null = s < EPS_RANK  # (sel, n) flags, sorted descending so the kernel is a suffix
            coeffs = rng.standard_normal((sel.size, n)) * null
            pts[sel] = np.einsum("bi,bij->bj", coeffs, vt)
        norms = np.linalg.norm(pts, axis=1)
        pts = pts[norms > 0.5 * EPS_RANK] / norms[norms > 0.5 * EPS_RANK, None]
        dev = np.abs(np.einsum("gij,bj->bgi", mats, pts) - pts[:, None, :]).max(axis=2)
        ambiguous = ((dev >= _AMBIGUOUS_LOW) & (dev < _AMBIGUOUS_HIGH)).any(axis=1)
        fixed = dev < _AMBIGUOUS_LOW
        for row in np.packbits(fixed[~ambiguous], axis=1):
            seen.setdefault(row.tobytes(), None)

    out: dict[tuple[int, ...], int] = {}
    for packed in seen:
        bits = np.unpackbits(np.frombuffer(packed, dtype=np.uint8))[:order].astype(bool)
        stab = tuple(int(i) for i in np.nonzero(bits)[0])
        if not group.is_subgroup(stab):
            raise ConsistencyFault("a sampled stabilizer is not closed under multiplication")
        key = canonical_conjugate(group, stab)
        if key not in out:
            out[key] = fixed_subspace(group, key).dim
    return dict(sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0])))


# --------------------------------------------------------------------------
# normalizers and Weyl groups
# --------------------------------------------------------------------------


def normalizer(group: FiniteMatrixGroup, h: Iterable[int]) -> tuple[int, ...]:
    h_idx = sorted(set(int(i) for i in h))
    if not group.is_subgroup(h_idx):
        raise ParameterError("H is not a subgroup (not closed under multiplication or missing identity)")
    h_arr = np.asarray(h_idx, dtype=np.int64)
    t, inv = group.table, group.inverses
    conjugates = np.sort(t[t[:, h_arr], inv[:, None]], axis=1)
    keep = (conjugates == h_arr).all(axis=1)
    return tuple(int(i) for i in np.nonzero(keep)[0])


def weyl_action(group: FiniteMatrixGroup, h: Iterable[int]) -> FiniteMatrixGroup:
    """The normalizer of H acting on Fix(H), in the canonical basis of Fix(H)."""
    h_idx = sorted(set(int(i) for i in h))
    fix = fixed_subspace(group, h_idx)
    if fix.dim == 0:
        raise ParameterError("Fix(H) = {0}; there is no Weyl action to restrict to")
    b = fix.basis
    mats = []
    for g in normalizer(group, h_idx):
        image = group.matrices[g] @ b.T
        r = b @ image
        if float(np.abs(image - b.T @ r).max()) > 1e-8:
            raise ConsistencyFault(f"normalizer element {g} does not preserve Fix(H)")
        mats.append(r)
    w = FiniteMatrixGroup.from_matrices(mats, family="weyl", params={"parent": group.family, **group.params})
    w.fixed_space = fix  # type: ignore[attr-defined]
    return w


@dataclass(frozen=True)
class IsomorphismResult:
    status: str  # "isomorphic" | "not isomorphic" | "undecided"
    mapping: dict | None = None
    reason: str = ""
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.status == "isomorphic"


def find_isomorphism(source: FiniteMatrixGroup, target: FiniteMatrixGroup, *, budget: int = 200_000) -> IsomorphismResult:
    """Backtracking search for an isomorphism source -> target on generator images.

    Candidate images must have matching element orders and matching orders of products
    with earlier images; each partial assignment is checked to define an injective
    homomorphism on the subgroup it generates.
    """
    if source.order != target.order:
        return IsomorphismResult("not isomorphic", reason=f"orders {source.order} != {target.order}")
    if source.order_histogram() != target.order_histogram():
        return IsomorphismResult("not isomorphic", reason="element order histograms differ")

    ts, tt = source.table, target.table
    os_, ot = source.element_orders, target.element_orders
    gens = list(source.greedy_generators())
    es, et = source.identity_index, target.identity_index
    nodes = 0

    def search(images: list[int]) -> dict[int, int] | None:
        nonlocal nodes
        if nodes > budget:
            raise BudgetExceeded
        j = len(images)
        if j == len(gens):
            phi = _partial_map(ts, tt, es, et, gens, images)
            return phi if phi is not None and len(phi) == source.order else None
        s = gens[j]
        for cand in range(target.order):
            if ot[cand] != os_[s]:
                continue
            if any(ot[tt[img, cand]] != os_[ts[g, s]] for g, img in zip(gens, images)):
                continue
            trial = images + [cand]
            nodes += 1
            if _partial_map(ts, tt, es, et, gens[: j + 1], trial) is None:
                continue
            found = search(trial)
            if found is not None:
                return found
        return None

    try:
        phi = search([])
    except BudgetExceeded:
        return IsomorphismResult("undecided", reason=f"search budget {budget} exhausted", nodes=nodes)
    if phi is None:
        return IsomorphismResult("not isomorphic", reason="no generator assignment extends", nodes=nodes)
    for x in range(source.order):
        for y in range(source.order):
            if phi[int(ts[x, y])] != int(tt[phi[x], phi[y]]):
                raise ConsistencyFault("isomorphism certificate failed verification")
    return IsomorphismResult("isomorphic", mapping=phi, nodes=nodes)


def _partial_map(ts, tt, es, et, gens, images) -> dict[int, int] | None:
    """Extend generator images to the generated subgroup; None if not an injective homomorphism."""
    phi = {es: et}
    used = {et}
    frontier = [es]
    while frontier:
        nxt = []
        for x in frontier:
            for s, img_s in zip(gens, images):
                y = int(ts[x, s])
                img = int(tt[phi[x], img_s])
                if y in phi:
                    if phi[y] != img:
                        return None
                elif img in used:
                    return None
                else:
                    phi[y] = img
                    used.add(img)
                    nxt.append(y)
        frontier = nxt
    return phi


def verify_weyl_is_g3(
    group: FiniteMatrixGroup, h: Iterable[int], tau: int, *, budget: int = 200_000
) -> IsomorphismResult:
    weyl = weyl_action(group, h)
    g3 = close_group(build_g3_generators(tau))
    return find_isomorphism(g3, weyl, budget=budget)


# --------------------------------------------------------------------------
# Omega words inside the normalizer
# --------------------------------------------------------------------------


def omega_exponents(tau: int) -> dict[str, int]:
    """Exponents q1, q2, q3 and the constant c as given by the case formulas."""
    if tau % 2 == 0:
        raise ParameterError(f"tau must be odd, got {tau}")
    q1 = 2 * tau + 2 if tau % 4 == 3 else 8 * tau - 16
    q2 = 3 * tau if tau % 4 == 3 else tau
    c = {1: 5, 3: 3, 5: 1, 7: 7}[tau % 8]
    q3 = (c * tau + 1) // 2
    return {"q1": q1, "q2": q2, "q3": q3, "c": c}


def theta_matrices(tau: int, *, conjugate_right: bool = False, e_power: int = 1) -> dict[str, np.ndarray]:
    """M1, M2, M3: the 4x4 matrices of [e_tau, i], [1, j], [j, j] with e_tau = exp(i pi e_power / tau)."""
    e = (math.cos(math.pi * e_power / tau), math.sin(math.pi * e_power / tau), 0.0, 0.0)
    pairs = {"M1": QuaternionPair(e, QUAT_I), "M2": QuaternionPair(QUAT_1, QUAT_J), "M3": QuaternionPair(QUAT_J, QUAT_J)}
    return {name: quaternion_pair_to_matrix(p, conjugate_right=conjugate_right).entries for name, p in pairs.items()}


@dataclass(frozen=True)
class OmegaCheck:
    name: str
    exponent: int
    deviation: float
    deviation_up_to_sign: float
    block_diagonal: bool
    in_normalizer: bool
    matching_exponents: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.deviation < EPS_ORTH and self.block_diagonal and self.in_normalizer


@dataclass(frozen=True)
class OmegaReport:
    ell: int
    tau: int
    k: int
    q1: int
    q2: int
    q3: int
    c: int
    conjugate_right: bool
    zeta_power: int
    e_power: int
    checks: tuple[OmegaCheck, ...]
    omega_indices: tuple[int | None, ...]
    xi_indices: tuple[int, ...]
    # odd e with the Omega_1 block equal to the matrix of [exp(i pi e / tau), i]
    omega1_e_powers: tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[OmegaCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "tau": self.tau,
            "k": self.k,
            "q": [self.q1, self.q2, self.q3],
            "c": self.c,
            "conjugate_right": self.conjugate_right,
            "zeta_power": self.zeta_power,
            "e_power": self.e_power,
            "omega1_e_powers": list(self.omega1_e_powers),
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "exponent": c.exponent,
                    "passed": c.passed,
                    "deviation": c.deviation,
                    "deviation_up_to_sign": c.deviation_up_to_sign,
                    "in_normalizer": c.in_normalizer,
                    "matching_exponents": list(c.matching_exponents),
                }
                for c in self.checks
            ],
        }


def verify_omega_formulas(
    ell: int,
    *,
    zeta_power: int = 1,
    e_power: int = 1,
    conjugate_right: bool = False,
    group: FiniteMatrixGroup | None = None,
) -> OmegaReport:
    """Evaluate Omega_1 = Xi2 Xi3^q1, Omega_2 = Xi3^q2, Omega_3 = Xi1 Xi2 Xi3^q3 and compare
    their upper-left 4x4 blocks with M1, M2, M3.

    Besides the strict comparison the report records the deviation up to the central
    element -1 and every exponent q in [0, k) for which the block equation does hold.
    """
    gs = build_g8_generators(ell, zeta_power=zeta_power)
    k, tau = gs.params["k"], gs.params["tau"]
    g = group if group is not None else close_group(gs)
    qs = omega_exponents(tau)
    R1, A = gs.named["R1"].entries, gs.named["A"].entries
    mp = np.linalg.matrix_power
    xi1, xi2, xi3 = A @ R1, mp(R1, 2), mp(A, 2)
    if e_power % 2 == 0 or math.gcd(e_power, 2 * tau) != 1:
        raise ParameterError(f"e_power={e_power} does not give a primitive {tau}-th root of -1")
    ms = theta_matrices(tau, conjugate_right=conjugate_right, e_power=e_power)

    r2sq = mp(gs.named["R2"].entries, 2)
    h = [g.identity_index, g.index_of(r2sq)]
    norm_set = set(normalizer(g, h))

    words = [
        ("Omega_1", xi2, qs["q1"], ms["M1"]),
        ("Omega_2", np.eye(8), qs["q2"], ms["M2"]),
        ("Omega_3", xi1 @ xi2, qs["q3"], ms["M3"]),
    ]
    checks, omega_idx = [], []
    for name, prefix, q, target in words:
        omega = prefix @ mp(xi3, q % k)
        block = omega[:4, :4]
        dev = float(np.abs(block - target).max())
        dev_sign = min(dev, float(np.abs(block + target).max()))
        off = max(float(np.abs(omega[:4, 4:]).max()), float(np.abs(omega[4:, :4]).max()))
        idx = g.find(omega)
        matches = tuple(
            p for p in range(k) if float(np.abs((prefix @ mp(xi3, p))[:4, :4] - target).max()) < EPS_ORTH
        )
        checks.append(
            OmegaCheck(
                name=name,
                exponent=q,
                deviation=dev,
                deviation_up_to_sign=dev_sign,
                block_diagonal=off < EPS_ORTH,
                in_normalizer=idx is not None and idx in norm_set,
                matching_exponents=matches,
            )
        )
        omega_idx.append(idx)
    block1 = (xi2 @ mp(xi3, qs["q1"] % k))[:4, :4]
    e_ok = tuple(
        e
        for e in range(1, 2 * tau, 2)
        if math.gcd(e, tau) == 1
        and float(np.abs(block1 - theta_matrices(tau, conjugate_right=conjugate_right, e_power=e)["M1"]).max()) < EPS_ORTH
    )
    return OmegaReport(
        ell=int(ell),
        tau=tau,
        k=k,
        q1=qs["q1"],
        q2=qs["q2"],
        q3=qs["q3"],
        c=qs["c"],
        conjugate_right=conjugate_right,
        zeta_power=zeta_power,
        e_power=e_power,
        checks=tuple(checks),
        omega_indices=tuple(omega_idx),
        xi_indices=tuple(g.index_of(x) for x in (xi1, xi2, xi3)),
        omega1_e_powers=e_ok,
    )


@dataclass(frozen=True)
class NormalizerReport:
    subgroup: tuple[int, ...]
    normalizer: tuple[int, ...]
    index_in_group: int
    weyl_order: int
    weyl_generators: tuple[np.ndarray, ...] = field(repr=False)
    omega: OmegaReport | None = None

    def to_dict(self) -> dict:
        out = {
            "subgroup": list(self.subgroup),
            "normalizerOrder": len(self.normalizer),
            "indexInGroup": self.index_in_group,
            "weylOrder": self.weyl_order,
            "weylGenerators": [[float(x) for x in m.ravel()] for m in self.weyl_generators],
        }
        if self.omega is not None:
            out["xi"] = list(self.omega.xi_indices)
            out["omega"] = list(self.omega.omega_indices)
            out["q"] = [self.omega.q1, self.omega.q2, self.omega.q3]
            out["c"] = self.omega.c
            out["omegaCheck"] = self.omega.to_dict()
        return out


def normalizer_report(group: FiniteMatrixGroup, h: Iterable[int], *, omega: OmegaReport | None = None) -> NormalizerReport:
    h_idx = tuple(sorted(set(int(i) for i in h)))
    norm = normalizer(group, h_idx)
    if group.order % len(norm):
        raise ConsistencyFault("normalizer order does not divide the group order")
    weyl = weyl_action(group, h_idx)
    return NormalizerReport(
        subgroup=h_idx,
        normalizer=norm,
        index_in_group=group.order // len(norm),
        weyl_order=weyl.order,
        weyl_generators=tuple(weyl.matrices[i] for i in weyl.generators),
        omega=omega,
    )
