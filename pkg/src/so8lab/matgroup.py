"""Finite orthogonal matrix groups built from quaternion pairs and block matrices.

Two families are constructed here:

* ``G3(m)`` in SO(4), generated by the quaternion pairs ``[e_m,1], [1,i], [j,1], [1,j]``
  acting by ``v -> conj(a) v b``;
* ``G(l)`` in SO(8), generated by the block matrices ``R1, R2, R3(k)`` with ``k = 4 + 8 l``.

Elements are kept in double precision and identified through a quantized key
(entries rounded to a ``2**-32`` grid).  Every closure audits that the smallest
distance between two distinct elements is far above that grid.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded, ConsistencyFault, ParameterError, ToleranceFault

__all__ = [
    "EPS_ORTH",
    "EPS_NORM",
    "KEY_GRID",
    "N_MAX",
    "QuaternionPair",
    "MatrixElement",
    "GeneratorSet",
    "FiniteMatrixGroup",
    "RelationCheck",
    "RelationReport",
    "canonical_key",
    "qmul",
    "qconj",
    "quaternion_pair_to_matrix",
    "build_g3_generators",
    "build_g8_generators",
    "close_group",
    "element_order",
    "verify_matrix_relations",
    "group_to_json",
    "group_from_json",
]

EPS_ORTH = 1e-9
EPS_NORM = 1e-12
KEY_GRID = 2.0**-32
N_MAX = 10**6

QUAT_1 = (1.0, 0.0, 0.0, 0.0)
QUAT_I = (0.0, 1.0, 0.0, 0.0)
QUAT_J = (0.0, 0.0, 1.0, 0.0)
QUAT_K = (0.0, 0.0, 0.0, 1.0)


# --------------------------------------------------------------------------
# quaternions
# --------------------------------------------------------------------------


def qmul(p, q) -> np.ndarray:
    """Hamilton product of two quaternions given as (w, x, y, z)."""
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


def qconj(p) -> np.ndarray:
    w, x, y, z = p
    return np.array([w, -x, -y, -z])


@dataclass(frozen=True)
class QuaternionPair:
    """A pair ``[a, b]`` of unit quaternions; ``[a, b]`` and ``[-a, -b]`` are the same rotation."""

    left: tuple[float, float, float, float]
    right: tuple[float, float, float, float]

    def __post_init__(self):
        for name in ("left", "right"):
            q = tuple(float(x) for x in getattr(self, name))
            if len(q) != 4:
                raise ParameterError(f"{name} quaternion needs 4 components, got {len(q)}")
            norm = math.sqrt(sum(x * x for x in q))
            if abs(norm - 1.0) > EPS_NORM:
                raise ParameterError(
                    f"{name} quaternion {q} is not a unit quaternion: |q| = {norm:.17g}, "
                    f"deviation {abs(norm - 1.0):.3e} > {EPS_NORM:g}"
                )
            object.__setattr__(self, name, q)

    def normalized(self) -> QuaternionPair:
        """Representative with the first nonzero entry of ``left`` positive."""
        for x in self.left:
            if abs(x) > EPS_NORM:
                if x < 0:
                    return QuaternionPair(tuple(-y for y in self.left), tuple(-y for y in self.right))
                return self
        return self  # unreachable for unit quaternions


def quaternion_pair_to_matrix(p: QuaternionPair, *, conjugate_right: bool = False) -> MatrixElement:
    """4x4 matrix of ``v -> conj(a) v b`` in the basis (1, i, j, k).

    ``conjugate_right=True`` uses ``v -> conj(a) v conj(b)`` instead; that convention is
    only needed to compare against formulas written with it.
    """
    a = np.asarray(p.left)
    b = qconj(p.right) if conjugate_right else np.asarray(p.right)
    abar = qconj(a)
    basis = np.eye(4)
    cols = [qmul(qmul(abar, basis[t]), b) for t in range(4)]
    return MatrixElement(np.column_stack(cols))


# --------------------------------------------------------------------------
# matrix elements
# --------------------------------------------------------------------------


def canonical_key(m: np.ndarray) -> bytes:
    return np.rint(np.asarray(m, dtype=float) / KEY_GRID).astype(np.int64).tobytes()


def _keys_of_stack(stack: np.ndarray) -> list[bytes]:
    q = np.rint(stack.reshape(stack.shape[0], -1) / KEY_GRID).astype(np.int64)
    return [row.tobytes() for row in q]


def _orthogonality_defect(a: np.ndarray) -> tuple[float, float]:
    n = a.shape[0]
    return float(np.abs(a.T @ a - np.eye(n)).max()), float(abs(np.linalg.det(a) - 1.0))


class MatrixElement:
    """An element of SO(n) with a canonical quantized key used for hashing and equality."""

    __slots__ = ("entries", "key")

    def __init__(self, entries, *, check: bool = True):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"expected a square matrix, got shape {a.shape}")
        if check:
            orth, det = _orthogonality_defect(a)
            if orth >= EPS_ORTH or det >= EPS_ORTH:
                raise ParameterError(
                    f"matrix is not in SO({a.shape[0]}): |g^T g - I| = {orth:.3e}, |det - 1| = {det:.3e}"
                )
        a.setflags(write=False)
        self.entries = a
        self.key = canonical_key(a)

    @classmethod
    def _trusted(cls, entries: np.ndarray, key: bytes) -> MatrixElement:
        obj = cls.__new__(cls)
        entries = np.array(entries, dtype=float)
        entries.setflags(write=False)
        obj.entries = entries
        obj.key = key
        return obj

    @classmethod
    def identity(cls, n: int) -> MatrixElement:
        return cls(np.eye(n))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def inverse(self) -> MatrixElement:
        return MatrixElement(self.entries.T, check=False)

    def __matmul__(self, other: MatrixElement) -> MatrixElement:
        return MatrixElement(self.entries @ other.entries, check=False)

    def __neg__(self) -> MatrixElement:
        return MatrixElement(-self.entries, check=False)

    def __pow__(self, n: int) -> MatrixElement:
        base = self.entries if n >= 0 else self.entries.T
        return MatrixElement(np.linalg.matrix_power(base, abs(n)), check=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixElement) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def distance(self, other: MatrixElement) -> float:
        return float(np.abs(self.entries - other.entries).max())

    def is_identity(self, tol: float = EPS_ORTH) -> bool:
        return float(np.abs(self.entries - np.eye(self.dim)).max()) < tol

    def __repr__(self) -> str:
        return f"MatrixElement(dim={self.dim}, key={self.key[:8].hex()}...)"


# --------------------------------------------------------------------------
# generator sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSet:
    dim: int
    generators: tuple[MatrixElement, ...]
    family: str = "custom"
    params: dict = field(default_factory=dict)
    named: dict = field(default_factory=dict)

    def __post_init__(self):
        for g in self.generators:
            if g.dim != self.dim:
                raise ParameterError(f"generator of dim {g.dim} in a GeneratorSet of dim {self.dim}")


def _unit_complex(angle: float) -> tuple[float, float, float, float]:
    return (math.cos(angle), math.sin(angle), 0.0, 0.0)


def build_g3_generators(m: int, *, e_power: int = 1) -> GeneratorSet:
    """Generators ``[e_m,1], [1,i], [j,1], [1,j]`` of G3(m) with ``e_m = exp(i pi e_power / m)``."""
    if not isinstance(m, (int, np.integer)) or m < 3 or m % 2 == 0:
        raise ParameterError(f"G3(m) needs an odd integer m >= 3, got {m!r}")
    if e_power % 2 == 0 or math.gcd(e_power, 2 * m) != 1:
        raise ParameterError(f"e_power={e_power} does not give a primitive {m}-th root of -1")
    m = int(m)
    pairs = {
        "[e_m,1]": QuaternionPair(_unit_complex(math.pi * e_power / m), QUAT_1),
        "[1,i]": QuaternionPair(QUAT_1, QUAT_I),
        "[j,1]": QuaternionPair(QUAT_J, QUAT_1),
        "[1,j]": QuaternionPair(QUAT_1, QUAT_J),
    }
    named = {name: quaternion_pair_to_matrix(p) for name, p in pairs.items()}
    return GeneratorSet(
        dim=4,
        generators=tuple(named.values()),
        family="G3",
        params={"m": m, "e_power": e_power},
        named=named,
    )


def g8_matrices(k: int, zeta_power: int = 1) -> dict[str, np.ndarray]:
    """The 8x8 matrices R1, R2, R3(k) assembled from 2x2 and 4x4 blocks, plus A = R1 R2 R3."""
    zeta = np.exp(2j * np.pi * zeta_power / k)
    zeta8 = np.exp(2j * np.pi / 8)
    d1 = ((zeta + zeta ** (k - 1)) / 2).real
    d2 = ((zeta - zeta ** (k - 1)) / 2j).real
    f = ((zeta8 - zeta8**3) / 2).real

    z2 = np.zeros((2, 2))
    F1 = np.array([[-f, -f], [-f, f]])
    F2 = np.array([[-f, f], [f, f]])
    D = np.array([[-d2, -d1], [d1, -d2]])
    T1 = np.array([[-1.0, 0.0], [0.0, 1.0]])
    T2 = np.array([[1.0, 0.0], [0.0, -1.0]])
    S1 = np.array([[0.0, -1.0], [-1.0, 0.0]])
    S2 = np.array([[0.0, 1.0], [1.0, 0.0]])

    z4 = np.zeros((4, 4))
    FF = np.block([[z2, F1], [F2, z2]])
    SS = np.block([[S1, z2], [z2, S2]])
    TT = np.block([[z2, T1], [T2, z2]])
    DD = np.block([[D, z2], [z2, D]])

    R1 = np.block([[z4, FF], [FF, z4]])
    R2 = np.block([[SS, z4], [z4, TT]])
    R3 = np.block([[DD, z4], [z4, DD]])
    return {"R1": R1, "R2": R2, "R3": R3, "A": R1 @ R2 @ R3}


def build_g8_generators(ell: int, *, zeta_power: int = 1) -> GeneratorSet:
    """Generators R1, R2, R3(k) of G(l), k = 4 + 8 l, with ``zeta_k = exp(2 pi i zeta_power / k)``."""
    if not isinstance(ell, (int, np.integer)) or ell < 1:
        raise ParameterError(f"G(l) needs an integer l >= 1, got {ell!r}")
    ell = int(ell)
    k = 4 + 8 * ell
    if math.gcd(zeta_power, k) != 1:
        raise ParameterError(f"zeta_power={zeta_power} does not give a primitive {k}-th root of unity")
    mats = g8_matrices(k, zeta_power)
    named = {name: MatrixElement(m) for name, m in mats.items()}
    return GeneratorSet(
        dim=8,
        generators=(named["R1"], named["R2"], named["R3"]),
        family="G8",
        params={"ell": ell, "k": k, "tau": k // 4, "zeta_power": zeta_power},
        named=named,
    )


# --------------------------------------------------------------------------
# closed groups
# --------------------------------------------------------------------------


class FiniteMatrixGroup:
    """A closed, immutable set of orthogonal matrices in canonical key order."""

    def __init__(
        self,
        elements: Sequence[MatrixElement],
        generators: Sequence[int] = (),
        *,
        family: str = "custom",
        params: dict | None = None,
        named: dict | None = None,
    ):
        self.elements = tuple(elements)
        if not self.elements:
            raise ParameterError("a group needs at least the identity")
        self.index = {g.key: i for i, g in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ConsistencyFault("duplicate keys in element list")
        self.generators = tuple(int(i) for i in generators)
        self.family = family
        self.params = dict(params or {})
        self.named = dict(named or {})

    @classmethod
    def from_matrices(cls, mats: Iterable[np.ndarray], *, family: str = "custom", params=None) -> FiniteMatrixGroup:
        """Build from an explicit element list; verifies closure and picks a small generating set."""
        uniq: dict[bytes, MatrixElement] = {}
        for m in mats:
            g = MatrixElement(m, check=False)
            uniq.setdefault(g.key, g)
        elements = sorted(uniq.values(), key=lambda g: g.key)
        group = cls(elements, (), family=family, params=params)
        group._check_table()
        group.generators = tuple(group.greedy_generators())
        return group

    # basic data ---------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> MatrixElement:
        return self.elements[i]

    @cached_property
    def matrices(self) -> np.ndarray:
        stack = np.stack([g.entries for g in self.elements])
        stack.setflags(write=False)
        return stack

    @cached_property
    def identity_index(self) -> int:
        return self.index_of(np.eye(self.dim))

    def find(self, m) -> int | None:
        key = m.key if isinstance(m, MatrixElement) else canonical_key(m)
        return self.index.get(key)

    def index_of(self, m) -> int:
        i = self.find(m)
        if i is None:
            raise KeyError("matrix is not an element of this group")
        return i

    def __contains__(self, m) -> bool:
        return self.find(m) is not None

    # multiplication table -----------------------------------------------

    @cached_property
    def table(self) -> np.ndarray:
        """``table[i, j]`` is the index of ``g_i @ g_j``."""
        mats = self.matrices
        n = self.order
        out = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            for j, key in enumerate(_keys_of_stack(mats[i] @ mats)):
                pos = self.index.get(key)
                if pos is None:
                    raise ConsistencyFault(f"product of elements {i} and {j} is not in the group")
                out[i, j] = pos
        out.setflags(write=False)
        return out

    def _check_table(self) -> None:
        _ = self.table

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int32)
        for i, key in enumerate(_keys_of_stack(np.transpose(self.matrices, (0, 2, 1)))):
            pos = self.index.get(key)
            if pos is None:
                raise ConsistencyFault(f"inverse of element {i} is not in the group")
            inv[i] = pos
        inv.setflags(write=False)
        return inv

    @cached_property
    def element_orders(self) -> np.ndarray:
        t = self.table
        e = self.identity_index
        orders = np.zeros(self.order, dtype=np.int64)
        for i in range(self.order):
            x, n = i, 1
            while x != e:
                x = t[x, i]
                n += 1
            orders[i] = n
        orders.setflags(write=False)
        return orders

    def order_histogram(self) -> dict[int, int]:
        values, counts = np.unique(self.element_orders, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def closure_of(self, indices: Iterable[int]) -> tuple[int, ...]:
        """Indices of the subgroup generated by the given elements."""
        t = self.table
        gens = sorted(set(int(i) for i in indices))
        seen = {self.identity_index}
        frontier = [self.identity_index]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = int(t[x, s])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    def is_subgroup(self, indices: Iterable[int]) -> bool:
        s = set(int(i) for i in indices)
        if self.identity_index not in s:
            return False
        idx = np.fromiter(s, dtype=np.int64)
        return bool(np.isin(self.table[np.ix_(idx, idx)], idx).all())

    def conjugate(self, c: int, indices: Iterable[int]) -> tuple[int, ...]:
        """Indices of ``c S c^-1``."""
        t, inv = self.table, self.inverses
        ci = int(inv[c])
        return tuple(sorted(int(t[t[c, s], ci]) for s in indices))

    def greedy_generators(self) -> list[int]:
        """A small generating set: scan elements by decreasing order, keep those not yet generated."""
        orders = self.element_orders
        candidates = sorted(range(self.order), key=lambda i: (-int(orders[i]), i))
        gens: list[int] = []
        span = {self.identity_index}
        for i in candidates:
            if len(span) == self.order:
                break
            if i not in span:
                gens.append(i)
                span = set(self.closure_of(gens))
        return sorted(gens)

    @cached_property
    def min_gap(self) -> float:
        """Smallest max-entry distance between two distinct elements."""
        flat = self.matrices.reshape(self.order, -1)
        best = math.inf
        for i in range(self.order - 1):
            d = np.abs(flat[i + 1 :] - flat[i]).max(axis=1).min()
            best = min(best, float(d))
        return best

    def __repr__(self) -> str:
        return f"FiniteMatrixGroup(family={self.family}, params={self.params}, order={self.order})"


def close_group(
    gens: GeneratorSet | Sequence[MatrixElement], *, n_max: int = N_MAX, threads: int = 1
) -> FiniteMatrixGroup:
    """Breadth-first closure of a generating set under multiplication.

    The frontier is processed in key order and the final element list is sorted by key,
    so the result does not depend on ``threads``.
    """
    if isinstance(gens, GeneratorSet):
        generators, dim = list(gens.generators), gens.dim
        family, params, named = gens.family, gens.params, gens.named
    else:
        generators = list(gens)
        if not generators:
            raise ParameterError("need at least one generator (use the identity for the trivial group)")
        dim, family, params, named = generators[0].dim, "custom", {}, {}
    for g in generators:
        orth, det = _orthogonality_defect(g.entries)
        if orth >= EPS_ORTH or det >= EPS_ORTH:
            raise ParameterError(f"generator is not in SO({dim}): defects {orth:.2e}, {det:.2e}")

    gen_stack = np.stack([g.entries for g in generators])
    identity = MatrixElement.identity(dim)
    found: dict[bytes, MatrixElement] = {identity.key: identity}
    frontier = [identity]

    def expand(chunk: list[MatrixElement]) -> tuple[np.ndarray, list[bytes]]:
        prods = np.einsum("fij,sjk->fsik", np.stack([g.entries for g in chunk]), gen_stack)
        prods = prods.reshape(-1, dim, dim)
        return prods, _keys_of_stack(prods)

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            frontier.sort(key=lambda g: g.key)
            if pool is not None and len(frontier) >= 2 * threads:
                size = math.ceil(len(frontier) / threads)
                chunks = [frontier[i : i + size] for i in range(0, len(frontier), size)]
                results = list(pool.map(expand, chunks))
            else:
                results = [expand(frontier)]
            nxt = []
            for prods, keys in results:
                for m, key in zip(prods, keys):
                    old = found.get(key)
                    if old is None:
                        h = MatrixElement._trusted(m, key)
                        found[key] = h
                        nxt.append(h)
                        if len(found) > n_max:
                            raise BudgetExceeded(f"group not closed within bound N_max={n_max}")
                    elif np.abs(old.entries - m).max() > KEY_GRID:
                        raise ToleranceFault("key collision between matrices farther apart than the key grid")
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()

    elements = sorted(found.values(), key=lambda g: g.key)
    group = FiniteMatrixGroup(elements, (), family=family, params=params, named=named)
    group.generators = tuple(group.index_of(g) for g in generators)
    if group.order > 1 and not KEY_GRID < group.min_gap / 2:
        raise ToleranceFault(
            f"minimum element gap {group.min_gap:.3e} is not above twice the key grid {KEY_GRID:.3e}"
        )
    return group


def element_order(g: MatrixElement | np.ndarray, *, bound: int = 10_000) -> int:
    """Least n >= 1 with g^n = 1 (within EPS_ORTH)."""
    m = g.entries if isinstance(g, MatrixElement) else np.asarray(g, dtype=float)
    ident = np.eye(m.shape[0])
    x = m.copy()
    for n in range(1, bound + 1):
        if np.abs(x - ident).max() < EPS_ORTH:
            return n
        x = x @ m
    raise BudgetExceeded(f"element order exceeds the bound {bound}; the element does not generate a finite group")


# --------------------------------------------------------------------------
# relations of G(l)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationCheck:
    name: str
    passed: bool
    deviation: float
    detail: str = ""


@dataclass(frozen=True)
class RelationReport:
    ell: int
    k: int
    tau: int
    checks: tuple[RelationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[RelationCheck]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> RelationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "k": self.k,
            "tau": self.tau,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "deviation": c.deviation, "detail": c.detail}
                for c in self.checks
            ],
        }


def verify_matrix_relations(ell: int, *, zeta_power: int = 1, group: FiniteMatrixGroup | None = None) -> RelationReport:
    """Check the identities satisfied by R1, R2, R3(k) and A = R1 R2 R3(k)."""
    gs = build_g8_generators(ell, zeta_power=zeta_power)
    k, tau = gs.params["k"], gs.params["tau"]
    R1, R2, R3, A = (gs.named[n].entries for n in ("R1", "R2", "R3", "A"))
    I8 = np.eye(8)
    mp = np.linalg.matrix_power
    checks: list[RelationCheck] = []

    def same(name, x, y, detail=""):
        dev = float(np.abs(x - y).max())
        checks.append(RelationCheck(name, dev < EPS_ORTH, dev, detail))

    same("R1^8 = 1", mp(R1, 8), I8)
    same("R1^4 = -1", mp(R1, 4), -I8)
    same("A^(2k) = 1", mp(A, 2 * k), I8)
    same("A^k = -1", mp(A, k), -I8)
    same("A^k = R1^4", mp(A, k), mp(R1, 4))
    ord_a, ord_r = element_order(A), element_order(R1)
    checks.append(RelationCheck("order(A) = 2k", ord_a == 2 * k, float(abs(ord_a - 2 * k)), f"order {ord_a}"))
    checks.append(RelationCheck("order(R1) = 8", ord_r == 8, float(abs(ord_r - 8)), f"order {ord_r}"))
    same("(A R1)^2 = 1", mp(A @ R1, 2), I8)
    same("(R1 A)^2 = 1", mp(R1 @ A, 2), I8)
    same("(A^3 R1^3)^2 = 1", mp(mp(A, 3) @ mp(R1, 3), 2), I8)
    same("(R1^3 A^3)^2 = 1", mp(mp(R1, 3) @ mp(A, 3), 2), I8)
    same("R1^2 A^2 R1^2 = A^2", mp(R1, 2) @ mp(A, 2) @ mp(R1, 2), mp(A, 2))
    same("A^8 = R3^8", mp(A, 8), mp(R3, 8))
    same("R3^(2 tau) = 1", mp(R3, 2 * tau), I8)

    dev = float(np.abs(mp(R3, tau) - I8).max())
    expect = tau % 4 == 3
    checks.append(
        RelationCheck(
            "R3^tau = 1 iff tau = 3 mod 4",
            (dev < EPS_ORTH) == expect,
            dev,
            f"tau={tau}, tau mod 4 = {tau % 4}, R3^tau {'=' if dev < EPS_ORTH else '!='} 1",
        )
    )
    if tau % 4 == 1:
        same("A^4 = R3^(tau+4)", mp(A, 4), mp(R3, tau + 4), "tau = 1 mod 4 branch")
    same("R2^2 = R1 A^2 R1^3 A^2", mp(R2, 2), R1 @ mp(A, 2) @ mp(R1, 3) @ mp(A, 2))
    same("-R2^2 = R1 A^2 R1^3 A^(2+k)", -mp(R2, 2), R1 @ mp(A, 2) @ mp(R1, 3) @ mp(A, 2 + k))
    same("R1 R2^2 R1^-1 = -R2^2", R1 @ mp(R2, 2) @ R1.T, -mp(R2, 2))

    lhs = A @ mp(R1, 2)
    devs = [float(np.abs(lhs - mp(R1, 2) @ mp(A, s)).max()) for s in range(2 * k)]
    closest = int(np.argmin(devs))
    checks.append(
        RelationCheck(
            "no sigma with A R1^2 = R1^2 A^sigma",
            min(devs) >= EPS_ORTH,
            min(devs),
            f"sigma in 0..{2 * k - 1}; closest sigma={closest}",
        )
    )

    full = group if group is not None else close_group(gs)
    sub = close_group([gs.named["R1"], gs.named["A"]])
    same_set = set(full.index) == set(sub.index)
    checks.append(
        RelationCheck(
            "<R1, A> = G(l)",
            same_set,
            0.0 if same_set else 1.0,
            f"|<R1,A>| = {sub.order}, |G(l)| = {full.order}",
        )
    )
    return RelationReport(ell=int(ell), k=k, tau=tau, checks=tuple(checks))


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

SCHEMA_VERSION = 1


def group_to_json(group: FiniteMatrixGroup) -> str:
    """Serialize with every entry printed to 17 significant digits."""
    header = {
        "schemaVersion": SCHEMA_VERSION,
        "dim": group.dim,
        "order": group.order,
        "family": group.family,
        "parameters": group.params,
        "generators": list(group.generators),
    }
    head = json.dumps(header, sort_keys=True)[:-1]
    rows = []
    for g in group.elements:
        rows.append("[" + ", ".join(format(float(x), ".17g") for x in g.entries.ravel()) + "]")
    return head + ', "elements": [\n' + ",\n".join(rows) + "\n]}\n"


def group_from_json(text: str) -> FiniteMatrixGroup:
    doc = json.loads(text)
    if doc.get("schemaVersion") != SCHEMA_VERSION:
        raise ParameterError(f"unsupported schemaVersion {doc.get('schemaVersion')!r}")
    n = int(doc["dim"])
    mats = [np.asarray(row, dtype=float).reshape(n, n) for row in doc["elements"]]
    elements = [MatrixElement(m) for m in mats]
    if len(elements) != int(doc["order"]):
        raise ParameterError(f"order field {doc['order']} does not match {len(elements)} elements")
    elements.sort(key=lambda g: g.key)
    # generator indices refer to the element order in the file
    gens = [canonical_key(mats[i]) for i in doc.get("generators", [])]
    group = FiniteMatrixGroup(elements, (), family=doc.get("family", "custom"), params=doc.get("parameters", {}))
    group._check_table()
    if gens:
        group.generators = tuple(group.index[kk] for kk in gens)
    else:
        group.generators = tuple(group.greedy_generators())
    return group
