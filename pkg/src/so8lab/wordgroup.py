"""Exact computations in the group presented by generators r, a and the relations

    a^(2k) = e,  a^k central,  a^k = r^4,  (ar)^2 = (ra)^2 = (a^3 r^3)^2 = e,  r^2 a^2 r^2 = a^2,

optionally together with r^2 a = a^s r^2.  Elements are enumerated by coset enumeration
over the trivial subgroup; all arithmetic is on integers.  Each element is written
uniquely as ``C_i a^t`` with coset representatives

    C0..C7 = e, r, r^2, r^3, a r^2, a r^3, a^2 r^3, r a^2 r^3

(only C0..C3 in the commuting case).
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import BudgetExceeded, ConsistencyFault, ParameterError

__all__ = [
    "COSET_NAMES",
    "TABLE1",
    "TABLE2",
    "Presentation",
    "Word",
    "CosetForm",
    "AbstractGroup",
    "IdentityCheck",
    "RelationsReport",
    "TableRow",
    "TableCheck",
    "NormalizerKReport",
    "HomomorphismReport",
    "todd_coxeter",
    "abstract_group",
    "reduce_word",
    "coset_table",
    "check_tables",
    "abstract_order",
    "verify_abstract_relations",
    "abstract_normalizer_K",
    "matrix_homomorphism_check",
]

COSET_NAMES = ("A", "rA", "r^2A", "r^3A", "ar^2A", "ar^3A", "a^2r^3A", "ra^2r^3A")
COSET_WORDS = ("", "r", "r^2", "r^3", "a r^2", "a r^3", "a^2 r^3", "r a^2 r^3")
_NAME_INDEX = {n: i for i, n in enumerate(COSET_NAMES)}

# (j_{m-1}, j_m, s_m) -> coset of r^{j_{m-1}} a^{s_m} r^{j_m}, reference values
TABLE1: dict[tuple[int, int, int], str] = {
    (1, 1, 1): "A", (1, 1, 2): "ar^2A", (1, 1, 3): "ra^2r^3A",
    (1, 2, 1): "a^2r^3A", (1, 2, 2): "r^3A", (1, 2, 3): "a^2r^3A",
    (1, 3, 1): "ar^2A", (1, 3, 2): "ra^2r^3A", (1, 3, 3): "r^2A",
    (2, 1, 1): "rA", (2, 1, 2): "a^2r^3A", (2, 1, 3): "ar^2A",
    (2, 2, 1): "ra^2r^3A", (2, 2, 2): "A", (2, 2, 3): "ra^2r^3A",
    (2, 3, 1): "a^2r^3A", (2, 3, 2): "ar^2A", (2, 3, 3): "r^3A",
    (3, 1, 1): "r^2A", (3, 1, 2): "ra^2r^3A", (3, 1, 3): "ar^2A",
    (3, 2, 1): "ar^3A", (3, 2, 2): "rA", (3, 2, 3): "ar^3A",
    (3, 3, 1): "ra^2r^3A", (3, 3, 2): "ar^2A", (3, 3, 3): "A",
}  # fmt: skip

# (j_{m-2}, s_{m-1}) -> coset of r^{j_{m-2}} a^{s_{m-1}} r a^2 r^3, reference values
TABLE2: dict[tuple[int, int], str] = {
    (1, 1): "r^3A", (1, 2): "a^2r^3A", (1, 3): "r^3A",
    (2, 1): "A", (2, 2): "ra^2r^3A", (2, 3): "A",
    (3, 1): "rA", (3, 2): "ar^3A", (3, 3): "rA",
}  # fmt: skip


# --------------------------------------------------------------------------
# words
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([ra])\s*(?:\^\s*\{?\s*(-?\d+)\s*\}?)?\s*\*?")


@dataclass(frozen=True)
class Word:
    """Alternating sequence of (generator, nonzero exponent) pairs."""

    syllables: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        merged: list[list] = []
        for g, e in self.syllables:
            if g not in ("r", "a"):
                raise ParameterError(f"unknown generator {g!r}")
            e = int(e)
            if merged and merged[-1][0] == g:
                merged[-1][1] += e
            else:
                merged.append([g, e])
            if merged[-1][1] == 0:
                merged.pop()
        object.__setattr__(self, "syllables", tuple((g, e) for g, e in merged))

    @classmethod
    def parse(cls, text: str) -> Word:
        """Parse words such as ``"r a^2 r^3"``, ``"r*a^-1"`` or ``"ra^{2}r^3"``; ``""`` or ``"e"`` is the identity."""
        s = text.strip()
        if s in ("", "e", "1"):
            return cls()
        out, pos = [], 0
        while pos < len(s):
            m = _TOKEN.match(s, pos)
            if m is None or m.end() == pos:
                raise ParameterError(f"cannot parse word {text!r} at position {pos}")
            out.append((m.group(1), int(m.group(2)) if m.group(2) else 1))
            pos = m.end()
        return cls(tuple(out))

    @classmethod
    def of(cls, *pairs) -> Word:
        return cls(tuple(pairs))

    def __mul__(self, other: Word) -> Word:
        return Word(self.syllables + other.syllables)

    def inverse(self) -> Word:
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __str__(self) -> str:
        if not self.syllables:
            return "e"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)


def _as_word(w: Word | str) -> Word:
    return w if isinstance(w, Word) else Word.parse(w)


# --------------------------------------------------------------------------
# presentations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    k: int
    commuting: bool = False
    s: int | None = None

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 12 or self.k % 8 != 4:
            raise ParameterError(f"k must satisfy k >= 12 and k = 4 mod 8, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if self.commuting:
            expected = 2 * (self.k // 4) + 1
            s = expected if self.s is None else int(self.s)
            if s != expected:
                raise ParameterError(
                    f"commuting case needs s = 2 tau + 1 = {expected} (from r^2 a^2 = a^(k+2) r^2), got {s}"
                )
            if (2 * s - (self.k + 2)) % (2 * self.k):
                raise ConsistencyFault("2s = k + 2 mod 2k violated")
            object.__setattr__(self, "s", s)
        elif self.s is not None:
            raise ParameterError("s is only meaningful in the commuting case")

    @property
    def tau(self) -> int:
        return self.k // 4

    def relators(self) -> list[Word]:
        k = self.k
        rels = [
            Word.of(("a", 2 * k)),
            Word.of(("r", 4), ("a", -k)),
            Word.of(("a", k), ("r", 1), ("a", -k), ("r", -1)),
            Word.of(("a", 1), ("r", 1), ("a", 1), ("r", 1)),
            Word.of(("r", 1), ("a", 1), ("r", 1), ("a", 1)),
            Word.of(("a", 3), ("r", 3), ("a", 3), ("r", 3)),
            Word.of(("r", 2), ("a", 2), ("r", 2), ("a", -2)),
        ]
        if self.commuting:
            rels.append(Word.of(("r", 2), ("a", 1), ("r", -2), ("a", -self.s)))
        return rels

    @property
    def coset_count(self) -> int:
        return 4 if self.commuting else 8

    def expected_order(self) -> int:
        return 8 * self.k if self.commuting else 16 * self.k


# --------------------------------------------------------------------------
# coset enumeration
# --------------------------------------------------------------------------

# generator columns: 0 = r, 1 = r^-1, 2 = a, 3 = a^-1
_COL = {("r", 1): 0, ("r", -1): 1, ("a", 1): 2, ("a", -1): 3}
_INV = (1, 0, 3, 2)


def _letters(w: Word) -> list[int]:
    out = []
    for g, e in w.syllables:
        out.extend([_COL[(g, 1 if e > 0 else -1)]] * abs(e))
    return out


def todd_coxeter(relators: Sequence[Word], *, max_cosets: int = 2_000_000) -> np.ndarray:
    """Coset table of the trivial subgroup (the right regular action on the group).

    Hasse-Lindenberg-Todd strategy with coincidence processing.  Returns an
    ``(order, 4)`` integer array; coset 0 is the identity.
    """
    rels = [_letters(w) for w in relators if len(w)]
    table: list[list[int]] = [[-1, -1, -1, -1]]
    parent = [0]

    def rep(c: int) -> int:
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def define(c: int, x: int) -> int:
        d = len(table)
        if d >= max_cosets:
            raise BudgetExceeded(f"coset enumeration exceeded {max_cosets} cosets")
        table.append([-1, -1, -1, -1])
        parent.append(d)
        table[c][x] = d
        table[d][_INV[x]] = c
        return d

    def merge(c1: int, c2: int, queue: list[int]) -> None:
        p1, p2 = rep(c1), rep(c2)
        if p1 != p2:
            lo, hi = min(p1, p2), max(p1, p2)
            parent[hi] = lo
            queue.append(hi)

    def coincidence(c1: int, c2: int) -> None:
        queue: list[int] = []
        merge(c1, c2, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(4):
                d = table[g][x]
                if d < 0:
                    continue
                table[d][_INV[x]] = -1
                mu, nu = rep(g), rep(d)
                if table[mu][x] >= 0:
                    merge(nu, table[mu][x], queue)
                elif table[nu][_INV[x]] >= 0:
                    merge(mu, table[nu][_INV[x]], queue)
                else:
                    table[mu][x] = nu
                    table[nu][_INV[x]] = mu

    def scan_and_fill(c: int, w: list[int]) -> None:
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] >= 0:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][_INV[w[j]]] >= 0:
                b = table[b][_INV[w[j]]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][_INV[w[i]]] = f
                return
            define(f, w[i])

    c = 0
    while c < len(table):
        if parent[c] == c:
            for w in rels:
                scan_and_fill(c, w)
                if parent[c] != c:
                    break
            if parent[c] == c:
                for x in range(4):
                    if table[c][x] < 0:
                        define(c, x)
        c += 1

    live = [i for i in range(len(table)) if parent[i] == i]
    # renumber in breadth-first order from coset 0 so labels are canonical
    order, seen = [0], {0}
    head = 0
    while head < len(order):
        cur = order[head]
        head += 1
        for x in range(4):
            nxt = rep(table[cur][x])
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
    if len(order) != len(live):
        raise ConsistencyFault("coset table is not connected")
    new = {old: i for i, old in enumerate(order)}
    out = np.array([[new[rep(table[old][x])] for x in range(4)] for old in order], dtype=np.int64)
    for x in range(4):
        if not np.array_equal(out[out[:, x], _INV[x]], np.arange(len(out))):
            raise ConsistencyFault("coset table columns are not mutually inverse")
    return out


# --------------------------------------------------------------------------
# the enumerated group
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetForm:
    coset: int
    power: int
    k: int

    def __post_init__(self):
        if not 0 <= self.coset < 8:
            raise ParameterError(f"coset label {self.coset} out of range")
        if not 0 <= self.power < 2 * self.k:
            raise ParameterError(f"power {self.power} outside [0, 2k)")

    @property
    def name(self) -> str:
        return COSET_NAMES[self.coset]

    def __str__(self) -> str:
        return f"({self.name}, a^{self.power})"


class AbstractGroup:
    """Elements of a presented group with multiplication and coset normal forms."""

    def __init__(self, presentation: Presentation, *, max_cosets: int = 2_000_000):
        self.presentation = presentation
        self.coset_table = todd_coxeter(presentation.relators(), max_cosets=max_cosets)
        self.order = len(self.coset_table)
        k = presentation.k
        col = self.coset_table

        # words along a breadth-first spanning tree, and the permutation each element induces
        n = self.order
        perms = np.empty((n, n), dtype=np.int64)
        perms[0] = np.arange(n)
        tree_word: list[tuple[int, ...]] = [()] * n
        done = np.zeros(n, dtype=bool)
        done[0] = True
        queue = [0]
        head = 0
        while head < len(queue):
            g = queue[head]
            head += 1
            for x in range(4):
                h = int(col[g, x])
                if not done[h]:
                    done[h] = True
                    perms[h] = col[perms[g], x]
                    tree_word[h] = tree_word[g] + (x,)
                    queue.append(h)
        # mult[i, j] = index of g_i g_j = image of coset i under g_j
        self.mult = np.ascontiguousarray(perms.T)
        self.mult.setflags(write=False)
        self._tree_word = tree_word

        self.identity = 0
        self.r = int(col[0, 0])
        self.a = int(col[0, 2])
        self.a_powers = self._powers(self.a, 2 * k)
        self.r_powers = self._powers(self.r, 8)

        reps = [self.element(w) for w in COSET_WORDS[: presentation.coset_count]]
        self.coset_reps = tuple(reps)
        # first label wins; overlaps are reported by verify_abstract_relations
        label = np.full((n, 2), -1, dtype=np.int64)
        for ci, c in enumerate(reps):
            for t in range(len(self.a_powers)):
                g = int(self.mult[c, self.a_powers[t]])
                if label[g, 0] < 0:
                    label[g] = (ci, t)
        if (label[:, 0] < 0).any():
            raise ConsistencyFault("the coset representatives do not cover the group")
        self.labels = label
        self.labels.setflags(write=False)

    def _powers(self, g: int, bound: int) -> np.ndarray:
        out = [self.identity]
        cur = g
        while cur != self.identity:
            out.append(cur)
            cur = int(self.mult[cur, g])
            if len(out) > bound:
                raise ConsistencyFault("generator order exceeds its bound")
        return np.array(out, dtype=np.int64)

    def power(self, g: int, e: int) -> int:
        if g == self.a:
            pw = self.a_powers
        elif g == self.r:
            pw = self.r_powers
        else:
            pw = self._powers(g, self.order)
        return int(pw[e % len(pw)])

    def element(self, w: Word | str) -> int:
        cur = self.identity
        for g, e in _as_word(w).syllables:
            cur = int(self.mult[cur, self.power(self.a if g == "a" else self.r, e)])
        return cur

    def inverse(self, g: int) -> int:
        return int(np.nonzero(self.mult[g] == self.identity)[0][0])

    def form(self, g: int) -> CosetForm:
        c, t = self.labels[g]
        return CosetForm(int(c), int(t), self.presentation.k)

    def from_form(self, f: CosetForm) -> int:
        return int(self.mult[self.coset_reps[f.coset], self.a_powers[f.power]])

    def multiply(self, x: CosetForm, y: CosetForm) -> CosetForm:
        return self.form(int(self.mult[self.from_form(x), self.from_form(y)]))

    def tree_word(self, g: int) -> Word:
        names = (("r", 1), ("r", -1), ("a", 1), ("a", -1))
        return Word(tuple(names[x] for x in self._tree_word[g]))

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = int(self.mult[x, s])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def normalizer(self, h: Iterable[int]) -> frozenset[int]:
        hs = frozenset(h)
        out = set()
        for g in range(self.order):
            gi = self.inverse(g)
            if all(int(self.mult[self.mult[g, x], gi]) in hs for x in hs):
                out.add(g)
        return frozenset(out)


@lru_cache(maxsize=None)
def abstract_group(p: Presentation) -> AbstractGroup:
    return AbstractGroup(p)


def reduce_word(p: Presentation, w: Word | str) -> CosetForm:
    """Normal form (coset label, trailing a-power) of a word."""
    g = abstract_group(p)
    return g.form(g.element(w))


def abstract_order(p: Presentation) -> int:
    return abstract_group(p).order


# --------------------------------------------------------------------------
# reference coset tables
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    table: int
    key: tuple[int, ...]
    word: str
    expected: str
    computed: str

    @property
    def match(self) -> bool:
        return self.expected == self.computed


@dataclass(frozen=True)
class TableCheck:
    rows: tuple[TableRow, ...]
    # TABLE2 re-read with the tail a r^2 in place of r a^2 r^3 (diagnostic only)
    table2_alternate: tuple[TableRow, ...] = ()

    @property
    def matches(self) -> int:
        return sum(r.match for r in self.rows)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def passed(self) -> bool:
        return self.matches == self.total

    def mismatches(self) -> list[TableRow]:
        return [r for r in self.rows if not r.match]

    def to_dict(self) -> dict:
        def row(r: TableRow) -> dict:
            return {"table": r.table, "row": list(r.key), "word": r.word, "expected": r.expected, "computed": r.computed, "match": r.match}

        return {
            "matched": self.matches,
            "total": self.total,
            "passed": self.passed,
            "rows": [row(r) for r in self.rows],
            "table2AlternateReading": {
                "tail": "a r^2",
                "matched": sum(r.match for r in self.table2_alternate),
                "total": len(self.table2_alternate),
            },
        }


def coset_table(p: Presentation) -> dict[str, list[tuple[tuple[int, ...], str, str]]]:
    """Computed cosets for every row of both tables: {table: [(row, word, coset)]}."""
    if p.commuting:
        raise ParameterError("the coset tables describe the non-commuting case")
    g = abstract_group(p)
    t1 = []
    for j1, j2, s in sorted(TABLE1):
        w = Word.of(("r", j1), ("a", s), ("r", j2))
        t1.append(((j1, j2, s), str(w), g.form(g.element(w)).name))
    t2 = []
    for j, s in sorted(TABLE2):
        w = Word.of(("r", j), ("a", s), ("r", 1), ("a", 2), ("r", 3))
        t2.append(((j, s), str(w), g.form(g.element(w)).name))
    return {"table1": t1, "table2": t2}


def check_tables(p: Presentation) -> TableCheck:
    g = abstract_group(p)
    computed = coset_table(p)
    rows = [TableRow(1, key, w, TABLE1[key], c) for key, w, c in computed["table1"]]
    rows += [TableRow(2, key, w, TABLE2[key], c) for key, w, c in computed["table2"]]
    alt = []
    for j, s in sorted(TABLE2):
        w = Word.of(("r", j), ("a", s), ("a", 1), ("r", 2))
        alt.append(TableRow(2, (j, s), str(w), TABLE2[(j, s)], g.form(g.element(w)).name))
    return TableCheck(tuple(rows), tuple(alt))


# --------------------------------------------------------------------------
# relations and the subgroup K
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    lhs: str = ""
    rhs: str = ""


@dataclass(frozen=True)
class RelationsReport:
    k: int
    checks: tuple[IdentityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "lhs": c.lhs, "rhs": c.rhs} for c in self.checks],
        }


def verify_abstract_relations(p: Presentation) -> RelationsReport:
    g = abstract_group(p)
    k = p.k
    identities = [
        ("r^8 = e", "r^8", ""),
        ("ar = r^3 a^(k-1)", "a r", f"r^3 a^{k - 1}"),
        ("a^3 r^3 = r a^(k-3)", "a^3 r^3", f"r a^{k - 3}"),
        ("r^2 a^2 = a^(k+2) r^2", "r^2 a^2", f"a^{k + 2} r^2"),
        ("r^2 a^4 = a^4 r^2", "r^2 a^4", "a^4 r^2"),
        ("a^4 r = r a^(2k-4)", "a^4 r", f"r a^{2 * k - 4}"),
    ]
    checks = []
    for name, lhs, rhs in identities:
        fl, fr = g.form(g.element(lhs)), g.form(g.element(rhs))
        checks.append(IdentityCheck(name, fl == fr, str(fl), str(fr)))

    r2, a2 = g.element("r^2"), g.element("a^2")
    r2_group, a2_group = g.closure([r2]), g.closure([a2])
    conj = int(g.mult[g.mult[a2, r2], g.inverse(a2)])
    checks.append(IdentityCheck("a^2 normalizes <r^2>", conj in r2_group))
    conj = int(g.mult[g.mult[r2, a2], g.inverse(r2)])
    checks.append(IdentityCheck("r^2 normalizes <a^2>", conj in a2_group))

    checks.append(IdentityCheck("order(a) = 2k", len(g.a_powers) == 2 * k, str(len(g.a_powers)), str(2 * k)))
    cosets = [frozenset(int(g.mult[c, t]) for t in g.a_powers) for c in g.coset_reps]
    disjoint = all(not (cosets[i] & cosets[j]) for i in range(4) for j in range(i + 1, 4))
    checks.append(IdentityCheck("A, rA, r^2A, r^3A disjoint", disjoint))
    partition = sum(map(len, cosets)) == g.order == len(frozenset().union(*cosets))
    checks.append(IdentityCheck(f"{p.coset_count} cosets partition G", partition))
    return RelationsReport(k, tuple(checks))


@dataclass(frozen=True)
class NormalizerKReport:
    k: int
    group_order: int
    k_order: int
    index: int
    decomposition_matches: bool
    pieces: tuple[tuple[str, str, int], ...]
    commutes_with_h: dict
    commutes_with_h_prime: dict
    normalizer_h_order: int
    normalizer_h_prime_order: int
    normalizers_equal: bool
    k_equals_normalizer: bool

    @property
    def passed(self) -> bool:
        return (
            self.index == 2
            and self.decomposition_matches
            and self.normalizers_equal
            and self.normalizer_h_order * 2 == self.group_order
        )

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "groupOrder": self.group_order,
            "K_order": self.k_order,
            "index": self.index,
            "decompositionMatches": self.decomposition_matches,
            "pieces": [{"coset": c, "parity": par, "count": n} for c, par, n in self.pieces],
            "commutesWithH": self.commutes_with_h,
            "commutesWithHPrime": self.commutes_with_h_prime,
            "normalizerOrderH": self.normalizer_h_order,
            "normalizerOrderHPrime": self.normalizer_h_prime_order,
            "normalizersEqual": self.normalizers_equal,
            "K_equalsNormalizer": self.k_equals_normalizer,
            "passed": self.passed,
        }


# parity of the a-power in each piece of K, coset by coset
K_PARITIES = ("even", "odd", "even", "odd", "odd", "even", "odd", "even")


def abstract_normalizer_K(p: Presentation) -> NormalizerKReport:
    if p.commuting:
        raise ParameterError("the subgroup K is described for the non-commuting case")
    g = abstract_group(p)
    k = p.k
    gens = {"r^2": g.element("r^2"), "ar": g.element("a r"), "a^2": g.element("a^2")}
    kset = g.closure(gens.values())

    expected = set()
    pieces = []
    for ci, parity in enumerate(K_PARITIES):
        start = 0 if parity == "even" else 1
        members = [int(g.mult[g.coset_reps[ci], g.a_powers[t]]) for t in range(start, 2 * k, 2)]
        expected.update(members)
        pieces.append((COSET_NAMES[ci], parity, len(members)))

    h = g.element(Word.of(("r", 1), ("a", 2), ("r", 3), ("a", 2)))
    hp = g.element(Word.of(("r", 1), ("a", 2), ("r", 3), ("a", 2 + k)))

    def commutes(x: int, y: int) -> bool:
        return int(g.mult[x, y]) == int(g.mult[y, x])

    nh = g.normalizer(g.closure([h]))
    nhp = g.normalizer(g.closure([hp]))
    return NormalizerKReport(
        k=k,
        group_order=g.order,
        k_order=len(kset),
        index=g.order // len(kset) if g.order % len(kset) == 0 else 0,
        decomposition_matches=kset == frozenset(expected),
        pieces=tuple(pieces),
        commutes_with_h={n: commutes(x, h) for n, x in gens.items()},
        commutes_with_h_prime={n: commutes(x, hp) for n, x in gens.items()},
        normalizer_h_order=len(nh),
        normalizer_h_prime_order=len(nhp),
        normalizers_equal=nh == nhp,
        k_equals_normalizer=kset == nh,
    )


# --------------------------------------------------------------------------
# comparison with the matrix group
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HomomorphismReport:
    ell: int
    abstract_order: int
    matrix_order: int
    bijective: bool
    sampled_products: int
    product_failures: int

    @property
    def passed(self) -> bool:
        return self.bijective and self.product_failures == 0 and self.abstract_order == self.matrix_order


def matrix_homomorphism_check(ell: int, *, samples: int = 200, seed: int = 0, group=None) -> HomomorphismReport:
    """Map r -> R1, a -> A and compare the abstract group with G(l) element by element."""
    from .matgroup import build_g8_generators, close_group

    gs = build_g8_generators(ell)
    mg = group if group is not None else close_group(gs)
    p = Presentation(gs.params["k"])
    g = abstract_group(p)
    r_mat, a_mat = gs.named["R1"].entries, gs.named["A"].entries
    step = (r_mat, r_mat.T, a_mat, a_mat.T)

    images = [None] * g.order
    images[0] = np.eye(8)
    for h in range(1, g.order):
        m = np.eye(8)
        for x in g._tree_word[h]:
            m = m @ step[x]
        images[h] = m
    idx = [mg.find(m) for m in images]
    bijective = None not in idx and len(set(idx)) == g.order == mg.order

    rng = np.random.default_rng(seed)
    failures = 0
    for x, y in rng.integers(0, g.order, size=(samples, 2)):
        prod = images[int(g.mult[x, y])]
        if float(np.abs(prod - images[x] @ images[y]).max()) > 1e-9:
            failures += 1
    return HomomorphismReport(int(ell), g.order, mg.order, bool(bijective), samples, failures)
