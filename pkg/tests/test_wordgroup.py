import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from so8lab.errors import BudgetExceeded, ParameterError
from so8lab.wordgroup import (
    COSET_WORDS,
    TABLE1,
    TABLE2,
    Presentation,
    Word,
    abstract_group,
    abstract_normalizer_K,
    abstract_order,
    check_tables,
    coset_table,
    matrix_homomorphism_check,
    reduce_word,
    todd_coxeter,
    verify_abstract_relations,
)

P12 = Presentation(12)
KS = (12, 20, 28, 36)


def coset_of(p, w):
    return reduce_word(p, w).name


def test_word_parsing():
    assert Word.parse("r a^2 r^3") == Word.of(("r", 1), ("a", 2), ("r", 3))
    assert Word.parse("ra^{2}r^3") == Word.parse("r a^2 r^3")
    assert Word.parse("r*a^-1") == Word.of(("r", 1), ("a", -1))
    assert Word.parse("a a r r^-1") == Word.of(("a", 2))
    assert len(Word.parse("e")) == 0
    with pytest.raises(ParameterError):
        Word.parse("r x")


def test_presentation_validation():
    for bad in (4, 10, 16, 13):
        with pytest.raises(ParameterError):
            Presentation(bad)
    with pytest.raises(ParameterError):
        Presentation(12, commuting=True, s=8)
    with pytest.raises(ParameterError):
        Presentation(12, s=7)
    assert Presentation(12, commuting=True).s == 7


def test_todd_coxeter_small_groups():
    s3 = [Word.parse("a^2"), Word.parse("r^3"), Word.parse("a r a r")]
    assert len(todd_coxeter(s3)) == 6
    cyclic = [Word.parse("a^5"), Word.parse("r")]
    assert len(todd_coxeter(cyclic)) == 5
    with pytest.raises(BudgetExceeded):
        todd_coxeter(P12.relators(), max_cosets=50)


def test_empty_word():
    f = reduce_word(P12, "")
    assert (f.name, f.power) == ("A", 0)


def test_spot_rows():
    assert coset_of(P12, "r a r") == "A"
    assert coset_of(P12, "r a^2 r") == "ar^2A"
    rows = {key: c for key, _, c in coset_table(P12)["table1"]}
    assert rows[(2, 2, 2)] == "A"
    assert rows[(3, 2, 2)] == "rA"


def test_table2_row_2_1():
    rows = {key: c for key, _, c in coset_table(P12)["table2"]}
    assert rows[(2, 1)] == "A"


def test_tables_match_reference_values():
    tc = check_tables(P12)
    assert tc.matches == 36, [(r.table, r.key, r.expected, r.computed) for r in tc.mismatches()]


@pytest.mark.parametrize("k", KS)
def test_table1_disagreements_are_two_rows(k):
    tc = check_tables(Presentation(k))
    t1 = [r for r in tc.mismatches() if r.table == 1]
    assert [(r.key, r.expected, r.computed) for r in t1] == [
        ((2, 1, 3), "ar^2A", "ar^3A"),
        ((2, 3, 2), "ar^2A", "ar^3A"),
    ]
    assert len(TABLE1) == 27 and len(TABLE2) == 9


@pytest.mark.parametrize("k", KS)
def test_table2_with_short_tail(k):
    tc = check_tables(Presentation(k))
    assert all(r.match for r in tc.table2_alternate)


@pytest.mark.parametrize("k", KS)
def test_order_non_commuting(k):
    assert abstract_order(Presentation(k)) == 16 * k


def test_order_commuting_k12():
    assert abstract_order(Presentation(12, commuting=True)) == 96


@pytest.mark.parametrize("k", KS)
def test_commuting_quotient_collapses(k):
    g = abstract_group(Presentation(k, commuting=True))
    assert g.order == 2 * k
    assert len(g.a_powers) == k // 2


@pytest.mark.parametrize("k", KS)
def test_relations(k):
    rep = verify_abstract_relations(Presentation(k))
    assert rep.passed, rep.failures()


def test_four_cosets_disjoint():
    rep = verify_abstract_relations(P12)
    names = {c.name: c.passed for c in rep.checks}
    assert names["A, rA, r^2A, r^3A disjoint"]
    assert names["8 cosets partition G"]


def test_normalizer_k12():
    rep = abstract_normalizer_K(P12)
    assert rep.k_order == 96 and rep.index == 2
    assert all(rep.commutes_with_h.values())
    assert all(rep.commutes_with_h_prime.values())
    assert rep.k_equals_normalizer


def test_normalizer_decomposition_k20():
    rep = abstract_normalizer_K(Presentation(20))
    assert rep.decomposition_matches and rep.passed
    assert [p[1] for p in rep.pieces] == ["even", "odd", "even", "odd", "odd", "even", "odd", "even"]


def test_normalizer_needs_non_commuting():
    with pytest.raises(ParameterError):
        abstract_normalizer_K(Presentation(12, commuting=True))


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_matrix_homomorphism(g8_groups, ell):
    rep = matrix_homomorphism_check(ell, group=g8_groups[ell])
    assert rep.passed and rep.abstract_order == 64 + 128 * ell


words = st.lists(st.tuples(st.sampled_from("ra"), st.integers(-30, 30)), max_size=8).map(lambda xs: Word(tuple(xs)))


def as_word(form):
    return Word.parse(COSET_WORDS[form.coset]) * Word.of(("a", form.power))


@settings(max_examples=500, deadline=None)
@given(words, words)
def test_reduce_is_a_congruence(u, v):
    lhs = reduce_word(P12, u * v)
    rhs = reduce_word(P12, as_word(reduce_word(P12, u)) * as_word(reduce_word(P12, v)))
    assert lhs == rhs


@settings(max_examples=200, deadline=None)
@given(words)
def test_inverse_word(u):
    assert reduce_word(P12, u * u.inverse()) == reduce_word(P12, "")
    g = abstract_group(P12)
    assert g.multiply(reduce_word(P12, u), reduce_word(P12, u.inverse())).power == 0
