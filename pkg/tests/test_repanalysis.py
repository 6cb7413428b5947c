import numpy as np
import pytest

from so8lab.errors import ParameterError, ToleranceFault
from so8lab.matgroup import QUAT_J, FiniteMatrixGroup, MatrixElement, QuaternionPair, quaternion_pair_to_matrix
from so8lab.repanalysis import (
    Subspace,
    canonical_conjugate,
    commutant_dimension,
    find_isomorphism,
    fixed_subspace,
    isotropy_types,
    normalizer,
    numerical_rank,
    omega_exponents,
    pointwise_stabilizer,
    sampled_isotropy_types,
    verify_omega_formulas,
    verify_weyl_is_g3,
    weyl_action,
)


def h_pair(group):
    r2sq = np.linalg.matrix_power(group.named["R2"].entries, 2)
    e = group.identity_index
    return sorted([e, group.index_of(r2sq)]), sorted([e, group.index_of(-r2sq)])


def random_orthogonal(n, seed=0):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def test_numerical_rank_refuses_without_gap():
    m = np.diag([1.0, 1e-6])
    with pytest.raises(ToleranceFault):
        numerical_rank(m)
    assert numerical_rank(np.diag([1.0, 1e-14])) == 1


def test_fixed_subspace_of_identity(g33):
    assert fixed_subspace(g33, [g33.identity_index]).dim == 4


def test_fixed_subspace_of_jj(g33):
    jj = quaternion_pair_to_matrix(QuaternionPair(QUAT_J, QUAT_J)).entries
    w = fixed_subspace(g33, [g33.index_of(jj)])
    assert w.dim == 2
    assert np.allclose(w.basis[:, [1, 3]], 0)


def test_fixed_subspace_of_r2_squared(g81):
    h, hp = h_pair(g81)
    assert fixed_subspace(g81, h).dim == 4
    assert fixed_subspace(g81, hp).dim == 4


def test_subspace_canonical_basis_is_orthonormal():
    w = Subspace.from_rows(np.array([[1.0, 1.0, 0.0], [0.0, 2.0, 0.0]]), 3)
    assert w.dim == 2
    assert w.orthonormality_defect() < 1e-14
    assert w.contains(np.array([3.0, -1.0, 0.0]))
    assert not w.contains(np.array([0.0, 0.0, 1.0]))


def test_commutant_trivial_group_plane():
    g = FiniteMatrixGroup([MatrixElement.identity(2)])
    assert commutant_dimension(g) == 4


@pytest.mark.parametrize("m", [3, 5])
def test_commutant_g3(g3_groups, m):
    dim, gap = commutant_dimension(g3_groups[m], with_gap=True)
    assert dim == 1 and gap >= 1e3


@pytest.mark.parametrize("ell", [1, 2])
def test_commutant_g8(g8_groups, ell):
    dim, gap = commutant_dimension(g8_groups[ell], with_gap=True)
    assert dim == 1 and gap >= 1e3


def test_commutant_invariant_under_basis_change(g81, g33):
    q = random_orthogonal(8, seed=3)
    conj = FiniteMatrixGroup.from_matrices([q @ m @ q.T for m in g81.matrices])
    assert commutant_dimension(conj) == 1
    z = np.zeros((4, 4))
    doubled = FiniteMatrixGroup.from_matrices([q @ np.block([[m, z], [z, m]]) @ q.T for m in g33.matrices])
    assert commutant_dimension(doubled) == 4


def test_g3_isotropy_types(g3_groups):
    for m in (3, 5):
        types = isotropy_types(g3_groups[m])
        assert [t.fixed_dim for t in types] == [2, 2, 2]
        assert all(t.subgroup_order == 2 for t in types)


@pytest.mark.parametrize("ell", [1, 2])
def test_g8_isotropy_dims_even(g8_groups, ell):
    types = isotropy_types(g8_groups[ell], include_trivial=True)
    assert all(t.fixed_dim % 2 == 0 for t in types)


def test_g81_isotropy_type_list(g81):
    summary = sorted((t.fixed_dim, t.subgroup_order, t.conjugates) for t in isotropy_types(g81))
    assert summary == [(2, 4, 12), (2, 4, 12), (2, 4, 12), (4, 2, 2), (4, 2, 24)]


def test_isotropy_witnesses_are_certified(g81):
    for t in isotropy_types(g81):
        assert pointwise_stabilizer(g81, t.witness) == t.representative


def test_isotropy_conjugation_invariance(g81):
    for t in isotropy_types(g81):
        base = canonical_conjugate(g81, t.representative)
        for c in range(0, g81.order, 7):
            conj = g81.conjugate(c, t.representative)
            assert fixed_subspace(g81, conj).dim == t.fixed_dim
            assert canonical_conjugate(g81, conj) == base


def test_oracle_agrees_with_lattice_g3(g33):
    # a random point never has Fix = {0} as its stabilizer's fixed space
    lattice = {t.representative: t.fixed_dim for t in isotropy_types(g33, include_trivial=True) if t.fixed_dim}
    assert sampled_isotropy_types(g33, samples=20_000, seed=1) == lattice


def test_random_stabilizers_are_listed_subgroups(g81):
    reps = {t.representative for t in isotropy_types(g81, include_trivial=True)}
    rng = np.random.default_rng(5)
    for _ in range(20):
        t = isotropy_types(g81)[rng.integers(5)]
        v = rng.standard_normal(t.fixed_space.dim) @ t.fixed_space.basis
        stab = pointwise_stabilizer(g81, v)
        assert g81.is_subgroup(stab)
        assert canonical_conjugate(g81, stab) in reps


def test_normalizer_of_identity(g33):
    assert len(normalizer(g33, [g33.identity_index])) == g33.order


def test_normalizer_rejects_non_subgroup(g81):
    with pytest.raises(ParameterError):
        normalizer(g81, [g81.identity_index, g81.generators[0]])


@pytest.mark.parametrize("ell", [1, 2])
def test_normalizers_of_h_and_h_prime(g8_groups, ell):
    g = g8_groups[ell]
    h, hp = h_pair(g)
    n1, n2 = normalizer(g, h), normalizer(g, hp)
    assert n1 == n2
    assert 2 * len(n1) == g.order


def test_fix_h_plus_fix_h_prime(g81):
    h, hp = h_pair(g81)
    b = np.vstack([fixed_subspace(g81, h).basis, fixed_subspace(g81, hp).basis])
    assert numerical_rank(b) == 8


def test_elements_outside_normalizer_swap_fixed_spaces(g81):
    h, hp = h_pair(g81)
    fh, fhp = fixed_subspace(g81, h), fixed_subspace(g81, hp)
    inside = set(normalizer(g81, h))
    for i in range(g81.order):
        if i in inside:
            continue
        image = g81.matrices[i] @ fh.basis.T
        assert np.abs(image - fhp.projector @ image).max() < 1e-9


@pytest.mark.parametrize("ell, order", [(1, 48), (2, 80)])
def test_weyl_order(g8_groups, ell, order):
    h, _ = h_pair(g8_groups[ell])
    assert weyl_action(g8_groups[ell], h).order == order


@pytest.mark.parametrize("ell", [1, 2])
def test_weyl_isomorphic_to_g3(g8_groups, ell):
    g = g8_groups[ell]
    h, _ = h_pair(g)
    res = verify_weyl_is_g3(g, h, g.params["tau"])
    assert res and res.status == "isomorphic"


def test_isomorphism_rejects_different_orders(g3_groups):
    res = find_isomorphism(g3_groups[3], g3_groups[5])
    assert not res and res.status == "not isomorphic"


def test_omega_exponents():
    assert omega_exponents(3) == {"q1": 8, "q2": 9, "q3": 5, "c": 3}
    five = omega_exponents(5)
    assert five["q2"] == 5 and five["q1"] == 24


def test_omega_words_lie_in_normalizer(g8_groups):
    for ell in (1, 2):
        rep = verify_omega_formulas(ell, group=g8_groups[ell])
        assert all(c.in_normalizer and c.block_diagonal for c in rep.checks)


def test_omega_block_equations_tau3(g81):
    rep = verify_omega_formulas(1, group=g81)
    assert rep.passed, [(c.name, c.deviation, c.matching_exponents) for c in rep.failures()]


@pytest.mark.parametrize("ell", [1, 2])
def test_omega_block_equations_mirrored_convention(ell):
    tau = 1 + 2 * ell
    rep = verify_omega_formulas(ell, conjugate_right=True, zeta_power=4 * tau - 1, e_power=2 * tau - 1)
    assert rep.passed
