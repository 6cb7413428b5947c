import numpy as np
import pytest

from so8lab.bifurcation import (
    EPS_REG,
    circle_scalar,
    find_branches,
    g3_branches,
    g3_isotropy_spaces,
    g3_phase_family,
    lift_branches_g8,
    lifted_fields,
    sweep,
    tangent_field,
)
from so8lab.equivariants import g3_cubic_basis, radial_cubic
from so8lab.errors import ParameterError
from so8lab.repanalysis import Subspace, normalizer, pointwise_stabilizer

GENERIC_A = (-2.0, 0.0, 0.7, 3.0)


def sphere_points(n, count=100, seed=0):
    v = np.random.default_rng(seed).standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_radial_field_has_no_tangent_part():
    t = tangent_field(radial_cubic())
    assert np.abs(t(sphere_points(4))).max() < 1e-14


def test_t31_vanishes_on_fix_h1():
    t31 = tangent_field(g3_cubic_basis()[0])
    fix = g3_isotropy_spaces()["H1"]
    pts = sphere_points(2) @ fix.basis
    assert np.abs(t31(pts)).max() < 1e-14


def test_t31_closed_form():
    t31 = tangent_field(g3_cubic_basis()[0])
    v = sphere_points(4)
    rho1 = v[:, 0] ** 2 + v[:, 1] ** 2
    rho2 = v[:, 2] ** 2 + v[:, 3] ** 2
    expected = np.column_stack(
        [
            rho2 * (rho2 - rho1) * v[:, 0],
            rho2 * (rho2 - rho1) * v[:, 1],
            rho1 * (rho1 - rho2) * v[:, 2],
            rho1 * (rho1 - rho2) * v[:, 3],
        ]
    )
    assert np.abs(t31(v) - expected).max() < 1e-13


def test_tangency_of_constructed_fields(g81):
    fam = g3_phase_family(0.7)
    v = sphere_points(4)
    for t in (fam.t1, fam.t2):
        assert np.abs(np.einsum("bi,bi->b", t(v), v)).max() < 1e-9
    lf = lifted_fields(1, g81)
    w = sphere_points(8)
    for t in (lf.t1, lf.t2):
        assert np.abs(np.einsum("bi,bi->b", t(w), w)).max() < 1e-9


def test_phase_field_equivariant(g33):
    fam = g3_phase_family(0.7)
    v = sphere_points(4, count=30, seed=1)
    for g in g33.matrices:
        assert np.abs(fam(v @ g.T) - fam(v) @ g.T).max() < 1e-8


def test_circle_scalar_needs_a_plane():
    with pytest.raises(ParameterError):
        circle_scalar(Subspace(4, np.eye(4)[:3]), 0.0)


def test_h2_zeros_at_multiples_of_quarter_pi():
    rep = find_branches(g3_isotropy_spaces()["H2"], 0.0)
    assert len(rep.zeros) == 8 and rep.all_regular and not rep.degenerate
    assert np.allclose(rep.angles, np.arange(8) * np.pi / 4, atol=1e-9)


def test_h2_zero_set_contains_coordinate_and_diagonal_loci():
    for a in GENERIC_A:
        rep = find_branches(g3_isotropy_spaces()["H2"], a)
        pts = np.array([z.point for z in rep.zeros])
        assert np.any(np.abs(pts[:, 0]) < 1e-9)
        assert np.any(np.abs(pts[:, 2]) < 1e-9)
        assert np.any((np.abs(pts[:, 0] ** 2 - pts[:, 2] ** 2) < 1e-9) & (np.abs(pts[:, 0]) > 0.1))


def test_h1_zero_set_contains_both_diagonals():
    for a in GENERIC_A:
        rep = find_branches(g3_isotropy_spaces()["H1"], a)
        pts = np.array([z.point for z in rep.zeros])
        assert np.any((np.abs(pts[:, 0] - pts[:, 1]) < 1e-9) & (np.abs(pts[:, 0]) > 0.1))
        assert np.any((np.abs(pts[:, 0] + pts[:, 1]) < 1e-9) & (np.abs(pts[:, 0]) > 0.1))


def test_counts_constant_for_generic_a():
    counts = {a: [len(r.zeros) for r in g3_branches(a)] for a in GENERIC_A}
    assert len({tuple(c) for c in counts.values()}) == 1
    for a in GENERIC_A:
        for r in g3_branches(a):
            assert r.all_regular and not r.degenerate


def test_regular_zeros_have_nonvanishing_derivative():
    for r in g3_branches(0.7):
        assert all(abs(z.derivative) > EPS_REG for z in r.zeros)


def test_h2_degenerate_at_minus_one():
    rep = find_branches(g3_isotropy_spaces()["H2"], -1.0)
    assert rep.degenerate


def test_h3_degenerate_at_minus_four():
    rep = find_branches(g3_isotropy_spaces()["H3"], -4.0)
    assert rep.degenerate


def test_h3_degenerate_at_one():
    # on Fix(H3) the field t32 equals -t31, so the circle scalar carries the factor (a - 1)
    rep = find_branches(g3_isotropy_spaces()["H3"], 1.0)
    assert rep.degenerate
    assert not find_branches(g3_isotropy_spaces()["H3"], -4.0).degenerate


def test_h1_never_degenerate():
    for a in (-4.0, -1.0, 0.0, 1.0):
        assert not find_branches(g3_isotropy_spaces()["H1"], a).degenerate


def test_weyl_elements_permute_zeros(g33):
    for label, fix in g3_isotropy_spaces().items():
        rep = find_branches(fix, 0.7, label=label)
        pts = np.array([z.point for z in rep.zeros])
        h = pointwise_stabilizer(g33, fix)
        for g in normalizer(g33, h):
            moved = pts @ g33.matrices[g].T
            dist = np.abs(moved[:, None, :] - pts[None, :, :]).max(axis=2).min(axis=1)
            assert dist.max() < 1e-8


def test_lift_l1_a0(g81):
    reps = lift_branches_g8(1, 0.0, group=g81)
    assert len(reps) == 3
    flat = {r.label.split()[0]: len(r.zeros) for r in g3_branches(0.0)}
    for r in reps:
        assert r.all_regular and not r.degenerate
        assert len(r.zeros) == flat[r.label.split()[0]]
        assert all(z.fixed_dim % 2 == 0 for z in r.zeros)


def test_lift_l1_h2_degenerate(g81):
    reps = {r.label.split()[0]: r for r in lift_branches_g8(1, -1.0, group=g81)}
    assert reps["H2"].degenerate
    assert not reps["H1"].degenerate


def test_sweep_rows():
    rows = sweep(-2.0, 0.0, 2)
    assert [r[0] for r in rows[::3]] == [-2.0, -1.0, 0.0]
    assert rows[4][1] == "H2" and rows[4][3] is True
    with pytest.raises(ParameterError):
        sweep(0.0, 1.0, 0)
