"""Creation/annihilation/cup/cap operators and the relation verifier."""

import math

import numpy as np
import pytest

from su3paths import (
    EdgeTag,
    GradingMismatch,
    PathGrading,
    annihilation,
    apply_annihilation,
    apply_cap,
    apply_cup,
    cap,
    cap_oriented,
    cell_system,
    collapsed_grading,
    creation,
    cup,
    cup_grading,
    enumerate_paths,
    enumerate_triangles,
    expanded_grading,
    make_path,
    parse_word,
    spectral_data,
    tl_f,
    tl_u,
    verify_adjointness,
    verify_tl,
)

PHI = (1.0 + math.sqrt(5.0)) / 2.0
E5_SBB_COEF = 0.7356603157342366  # |cell| / (1 + sqrt(2)) on the worked 4-step path


def test_grading_surgery():
    from su3paths import cap_grading

    g = PathGrading("3", "8", parse_word("ssb"))
    assert collapsed_grading(g, 1).word == parse_word("bb")
    assert expanded_grading(g, 3).word == parse_word("ssss")
    assert cup_grading(g, 2).word == parse_word("s")
    assert cap_grading(g, 2, EdgeTag.SIGMA).word == parse_word("ssbsb")
    assert cap_grading(g, 2, EdgeTag.SIGMA_BAR).word == parse_word("sbssb")


def test_annihilation_matrix_frozen(a2, a2_cells):
    grading = PathGrading("3", "8", parse_word("ss"))
    op = annihilation(a2, a2_cells, grading, 1)
    assert op.codomain == PathGrading("3", "8", parse_word("b"))
    assert [str(p) for p in enumerate_paths(a2, grading)] == [
        "(3 3b 8)",
        "(3 6 8)",
    ]
    # entries cell/sqrt(mu*mu): sqrt(phi)/phi and phi/phi
    expect = np.array([[math.sqrt(1.0 / PHI), 1.0]])
    assert np.allclose(op.matrix, expect, atol=1e-12)


def test_annihilation_mixed_is_zero_block(a2, a2_cells):
    op = annihilation(a2, a2_cells, PathGrading("3", "3", parse_word("sb")), 1)
    assert not op.matrix.any()


def test_creation_is_adjoint_of_annihilation(a2, a2_cells):
    grading = PathGrading("3", "8", parse_word("ss"))
    ann = annihilation(a2, a2_cells, grading, 1)
    cre = creation(a2, a2_cells, ann.codomain, 1)
    assert cre.codomain == grading
    assert np.allclose(cre.matrix, ann.matrix.conj().T, atol=1e-14)


def test_adjointness_sweep(a2, a2_cells, e5, e5_cells):
    assert verify_adjointness(a2, a2_cells, max_len=4) < 1e-12
    assert verify_adjointness(e5, e5_cells, max_len=3) < 1e-12


def test_e5_contraction_examples(e5, e5_cells):
    # ss pair with no completing triangle: exactly zero
    p = make_path(e5, ("1_3", "2_4", "1_2"), "ss")
    assert not apply_annihilation(e5, e5_cells, p, 1).coefficients.any()

    # mixed-tag slots: zero blocks on both interior positions
    q = make_path(e5, ("1_3", "2_4", "2_3", "1_1"), "sbs")
    assert not apply_annihilation(e5, e5_cells, q, 1).coefficients.any()
    assert not apply_annihilation(e5, e5_cells, q, 2).coefficients.any()

    # bb pair contracting through a skew triangle
    r = make_path(e5, ("1_3", "2_4", "2_3", "2_2"), "sbb")
    out = apply_annihilation(e5, e5_cells, r, 2)
    terms = out.support()
    assert len(terms) == 1
    coef, idx = terms[0]
    assert abs(coef - E5_SBB_COEF) < 1e-9
    target = enumerate_paths(e5, out.grading)[idx]
    assert target.vertices == ("1_3", "2_4", "2_2")


def test_cup_contracts_mixed_return(a2, a2_cells):
    p = make_path(a2, ("3", "3b", "3"), "sb")
    out = apply_cup(a2, a2_cells, p, 1)
    assert out.grading == PathGrading("3", "3", ())
    assert np.allclose(out.coefficients, [1.0])  # sqrt(mu(3b)/mu(3)) = 1

    q = make_path(a2, ("3", "6", "3"), "sb")
    out = apply_cup(a2, a2_cells, q, 1)
    assert abs(out.coefficients[0] - math.sqrt(1.0 / PHI)) < 1e-12

    # like-tag slot: zero block
    r = make_path(a2, ("1", "3", "6"), "ss")
    assert not apply_cup(a2, a2_cells, r, 1).coefficients.any()


def test_cap_cup_loop(a2, a2_cells):
    sd = spectral_data(a2)
    g0 = PathGrading("3", "3", ())
    for tag in (EdgeTag.SIGMA, EdgeTag.SIGMA_BAR):
        cp = cap_oriented(a2, a2_cells, g0, 1, tag)
        loop = cup(a2, a2_cells, cp.codomain, 1).matrix @ cp.matrix
        assert np.allclose(loop, sd.beta * np.eye(1), atol=1e-12)
    both = cap(a2, a2_cells, g0, 1)
    assert [op.codomain.word for op in both] == [parse_word("sb"), parse_word("bs")]


def test_cap_apply(a2, a2_cells):
    p = make_path(a2, ("3", "6"), "s")
    out = apply_cap(a2, a2_cells, p, 1, EdgeTag.SIGMA)
    # one term per out-neighbor of 3, inserted before the step
    terms = {
        enumerate_paths(a2, out.grading)[i].vertices: c for c, i in out.support()
    }
    assert terms == pytest.approx(
        {
            ("3", "3b", "3", "6"): 1.0,
            ("3", "6", "3", "6"): math.sqrt(1.0 / PHI),
        }
    )


def test_tl_u_quadratic(a2, a2_cells):
    sd = spectral_data(a2)
    grading = PathGrading("3", "8", parse_word("ss"))
    u = tl_u(a2, a2_cells, grading, 1)
    assert np.allclose(
        u.matrix @ u.matrix, sd.delta * u.matrix, atol=1e-12
    )
    cre = creation(a2, a2_cells, PathGrading("3", "8", parse_word("b")), 1)
    ann = annihilation(a2, a2_cells, grading, 1)
    assert np.allclose(u.matrix, cre.matrix @ ann.matrix, atol=1e-14)
    # mixed pattern: exactly zero
    assert not tl_u(a2, a2_cells, PathGrading("3", "3", parse_word("sb")), 1).matrix.any()


def test_tl_f_on_runs(a2, a2_cells):
    sd = spectral_data(a2)
    grading = PathGrading("1", "6b", parse_word("ssss"))
    f1 = tl_f(a2, a2_cells, grading, 1).matrix
    f2 = tl_f(a2, a2_cells, grading, 2).matrix
    assert np.allclose(f1 @ f1, sd.delta * sd.beta * f1, atol=1e-10)
    assert np.allclose(f1 @ f2 @ f1, sd.delta**2 * f1, atol=1e-10)


def test_verify_tl_clean(a2, a2_cells):
    rep = verify_tl(a2, a2_cells, max_len=4)
    assert rep.passed(1e-8)
    assert rep.checks > 1000
    assert rep.lemma_constant == pytest.approx(spectral_data(a2).delta ** 2)
    assert rep.lemma_fit == pytest.approx(rep.lemma_constant, abs=1e-8)
    assert set(rep.residuals) == {
        "h1", "h2", "h3", "h4", "lemma", "f_square", "cupcap", "sum_rule",
    }
    s = rep.summary()
    assert s["checks"] == rep.checks and s["max_len"] == 4


def test_verify_tl_e5(e5, e5_cells):
    rep = verify_tl(e5, e5_cells, max_len=3)
    assert rep.passed(1e-8)
    # no 4-runs at this length, so no lemma fit
    assert rep.lemma_fit is None


def test_zero_cells_fail_h1(a2):
    zeros = cell_system(a2, {t: 0.0 for t in enumerate_triangles(a2)})
    rep = verify_tl(a2, zeros, max_len=2)
    assert not rep.passed(1e-8)
    # collapse blocks are all-zero, so the gram defect is the loop value
    assert rep.residuals["h1"] == pytest.approx(spectral_data(a2).delta)
    assert "collapse block" in rep.worst["h1"]
    assert rep.residuals["sum_rule"] > 1.0


def test_compose_and_apply_guards(a2, a2_cells):
    g1 = PathGrading("3", "8", parse_word("ss"))
    g2 = PathGrading("3", "3", parse_word("sb"))
    op1 = annihilation(a2, a2_cells, g1, 1)
    op2 = cup(a2, a2_cells, g2, 1)
    with pytest.raises(GradingMismatch):
        op1.compose(op2)
    vec = apply_cup(a2, a2_cells, make_path(a2, ("3", "3b", "3"), "sb"), 1)
    with pytest.raises(GradingMismatch):
        op1.apply(vec)
    with pytest.raises(ValueError):
        annihilation(a2, a2_cells, g1, 2)  # slot out of range


def test_operator_matrix_immutable(a2, a2_cells):
    op = annihilation(a2, a2_cells, PathGrading("3", "8", parse_word("ss")), 1)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5.0
