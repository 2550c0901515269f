"""Essential paths: kernels, dimension counts, decomposition, factorization."""

import math

import numpy as np
import pytest

from su3paths import (
    Decomposer,
    DecompositionError,
    EdgeTag,
    GraphError,
    PathGrading,
    PathVector,
    PeelStep,
    SuffixSegment,
    cell_system,
    decompose_space,
    enumerate_paths,
    enumerate_triangles,
    essential_basis,
    essential_dims,
    factorize_path,
    is_structurally_essential,
    kernel_operators,
    make_path,
    parse_word,
    raw_kernel,
    replay_record,
    spectral_data,
    verify_decomposition,
    words_of_type,
)

PHI = (1.0 + math.sqrt(5.0)) / 2.0
E5_SBB_COEF = 0.7356603157342366


def _coef_on(vec: PathVector, g, vertices):
    basis = enumerate_paths(g, vec.grading)
    for coef, idx in vec.support():
        if basis[idx].vertices == tuple(vertices):
            return coef
    return 0.0


def test_words_of_type():
    assert [
        "".join(t.value for t in w) for w in words_of_type(1, 1)
    ] == ["bs", "sb"]
    assert len(words_of_type(2, 1)) == 3
    assert len(words_of_type(2, 2)) == 6
    assert words_of_type(0, 0) == ((),)


def test_kernel_operator_kinds(a2, a2_cells):
    ops = kernel_operators(a2, a2_cells, PathGrading("3", "8", parse_word("ssb")))
    assert [op.kind for op in ops] == ["ANNIHILATION", "CUP"]
    assert kernel_operators(a2, a2_cells, PathGrading("1", "3", parse_word("s"))) == ()


def test_raw_kernel_orthonormal(a2, a2_cells):
    grading = PathGrading("3", "3", parse_word("bs"))
    null, svals = raw_kernel(a2, a2_cells, grading)
    assert null.shape == (2, 1)
    assert len(svals) > 0
    assert np.allclose(null.conj().T @ null, np.eye(1), atol=1e-12)


def test_frozen_kernel_ratio_mixed(a2, a2_cells):
    # 3 -> 3 word bs: essential vector (3 1 3) - sqrt(1/phi) (3 8 3)
    eb = essential_basis(a2, a2_cells, PathGrading("3", "3", parse_word("bs")))
    assert eb.dim == 1 and eb.raw_dim == 1 and not eb.excluded_by_length
    v = eb.vectors[0]
    c1 = _coef_on(v, a2, ("3", "1", "3"))
    c8 = _coef_on(v, a2, ("3", "8", "3"))
    assert abs(c8 / c1 + math.sqrt(1.0 / PHI)) < 1e-9


def test_frozen_kernel_ratio_like(a2, a2_cells):
    # 3 -> 8 word ss: essential vector (3 6 8) - sqrt(phi) (3 3b 8)
    eb = essential_basis(a2, a2_cells, PathGrading("3", "8", parse_word("ss")))
    assert eb.dim == 1
    v = eb.vectors[0]
    ratio = _coef_on(v, a2, ("3", "3b", "8")) / _coef_on(v, a2, ("3", "6", "8"))
    assert abs(ratio + math.sqrt(PHI)) < 1e-9


def test_essential_dims_a2_totals(a2, a2_cells):
    for tp, total in [
        ((0, 0), 6),
        ((1, 0), 9),
        ((0, 1), 9),
        ((2, 0), 6),
        ((0, 2), 6),
        ((1, 1), 18),
    ]:
        rep = essential_dims(a2, a2_cells, tp)
        assert rep.matches_fusion, (tp, rep.mismatches[:3])
        assert int(rep.total.sum()) == total
    rep = essential_dims(a2, a2_cells, (1, 1))
    assert set(rep.per_word) == {"bs", "sb"}
    for m in rep.per_word.values():
        assert np.array_equal(m, rep.fusion)


def test_essential_dims_e5_totals(e5, e5_cells):
    for tp, total in [((1, 0), 24), ((0, 1), 24), ((2, 0), 36), ((1, 1), 96)]:
        rep = essential_dims(e5, e5_cells, tp)
        assert rep.matches_fusion, (tp, rep.mismatches[:3])
        assert int(rep.total.sum()) == total


def test_essential_dims_beyond_level(a2, a2_cells):
    with pytest.raises(GraphError):
        essential_dims(a2, a2_cells, (2, 1))


def test_zero_cells_break_the_count(a2):
    zeros = cell_system(a2, {t: 0.0 for t in enumerate_triangles(a2)})
    rep = essential_dims(a2, zeros, (2, 0))
    assert not rep.matches_fusion
    assert any(ess > fus for _, _, _, ess, fus in rep.mismatches)
    # one-step spaces carry no operator, so they still match
    assert essential_dims(a2, zeros, (1, 0)).matches_fusion


def test_level_clause_exclusions(a2, a2_cells):
    # closed-triangle loops: nonzero joint kernel at type (2,1)/(1,2),
    # discarded by the length clause
    for vertices, word in [
        (("1", "3", "8", "6b"), "sbs"),
        (("6", "8", "3b", "1"), "sbs"),
        (("6b", "3b", "3", "6"), "sbs"),
        (("1", "3b", "8", "6"), "bsb"),
        (("6b", "8", "3", "1"), "bsb"),
        (("6", "3", "3b", "6b"), "bsb"),
    ]:
        p = make_path(a2, vertices, word)
        eb = essential_basis(a2, a2_cells, p.grading)
        assert eb.raw_dim > 0
        assert eb.excluded_by_length
        assert eb.dim == 0 and eb.vectors == ()


def test_structurally_essential_paths_sit_in_kernel(a2, a2_cells):
    for vertices in [("1", "3", "6"), ("6", "8", "6b"), ("6b", "3b", "1")]:
        p = make_path(a2, vertices, "ss")
        assert is_structurally_essential(a2, a2_cells, p)
        v = PathVector.from_path(a2, p)
        for op in kernel_operators(a2, a2_cells, p.grading):
            out = op.apply(v).coefficients
            assert out.size == 0 or np.abs(out).max() < 1e-12
    # a path moved by a triangle is not singly essential
    q = make_path(a2, ("3", "6", "8"), "ss")
    assert not is_structurally_essential(a2, a2_cells, q)


def test_decompose_small_space(a2, a2_cells):
    rep = decompose_space(a2, a2_cells, PathGrading("3", "3", parse_word("bs")))
    assert (rep.dim_total, rep.dim_kernel, rep.dim_raised) == (2, 1, 1)
    assert rep.raised_dims == (1,)
    assert rep.dim_essential == 1 and not rep.excluded_by_length
    assert max(v for _, v in rep.residual_items) < 1e-10
    assert np.allclose(
        rep.projector_essential + rep.projector_raised, np.eye(2), atol=1e-10
    )


def test_decompose_excluded_grading(a2, a2_cells):
    rep = decompose_space(a2, a2_cells, PathGrading("1", "6b", parse_word("sbs")))
    assert rep.excluded_by_length
    assert rep.dim_kernel > 0 and rep.dim_essential == 0


def test_decomposer_data_guard(a2, a2_cells, e5, e5_cells):
    dec = Decomposer(e5, e5_cells)
    with pytest.raises(ValueError):
        decompose_space(a2, a2_cells, PathGrading("3", "3", parse_word("bs")), dec)


def test_verify_decomposition_sweeps(a2, a2_cells, e5, e5_cells):
    for g, cells in [(a2, a2_cells), (e5, e5_cells)]:
        rep = verify_decomposition(g, cells, max_len=3)
        assert rep["failures"] == 0
        assert rep["gradings"] > 0
        for key in (
            "hermitian",
            "idempotent",
            "orthogonal",
            "completeness",
            "essential_raised_overlap",
        ):
            assert rep[key] < 1e-8, (g.name, key, rep[key])


def test_factorize_cap_peel(a2, a2_cells):
    p = make_path(a2, ("3", "3b", "3"), "sb")
    rec = factorize_path(a2, a2_cells, p)
    assert rec.core.vertices == ("3",)
    assert len(rec.events) == 1
    (step,) = rec.peels
    assert step.kind == "CAP" and step.vertex == "3b"
    assert step.first_tag is EdgeTag.SIGMA
    assert abs(step.weight - 1.0) < 1e-12
    out = replay_record(a2, a2_cells, rec)
    assert abs(_coef_on(out, a2, p.vertices) - 1.0) < 1e-12


def test_factorize_creation_peel_e5(e5, e5_cells):
    p = make_path(e5, ("1_3", "2_4", "2_3", "2_2"), "sbb")
    rec = factorize_path(e5, e5_cells, p)
    assert rec.core.vertices == ("1_3", "2_4", "2_2")
    (step,) = rec.peels
    assert step.kind == "CREATION" and step.vertex == "2_3"
    assert abs(step.weight - E5_SBB_COEF) < 1e-9
    assert is_structurally_essential(e5, e5_cells, rec.core)
    out = replay_record(e5, e5_cells, rec)
    assert abs(_coef_on(out, e5, p.vertices) - E5_SBB_COEF) < 1e-9


def test_factorize_splits_suffix(a2, a2_cells):
    p = make_path(a2, ("3", "3b", "3", "6"), "sbs")
    rec = factorize_path(a2, a2_cells, p)
    kinds = [type(e).__name__ for e in rec.events]
    assert kinds == ["SuffixSegment", "PeelStep"]
    assert rec.segments[0].path.vertices == ("3", "6")
    assert rec.core.vertices == ("3",)
    out = replay_record(a2, a2_cells, rec)
    assert abs(_coef_on(out, a2, p.vertices) - 1.0) < 1e-12


def test_factorize_essential_path_is_trivial(a2, a2_cells):
    p = make_path(a2, ("1", "3", "6"), "ss")
    rec = factorize_path(a2, a2_cells, p)
    assert rec.events == () and rec.core == p
    out = replay_record(a2, a2_cells, rec)
    assert abs(_coef_on(out, a2, p.vertices) - 1.0) < 1e-12


def test_factorize_replay_sweep(a2, a2_cells):
    from su3paths import iter_gradings

    for grading in iter_gradings(a2, 3):
        for p in enumerate_paths(a2, grading):
            rec = factorize_path(a2, a2_cells, p)
            out = replay_record(a2, a2_cells, rec)
            assert abs(_coef_on(out, a2, p.vertices)) > 1e-9, str(p)
            if is_structurally_essential(a2, a2_cells, p):
                assert rec.events == ()
