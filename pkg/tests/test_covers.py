"""Cover windows, graded lifts, shift functors, iterated covers, graded Hom/Ext."""

import pytest

from corpus import (
    C3,
    EXCEPTIONAL,
    GIRTH_CASES,
    K2,
    K2_12,
    LOOP,
    LOOP_J2,
    TWO_LOOP,
    TWO_LOOP_5,
    char_ball,
)
from qgl.covers import (
    Character,
    GradedRepresentation,
    build_cover_window,
    graded_homext_check,
    iterate_cover_to_tree,
    lift_from_coefficient_quiver,
    pushdown,
    shift,
)
from qgl.errors import IterationError, LiftError
from qgl.linalg import QQ, Matrix
from qgl.quivers import is_cover, reduced_cycle_girth, structure_report
from qgl.reps import Representation, hom_ext_dims, make_rep

ZERO = Character()
A = Character.unit("a")
B = Character.unit("b")


def nth(chi, n):
    out = ZERO
    step = chi if n >= 0 else chi.neg()
    for _ in range(abs(n)):
        out = out.add(step)
    return out


def test_build_cover_window_loop_line():
    w = build_cover_window(LOOP, {nth(A, k) for k in range(3)})
    assert len(w.quiver.vertices) == 3
    assert len(w.quiver.arrows) == 2
    shape = structure_report(w.quiver)
    assert shape.tree and shape.connected


def test_build_cover_window_k2():
    w = build_cover_window(K2, {ZERO, A, B})
    assert len(w.quiver.vertices) == 6
    names = sorted(a.name for a in w.quiver.arrows)
    assert len(names) == 2
    ar = {a.name: a for a in w.quiver.arrows}
    for nm, chi in (("a", A), ("b", B)):
        (full,) = [a for a in w.quiver.arrows if a.name.startswith(f"{nm}@")]
        assert full.src == w.vertex_id("1", ZERO)
        assert full.dst == w.vertex_id("2", chi)


def test_build_cover_window_empty():
    w = build_cover_window(K2, set())
    assert w.quiver.vertices == () and w.quiver.arrows == ()


def test_window_projection_is_cover_on_interior():
    for base, chars in ((LOOP, {nth(A, k) for k in range(3)}), (K2, {ZERO, A, B})):
        w = build_cover_window(base, chars)
        chk = is_cover(w.to_base, interior=w.interior())
        assert chk.ok
        assert not is_cover(w.to_base).ok  # truncation shows at the boundary


def test_lift_loop_j2():
    lift = lift_from_coefficient_quiver(LOOP_J2)
    g = lift.graded
    assert g.dim_at("1", ZERO) == 1 and g.dim_at("1", A) == 1
    sup = g.support_quiver()
    assert len(sup.vertices) == 2 and len(sup.arrows) == 1
    assert structure_report(sup).tree


def test_lift_loop_identity_fails():
    ident = make_rep(LOOP, QQ, {"1": 1}, {"a": [[1]]})
    with pytest.raises(LiftError, match="cycle"):
        lift_from_coefficient_quiver(ident)


def test_lift_k2_star():
    g = lift_from_coefficient_quiver(K2_12).graded
    assert g.support_chars() == (ZERO, A, B)
    sup = g.support_quiver()
    assert len(sup.vertices) == 3 and len(sup.arrows) == 2
    assert structure_report(sup).tree


def permuted(m: Representation, order: dict) -> Representation:
    mats = {}
    for a in m.quiver.arrows:
        po, pi = order[a.dst], order[a.src]
        src = m.mats[a.name]
        rows = tuple(tuple(src.entries[po[i]][pi[j]] for j in range(src.ncols)) for i in range(src.nrows))
        mats[a.name] = Matrix(m.field, src.nrows, src.ncols, rows)
    return Representation(m.quiver, m.field, dict(m.dims), mats)


@pytest.mark.parametrize(
    "label,m",
    list(EXCEPTIONAL) + [("loop_j2", LOOP_J2), ("two_loop_5", TWO_LOOP_5)],
    ids=lambda v: v if isinstance(v, str) else "",
)
def test_pushdown_of_lift_is_identity(label, m):
    lift = lift_from_coefficient_quiver(m)
    pd = pushdown(lift.graded)
    assert pd.rep.dims == m.dims
    assert pd.rep == permuted(m, lift.basis_order)
    # blocks record the grading: per-vertex dims add up
    for v in m.quiver.vertices:
        assert sum(d for _, _, d in pd.blocks[v]) == m.dims[v]


def test_pushdown_single_piece():
    w = build_cover_window(LOOP, {ZERO, A})
    dims = {w.vertex_id("1", ZERO): 0, w.vertex_id("1", A): 2}
    g = GradedRepresentation(w, make_rep(w.quiver, QQ, dims))
    pd = pushdown(g)
    assert pd.rep.dims == {"1": 2}
    assert pd.rep.mats["a"].is_zero()


def test_shift_examples():
    g = lift_from_coefficient_quiver(LOOP_J2).graded
    assert shift(g, ZERO).rep == g.rep
    s = shift(g, A)
    assert set(s.support_chars()) == {A.neg(), ZERO}
    # additivity and invertibility
    s2 = shift(shift(g, A), A.neg())
    assert s2.support_chars() == g.support_chars()
    for c in g.support_chars():
        assert s2.dim_at("1", c) == g.dim_at("1", c)


def test_shift_preserves_pushdown():
    g = lift_from_coefficient_quiver(K2_12).graded
    before = pushdown(g).rep
    after = pushdown(shift(g, B)).rep
    assert before.dims == after.dims
    assert hom_ext_dims(before, after) == (1, 0)


@pytest.mark.parametrize("label,m,girth", GIRTH_CASES, ids=[c[0] for c in GIRTH_CASES])
def test_iterate_already_tree(label, m, girth):
    assert reduced_cycle_girth(m.quiver) == girth
    g = lift_from_coefficient_quiver(m).graded
    res = iterate_cover_to_tree(g)
    assert res.n == 0
    assert res.girths == (None,)
    assert structure_report(res.graded.support_quiver()).tree


def test_iterate_two_loop_square():
    g = lift_from_coefficient_quiver(TWO_LOOP_5).graded
    assert reduced_cycle_girth(g.support_quiver()) == 4
    res = iterate_cover_to_tree(g)
    assert res.n == 1
    assert res.girths == (4, None)
    assert structure_report(res.graded.support_quiver()).tree
    assert res.tree_rep.total_dim == 5
    with pytest.raises(IterationError, match="4"):
        iterate_cover_to_tree(g, max_n=0)


def test_graded_homext_loop_j2():
    g = lift_from_coefficient_quiver(LOOP_J2).graded
    rec = graded_homext_check(g, g)
    assert (rec.base_hom, rec.base_ext) == (2, 2)
    assert (rec.hom_sum, rec.ext_sum) == (2, 2)
    assert rec.contributions == (
        (ZERO, 1, 0),
        (A.neg(), 1, 0),
        (A, 0, 1),
        (nth(A, 2), 0, 1),
    )


@pytest.mark.parametrize("label,m", EXCEPTIONAL, ids=[c[0] for c in EXCEPTIONAL])
def test_graded_homext_exceptional(label, m):
    g = lift_from_coefficient_quiver(m).graded
    rec = graded_homext_check(g, g)
    assert (rec.base_hom, rec.base_ext) == (1, 0)
    assert (rec.hom_sum, rec.ext_sum) == (1, 0)
    assert all(ext == 0 for _, _, ext in rec.contributions)


def test_graded_homext_zero_rep():
    zero = lift_from_coefficient_quiver(make_rep(LOOP, QQ, {"1": 0})).graded
    j2 = lift_from_coefficient_quiver(LOOP_J2).graded
    rec = graded_homext_check(zero, j2)
    assert (rec.base_hom, rec.base_ext) == (0, 0)
    assert (rec.hom_sum, rec.ext_sum) == (0, 0)
    assert rec.contributions == ()


def test_window_girth_growth():
    # lifted windows of radius 2*max(girth,2) around 0
    expected = {LOOP: None, K2: None, C3: None, TWO_LOOP: 4}
    sizes = {}
    for q, want in expected.items():
        l = reduced_cycle_girth(q)
        chars = char_ball(q, 2 * max(l, 2))
        w = build_cover_window(q, chars)
        sizes[q.name] = len(chars)
        assert reduced_cycle_girth(w.quiver) == want
    assert sizes == {"loop": 9, "k2": 13, "c3": 29, "twoloop": 41}
