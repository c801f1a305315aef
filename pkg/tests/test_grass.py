"""Grassmannian counting, fixed loci for both torus actions, attractor flows."""

import pytest

from corpus import (
    A2_13,
    A2_14,
    A2_P1,
    A2_P1_S2,
    A3_ID,
    CHART_CASES,
    D4_STAR,
    GRADED_CASES,
    K2_12,
    K2_23,
    LOOP_ROT,
    RIGID_SUMS,
)
from qgl.covers import GradedRepresentation, lift_from_coefficient_quiver
from qgl.errors import ValidationError, VerificationError
from qgl.grass import (
    SubrepPoint,
    attractor_flow,
    bb_limit,
    count_subreps,
    counting_polynomial,
    enumerate_subreps,
    grading_action,
    grading_fixed_components,
    summand_action,
    summand_fixed_components,
)
from qgl.linalg import GF, Subspace
from qgl.reps import direct_sum, euler_form, reduce_rep, reflect

F2 = GF(2)

E01 = {"1": 0, "2": 1}
E11 = {"1": 1, "2": 1}


def dim_vec(m, e):
    return {v: e.get(v, 0) for v in m.quiver.vertices}


def ds_mod(ds, q):
    return direct_sum([reduce_rep(s, q) for s in ds.summands])


def test_enumerate_examples():
    m = reduce_rep(A2_P1_S2.rep, 2)
    pts = list(enumerate_subreps(m, E01))
    assert len(pts) == 3
    for p in pts:
        assert p.is_subrep(m)
        assert p.dims() == E01
    # unique line through the image of M_a
    for q in (2, 3, 5):
        mq = reduce_rep(A2_P1_S2.rep, q)
        pts = list(enumerate_subreps(mq, E11))
        assert len(pts) == 1
        assert pts[0].at("2").contains_vector((1, 0))


def test_enumerate_edge_dims():
    m = reduce_rep(K2_12, 3)
    zero = {"1": 0, "2": 0}
    assert count_subreps(m, zero) == 1
    assert count_subreps(m, dict(m.dims)) == 1
    with pytest.raises(ValidationError):
        count_subreps(m, {"1": 2, "2": 0})
    with pytest.raises(ValidationError):
        list(enumerate_subreps(A2_P1, E01))  # rationals


def test_count_k2_lines():
    for q in (2, 3, 5, 7):
        assert count_subreps(reduce_rep(K2_12, q), E01) == q + 1


def test_counting_polynomial_examples():
    p = counting_polynomial(K2_12, E01, (2, 3, 5))
    assert p.coeffs == (1, 1) and p.degree == 1 and p.leading == 1
    assert str(p) == "1,1"
    # held-out prime 7 agrees too
    assert counting_polynomial(K2_12, E01, (2, 3, 5, 7)).coeffs == (1, 1)
    p = counting_polynomial(A2_P1_S2.rep, E11)
    assert p.coeffs == (1,)
    assert p.degree == 0 == euler_form(A2_P1_S2.rep.quiver, E11, {"1": 0, "2": 1})
    assert counting_polynomial(K2_12, {"1": 0, "2": 0}).coeffs == (1,)
    # empty Grassmannian: zero polynomial
    p = counting_polynomial(K2_12, E11)
    assert p.is_zero() and p.degree is None


def test_counting_polynomial_more():
    assert counting_polynomial(A2_13, {"1": 0, "2": 2}).coeffs == (1, 1, 1)
    assert counting_polynomial(A2_14, {"1": 0, "2": 3}).coeffs == (1, 1, 1, 1)
    e = {"1": 0, "2": 0, "3": 0, "c": 1}
    assert counting_polynomial(D4_STAR, e).coeffs == (1, 1)


def test_counting_polynomial_degree_is_chart_dim():
    for label, m, e in CHART_CASES:
        p = counting_polynomial(m, e)
        form = euler_form(m.quiver, e, {v: m.dims[v] - dim_vec(m, e)[v] for v in m.quiver.vertices})
        assert not p.is_zero(), label
        assert p.degree == form, label
        assert p.leading == 1, label


def test_counting_polynomial_held_out_failure():
    # invariant lines of a rotation exist iff -1 is a square mod p
    with pytest.raises(VerificationError, match="held-out prime 3"):
        counting_polynomial(LOOP_ROT, {"1": 1}, (5, 13, 3))


def test_counting_polynomial_input_checks():
    with pytest.raises(ValidationError):
        counting_polynomial(reduce_rep(K2_12, 5), E01)
    with pytest.raises(ValidationError):
        counting_polynomial(K2_12, E01, (2, 3))  # too few primes


# label -> (total coeffs, chi, number of splittings)
SUMMAND_FIXED = {
    "a2_p1+s2 e=11": ((1,), 1, 2),
    "a2_p1+s2 e=01": ((1, 1), 2, 2),
    "a2_p1+s2 e=12": ((1,), 1, 1),
    "k2_12^2 e=01": ((1, 1, 1, 1), 4, 2),
    "k2_12^2 e=12": ((1, 1), 2, 6),
    "a2_s2^2 e=01": ((1, 1), 2, 2),
    "a2_p1^2 e=11": ((1, 1), 2, 4),
    "a3_p1+s3 e=011": ((1,), 1, 2),
    "a3_p1+s3 e=001": ((1, 1), 2, 2),
    "d4_star^2 e=c1": ((1, 1, 1, 1), 4, 2),
    "a2_s1+p1 e=10": ((1,), 1, 2),
    "a2_s1+p1 e=11": ((1, 1), 2, 2),
}


@pytest.mark.parametrize("label,ds,e", RIGID_SUMS, ids=[r[0] for r in RIGID_SUMS])
def test_summand_fixed_components(label, ds, e):
    coeffs, chi, ncomp = SUMMAND_FIXED[label]
    fc = summand_fixed_components(ds, e)
    assert fc.mode == "polynomial"
    assert fc.total.coeffs == coeffs
    assert fc.total(1) == chi
    assert len(fc.components) == ncomp
    total_chi = 0
    for key, polys in fc.components:
        assert len(key) == len(ds.summands)
        per_summand = [sum(part) for part in key]
        assert sum(per_summand) == sum(dim_vec(ds.rep, e).values())
        prod = 1
        for p in polys:
            prod *= p(1)
        total_chi += prod
    assert total_chi == chi


def test_summand_fixed_spec_rows():
    fc = summand_fixed_components(A2_P1_S2, E11)
    comps = {key: tuple(p.coeffs for p in val) for key, val in fc.components}
    assert comps == {
        ((1, 1), (0, 0)): ((1,), (1,)),
        ((1, 0), (0, 1)): ((), (1,)),
    }
    two = RIGID_SUMS[3][1]  # k2_12^2
    fc = summand_fixed_components(two, E01)
    comps = {key: tuple(p.coeffs for p in val) for key, val in fc.components}
    assert comps == {
        ((0, 0), (0, 1)): ((1,), (1, 1)),
        ((0, 1), (0, 0)): ((1, 1), (1,)),
    }
    # e = 0: the single empty splitting, product 1
    zero = {v: 0 for v in two.rep.quiver.vertices}
    fc = summand_fixed_components(two, zero)
    assert len(fc.components) == 1 and fc.total.coeffs == (1,)


# label -> (total coeffs or int, number of admissible e-hats)
GRADING_FIXED = {
    "k2_12 e=01": ((1, 1), 2),
    "k2_12 e=11": ((), 2),
    "k2_23 e=12": ((1, 1), 6),
    "a2_p1 e=10": ((), 1),
    "a2_p1 e=11": ((1,), 1),
    "a2_s1 e=10": ((1,), 1),
    "a3_id e=011": ((1,), 1),
    "d4_star e=c1": ((1, 1), 1),
}


@pytest.mark.parametrize("label,m,e", GRADED_CASES, ids=[c[0] for c in GRADED_CASES])
def test_grading_fixed_components(label, m, e):
    coeffs, ncomp = GRADING_FIXED[label]
    g = lift_from_coefficient_quiver(m).graded
    fc = grading_fixed_components(g, e)
    assert fc.mode == "polynomial"
    assert fc.total.coeffs == coeffs
    assert len(fc.components) == ncomp
    assert sum(1 for _, p in fc.components if not p.is_zero()) <= ncomp


def test_grading_fixed_components_finite_field():
    g = lift_from_coefficient_quiver(K2_12).graded
    for q in (2, 3):
        gq = GradedRepresentation(g.window, reduce_rep(g.rep, q))
        fc = grading_fixed_components(gq, E01)
        assert fc.mode == "count"
        assert fc.total == 2  # graded lines, one per vertex-2 character
        assert sum(c for _, c in fc.components) == 2


def test_grading_fixed_e_equals_d():
    g = lift_from_coefficient_quiver(K2_12).graded
    fc = grading_fixed_components(g, dict(K2_12.dims))
    assert len(fc.components) == 1
    ((key, poly),) = fc.components
    assert poly.coeffs == (1,)


def test_bb_limit_examples():
    ds = A2_P1_S2
    for q in (2, 5):
        mq = reduce_rep(ds.rep, q)
        pt = SubrepPoint.of(
            mq.quiver,
            {
                "1": Subspace.zero(mq.field, 1),
                "2": Subspace.from_rows(mq.field, 2, [[1, 1]]),
            },
        )
        assert pt.is_subrep(mq)
        dsq = ds_mod(ds, q)
        lo = bb_limit(pt, summand_action(dsq, (0, 1)))
        assert lo.at("2") == Subspace.from_rows(mq.field, 2, [[1, 0]])
        hi = bb_limit(pt, summand_action(dsq, (1, 0)))
        assert hi.at("2") == Subspace.from_rows(mq.field, 2, [[0, 1]])
        # fixed points stay put, limits are idempotent
        assert bb_limit(lo, summand_action(dsq, (0, 1))).at("2") == lo.at("2")


def test_bb_limit_rejects_degenerate_weights():
    dsq = ds_mod(A2_P1_S2, 2)
    with pytest.raises(ValidationError):
        summand_action(dsq, (1, 1))


def test_bb_limit_lands_in_fixed_locus():
    dsq = ds_mod(A2_P1_S2, 3)
    action = summand_action(dsq)
    for pt in enumerate_subreps(dsq.rep, E01):
        lim = bb_limit(pt, action)
        assert lim.is_subrep(dsq.rep)
        # fixed points are exactly the block-diagonal subspaces
        for v in dsq.rep.quiver.vertices:
            split = sum(
                lim.at(v).intersect(block_span(action, v, k)).dim
                for k in range(len(dsq.summands))
            )
            assert split == lim.at(v).dim
        assert bb_limit(lim, action).as_dict() == lim.as_dict()


def block_span(action, v, k):
    n = action.rep.dims[v]
    field = action.rep.field
    for idx, ofs, d, w in action.blocks[v]:
        if idx == k:
            rows = []
            for i in range(d):
                row = [0] * n
                row[ofs + i] = 1
                rows.append(row)
            return Subspace.from_rows(field, n, rows)
    return Subspace.zero(field, n)


FLOW_K2SQ_E01 = {
    2: (15, ((((0, 0), (0, 1)), 3, 3, 0), (((0, 0), (1, 0)), 3, 12, 2))),
    3: (40, ((((0, 0), (0, 1)), 4, 4, 0), (((0, 0), (1, 0)), 4, 36, 2))),
}


def test_attractor_flow_k2_square():
    two = RIGID_SUMS[3][1]
    for q, (total, entries) in FLOW_K2SQ_E01.items():
        flow = attractor_flow(summand_action(ds_mod(two, q)), E01)
        assert flow.q == q and flow.total == total
        assert flow.entries == entries
        assert sum(t for _, _, t, _ in flow.entries) == total


def test_attractor_flow_a2_sum():
    flow = attractor_flow(summand_action(ds_mod(A2_P1_S2, 3)), E01)
    assert flow.total == 4
    assert flow.entries == (
        (((0,), (0, 1)), 1, 1, 0),
        (((0,), (1, 0)), 1, 3, 1),
    )


@pytest.mark.parametrize("label,ds,e", RIGID_SUMS, ids=[r[0] for r in RIGID_SUMS])
def test_attractor_flow_partitions_and_divides(label, ds, e):
    for q in (2, 3):
        flow = attractor_flow(summand_action(ds_mod(ds, q)), e)
        assert sum(t for _, _, t, _ in flow.entries) == flow.total
        for key, cnt, tally, k in flow.entries:
            if cnt:
                assert tally == cnt * q**k


@pytest.mark.parametrize("label,m,e", GRADED_CASES, ids=[c[0] for c in GRADED_CASES])
def test_attractor_flow_grading(label, m, e):
    g = lift_from_coefficient_quiver(m).graded
    for q in (2, 3):
        gq = GradedRepresentation(g.window, reduce_rep(g.rep, q))
        flow = attractor_flow(grading_action(gq), e)
        assert sum(t for _, _, t, _ in flow.entries) == flow.total
        for key, cnt, tally, k in flow.entries:
            if cnt:
                assert tally == cnt * q**k


def test_attractor_flow_empty():
    g = lift_from_coefficient_quiver(K2_12).graded
    gq = GradedRepresentation(g.window, reduce_rep(g.rep, 2))
    flow = attractor_flow(grading_action(gq), E11)
    assert flow.total == 0 and flow.entries == ()


def test_reflection_counts_match_birationally():
    # degree and leading coefficient agree; defect bounded by 4 q^{deg-1}
    cases = [
        (A2_P1_S2.rep, "2", E11),
        (K2_23, "2", {"1": 1, "2": 2}),
        (A3_ID, "3", {"1": 0, "2": 1, "3": 1}),
    ]
    for m, l, e in cases:
        refl, se = reflect(m, l, e)
        p0 = counting_polynomial(m, e)
        p1 = counting_polynomial(refl, se)
        assert p0.degree == p1.degree
        assert p0.leading == p1.leading
        for q in (2, 3, 5):
            bound = 4 * q ** (p0.degree - 1) if p0.degree else 4
            assert abs(p0(q) - p1(q)) <= bound
    # source side
    refl, se = reflect(A2_P1_S2.rep, "1", E11)
    p0 = counting_polynomial(A2_P1_S2.rep, E11)
    p1 = counting_polynomial(refl, se)
    assert (p0.degree, p0.leading) == (p1.degree, p1.leading)
