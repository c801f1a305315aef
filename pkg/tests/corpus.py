"""Shared quivers and representations for the test suite.

Module-level frozen fixtures; the builders return fresh dicts so tests can
mutate their copies safely.  Expected values asserted against these live in
the individual test files next to the oracle that produced them.
"""

from qgl.linalg import QQ
from qgl.quivers import Arrow, Quiver
from qgl.reps import direct_sum, make_rep, simple_rep


def quiver(name, vertices, arrows):
    return Quiver(name, tuple(vertices), tuple(Arrow(*a) for a in arrows))


A2 = quiver("a2", ["1", "2"], [("a", "1", "2")])
A3 = quiver("a3", ["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3")])
# middle vertex is the only sink
A3M = quiver("a3m", ["1", "2", "3"], [("a", "1", "2"), ("b", "3", "2")])
K2 = quiver("k2", ["1", "2"], [("a", "1", "2"), ("b", "1", "2")])
LOOP = quiver("loop", ["1"], [("a", "1", "1")])
TWO_LOOP = quiver("twoloop", ["1"], [("a", "1", "1"), ("b", "1", "1")])
C3 = quiver("c3", ["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")])
D4 = quiver("d4", ["1", "2", "3", "c"], [("a", "1", "c"), ("b", "2", "c"), ("g", "3", "c")])

K2_12 = make_rep(K2, QQ, {"1": 1, "2": 2}, {"a": [[1], [0]], "b": [[0], [1]]})
K2_23 = make_rep(
    K2,
    QQ,
    {"1": 2, "2": 3},
    {"a": [[1, 0], [0, 1], [0, 0]], "b": [[0, 0], [1, 0], [0, 1]]},
)
A2_P1 = make_rep(A2, QQ, {"1": 1, "2": 1}, {"a": [[1]]})
A2_S1 = simple_rep(A2, QQ, "1")
A2_S2 = simple_rep(A2, QQ, "2")
A2_13 = make_rep(A2, QQ, {"1": 1, "2": 3}, {"a": [[1], [0], [0]]})
A2_14 = make_rep(A2, QQ, {"1": 1, "2": 4}, {"a": [[1], [0], [0], [0]]})
A3_ID = make_rep(A3, QQ, {"1": 1, "2": 1, "3": 1}, {"a": [[1]], "b": [[1]]})
A3_S3 = simple_rep(A3, QQ, "3")
A3M_12 = make_rep(A3M, QQ, {"1": 1, "2": 2, "3": 1}, {"a": [[1], [0]], "b": [[0], [1]]})
LOOP_J2 = make_rep(LOOP, QQ, {"1": 2}, {"a": [[0, 0], [1, 0]]})
# companion matrix of x^2 + 1: invariant lines exist only when -1 is a square
LOOP_ROT = make_rep(LOOP, QQ, {"1": 2}, {"a": [[0, -1], [1, 0]]})
C3_PATH = make_rep(C3, QQ, {"1": 1, "2": 1, "3": 1}, {"a": [[1]], "b": [[1]], "c": [[0]]})
D4_STAR = make_rep(
    D4,
    QQ,
    {"1": 1, "2": 1, "3": 1, "c": 2},
    {"a": [[1], [0]], "b": [[0], [1]], "g": [[1], [1]]},
)

A2_P1_S2 = direct_sum([A2_P1, A2_S2])

# exceptional representations with a forest coefficient quiver (liftable)
EXCEPTIONAL = (
    ("k2_12", K2_12),
    ("k2_23", K2_23),
    ("a2_p1", A2_P1),
    ("a2_s1", A2_S1),
    ("a2_s2", A2_S2),
    ("a3_id", A3_ID),
    ("d4_star", D4_STAR),
)

# rigid decomposable corpus: (label, DirectSum, e)
RIGID_SUMS = (
    ("a2_p1+s2 e=11", direct_sum([A2_P1, A2_S2]), {"1": 1, "2": 1}),
    ("a2_p1+s2 e=01", direct_sum([A2_P1, A2_S2]), {"1": 0, "2": 1}),
    ("a2_p1+s2 e=12", direct_sum([A2_P1, A2_S2]), {"1": 1, "2": 2}),
    ("k2_12^2 e=01", direct_sum([K2_12, K2_12]), {"1": 0, "2": 1}),
    ("k2_12^2 e=12", direct_sum([K2_12, K2_12]), {"1": 1, "2": 2}),
    ("a2_s2^2 e=01", direct_sum([A2_S2, A2_S2]), {"1": 0, "2": 1}),
    ("a2_p1^2 e=11", direct_sum([A2_P1, A2_P1]), {"1": 1, "2": 1}),
    ("a3_p1+s3 e=011", direct_sum([A3_ID, A3_S3]), {"1": 0, "2": 1, "3": 1}),
    ("a3_p1+s3 e=001", direct_sum([A3_ID, A3_S3]), {"1": 0, "2": 0, "3": 1}),
    ("d4_star^2 e=c1", direct_sum([D4_STAR, D4_STAR]), {"1": 0, "2": 0, "3": 0, "c": 1}),
    ("a2_s1+p1 e=10", direct_sum([A2_S1, A2_P1]), {"1": 1, "2": 0}),
    ("a2_s1+p1 e=11", direct_sum([A2_S1, A2_P1]), {"1": 1, "2": 1}),
)

# girth growth cases: (base quiver, liftable representation, base girth)
GIRTH_CASES = (
    ("loop_j2", LOOP_J2, 1),
    ("k2_12", K2_12, 2),
    ("c3_path", C3_PATH, 3),
)

# tree-rigid chart instances: (label, rep, e); chart dimension <= 3
CHART_CASES = (
    ("a2_12 e=01", A2_P1_S2.rep, {"1": 0, "2": 1}),
    ("a2_12 e=11", A2_P1_S2.rep, {"1": 1, "2": 1}),
    ("a2_13 e=02", A2_13, {"1": 0, "2": 2}),
    ("a2_13 e=12", A2_13, {"1": 1, "2": 2}),
    ("a2_14 e=03", A2_14, {"1": 0, "2": 3}),
    ("a3_id e=011", A3_ID, {"1": 0, "2": 1, "3": 1}),
    ("a3_id e=001", A3_ID, {"1": 0, "2": 0, "3": 1}),
    ("a3m_12 e=d", A3M_12, {"1": 1, "2": 2, "3": 1}),
    ("a3m_12 e=010", A3M_12, {"1": 0, "2": 1, "3": 0}),
    ("d4_star e=c1", D4_STAR, {"1": 0, "2": 0, "3": 0, "c": 1}),
    ("d4_star e=d", D4_STAR, {"1": 1, "2": 1, "3": 1, "c": 2}),
)

# grading fixed-point cases for liftable members: (label, rep, e)
GRADED_CASES = (
    ("k2_12 e=01", K2_12, {"1": 0, "2": 1}),
    ("k2_12 e=11", K2_12, {"1": 1, "2": 1}),
    ("k2_23 e=12", K2_23, {"1": 1, "2": 2}),
    ("a2_p1 e=10", A2_P1, {"1": 1, "2": 0}),
    ("a2_p1 e=11", A2_P1, {"1": 1, "2": 1}),
    ("a2_s1 e=10", A2_S1, {"1": 1, "2": 0}),
    ("a3_id e=011", A3_ID, {"1": 0, "2": 1, "3": 1}),
    ("d4_star e=c1", D4_STAR, {"1": 0, "2": 0, "3": 0, "c": 1}),
)


def _two_loop_5():
    # b1 -a-> b2 -b-> b4 and b1 -b-> b3 -a-> b5: the basis graph is a tree
    # but b4, b5 share the character a+b, so the lifted support is a square
    a = [[0] * 5 for _ in range(5)]
    b = [[0] * 5 for _ in range(5)]
    a[1][0] = 1
    a[4][2] = 1
    b[2][0] = 1
    b[3][1] = 1
    return make_rep(TWO_LOOP, QQ, {"1": 5}, {"a": a, "b": b})


TWO_LOOP_5 = _two_loop_5()


def char_ball(q, radius):
    """Characters reachable from (v, 0) within ``radius`` cover steps."""
    from qgl.covers import Character

    seen = {(v, Character()) for v in q.vertices}
    frontier = list(seen)
    for _ in range(radius):
        nxt = []
        for v, chi in frontier:
            for a in q.out_arrows[v]:
                s = (a.dst, chi.add(Character.unit(a.name)))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
            for a in q.in_arrows[v]:
                s = (a.src, chi.sub(Character.unit(a.name)))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return {chi for _, chi in seen}
