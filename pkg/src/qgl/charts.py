"""Rational charts on quiver Grassmannians of rigid forest representations.

The chart peels one leaf at a time.  A sink leaf contributes the big cell
of extensions of the image of the neighbor space; a source leaf carrying
e = 0 is simply dropped; any other source leaf is first reflected
(turning it into a sink of the reflected stage) and its point is
recovered as the full preimage of the neighbor space; once no arrows
remain, every vertex carries a plain big Schubert cell.  Cell coordinates
compose to a map A^dim -> Gr_e(M) defined away from rank and pivot
degenerations; dim must come out equal to <e, d-e>, which pins the chart
as a candidate birational parameterization.

Leaves are tried sinks first, in lexicographic order, then sources; a
failed leaf (negative cell, non-injective source map, inapplicable
reflection) falls through to the next one deterministically.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ChartError,
    OutOfDomainError,
    ReflectionError,
    ValidationError,
)
from .grass import SubrepPoint, check_dim_vector, count_subreps
from .linalg import Subspace, next_prime
from .quivers import structure_report
from .reps import (
    Representation,
    delete_vertex,
    euler_form,
    reduce_rep,
    reflect,
    rigidity_report,
)

SAMPLE_SEED = 7747


@dataclass(frozen=True)
class PeelStep:
    leaf: str
    mode: str  # 'sink' | 'source' | 'drop' | 'base'
    arrow: str | None
    rank: int
    pivots: tuple  # complement columns frozen at build time, ascending
    cell: tuple  # (rows, cols) of the coordinate cell

    def __post_init__(self):
        if self.mode not in ("sink", "source", "drop", "base"):
            raise ValidationError(f"bad peel mode {self.mode!r}")
        if self.cell[0] < 0 or self.cell[1] < 0:
            raise ValidationError("negative cell")


@dataclass(frozen=True)
class RationalChart:
    rep: Representation
    e: dict
    steps: tuple  # outermost peel first
    dim: int


@dataclass(frozen=True)
class _Frame:
    step: PeelStep
    arrow: str | None  # resolved incident arrow; None for base steps
    rep: Representation  # stage before this peel, original orientation
    e: dict
    peel_rep: Representation  # where the sink logic runs (reflected for source)
    peel_e: dict


def _incident_arrow(cur: Representation, step: PeelStep) -> str:
    """The single incident arrow at the leaf, direction matching the mode."""
    q = cur.quiver
    if q.degree(step.leaf) != 1:
        raise ChartError(f"peel at {step.leaf!r} which is not a leaf")
    side = q.in_arrows if step.mode == "sink" else q.out_arrows
    arrows = side[step.leaf]
    if len(arrows) != 1:
        kind = "sink" if step.mode == "sink" else "source"
        raise ChartError(f"{step.mode} step at {step.leaf!r} which is not a {kind} leaf")
    if step.arrow is not None and step.arrow != arrows[0].name:
        raise ChartError(f"{step.mode} step at {step.leaf!r} does not match the arrow")
    return arrows[0].name


def _stage_chain(rep: Representation, e: dict, steps) -> tuple:
    """Replay the peels, validating each recorded step against the stage.

    Steps may leave the arrow unresolved (None); the unique incident arrow
    is filled in.  Raises ChartError when the chart does not fit the
    representation (also the case when a mod-q reduction degenerates and
    shapes shift).
    """
    frames = []
    cur, cure = rep, dict(e)
    for step in steps:
        if step.leaf not in cur.quiver.vertex_index:
            raise ChartError(f"step leaf {step.leaf!r} is not a stage vertex")
        if step.mode == "base":
            if cur.quiver.degree(step.leaf) != 0:
                raise ChartError(f"base step at {step.leaf!r} but arrows remain there")
            _check_step_shape(step, cur.dims[step.leaf], cure[step.leaf], 0)
            frames.append(_Frame(step, None, cur, dict(cure), cur, dict(cure)))
            cur = delete_vertex(cur, step.leaf)
            cure.pop(step.leaf)
            continue
        arrow = _incident_arrow(cur, step)
        if step.mode in ("sink", "drop"):
            if step.mode == "drop":
                # source leaf with e = 0: forgetting it is an isomorphism
                if cure[step.leaf] != 0:
                    raise ChartError(f"drop step at {step.leaf!r} needs e = 0 there")
                if step.rank != 0 or step.pivots != () or step.cell != (0, cur.dims[step.leaf]):
                    raise ChartError(f"malformed drop step at {step.leaf!r}")
            else:
                _check_step_shape(step, cur.dims[step.leaf], cure[step.leaf], step.rank)
            frames.append(_Frame(step, arrow, cur, dict(cure), cur, dict(cure)))
            cur = delete_vertex(cur, step.leaf)
            cure.pop(step.leaf)
            continue
        # source: reflect, then the sink shape laws apply to the reflection
        try:
            refl, se = reflect(cur, step.leaf, cure)
        except ReflectionError as ex:
            raise ChartError(f"reflection failed at {step.leaf!r}: {ex}") from None
        _check_step_shape(step, refl.dims[step.leaf], se[step.leaf], step.rank)
        frames.append(_Frame(step, arrow, cur, dict(cure), refl, se))
        cur = delete_vertex(refl, step.leaf)
        cure = {v: se[v] for v in cur.quiver.vertices}
    if cur.quiver.vertices:
        raise ChartError("steps do not exhaust the quiver")
    return tuple(frames)


def _check_step_shape(step: PeelStep, d_l: int, e_l: int, r: int):
    if e_l < 0 or e_l > d_l:
        raise ChartError(f"stage dimension vector out of range at {step.leaf!r}")
    if step.cell != (e_l - r, d_l - e_l):
        raise ChartError(
            f"cell {step.cell} at {step.leaf!r} does not match the stage "
            f"(expected {(e_l - r, d_l - e_l)})"
        )
    if len(step.pivots) != d_l - r:
        raise ChartError(f"pivot count at {step.leaf!r} does not match the stage")
    if list(step.pivots) != sorted(set(step.pivots)) or any(
        p < 0 or p >= d_l for p in step.pivots
    ):
        raise ChartError(f"bad pivot columns at {step.leaf!r}")


def _lift_rows(field, ambient: int, pivots, nrows: int, cell_coords, ncols: int):
    """Rows std_pivots[i] + sum_j t[i][j] std_pivots[nrows + j]."""
    rows = []
    for i in range(nrows):
        r = [field.zero()] * ambient
        r[pivots[i]] = field.one()
        for j in range(ncols):
            r[pivots[nrows + j]] = cell_coords[i * ncols + j]
        rows.append(r)
    return rows


def _eval_frames(frames, coords) -> SubrepPoint:
    """Evaluate, consuming coordinates innermost (base) first."""
    if not frames:
        raise ValidationError("empty chart")
    field = frames[0].rep.field
    sizes = [f.step.cell[0] * f.step.cell[1] for f in frames]
    if len(coords) != sum(sizes):
        raise ValidationError(f"need {sum(sizes)} coordinates, got {len(coords)}")
    coords = [field.normalize(c) for c in coords]
    spaces = {}
    pos = 0
    for f in reversed(frames):
        step = f.step
        ncell = step.cell[0] * step.cell[1]
        cell = coords[pos : pos + ncell]
        pos += ncell
        if step.mode == "base":
            v = step.leaf
            d_v = f.rep.dims[v]
            rows = _lift_rows(field, d_v, step.pivots, step.cell[0], cell, step.cell[1])
            spaces[v] = Subspace.from_rows(field, d_v, rows)
            continue
        if step.mode == "drop":
            spaces[step.leaf] = Subspace.zero(field, f.rep.dims[step.leaf])
            continue
        peel = f.peel_rep
        arrow = peel.quiver.arrow_map[f.arrow]
        k = arrow.src
        mat = peel.mats[f.arrow]
        im = spaces[k].image(mat)
        if im.dim != step.rank:
            raise OutOfDomainError(
                f"leaf map rank {im.dim} != {step.rank} at {step.leaf!r}", "rank"
            )
        d_l = peel.dims[step.leaf]
        span_rows = list(im.basis.entries)
        for p in step.pivots:
            r = [field.zero()] * d_l
            r[p] = field.one()
            span_rows.append(r)
        if Subspace.from_rows(field, d_l, span_rows).dim != d_l:
            raise OutOfDomainError(
                f"frozen pivot complement degenerates at {step.leaf!r}", "pivot"
            )
        lifted = _lift_rows(field, d_l, step.pivots, step.cell[0], cell, step.cell[1])
        u_l = Subspace.from_rows(field, d_l, list(im.basis.entries) + lifted)
        assert u_l.dim == f.peel_e[step.leaf]
        if step.mode == "sink":
            spaces[step.leaf] = u_l
            continue
        # source: u_l lives on the reflected stage and only witnesses the
        # checks; the point at the leaf is the full preimage of the
        # neighbor space under the original leaf map
        orig = f.rep.mats[f.arrow]  # d_k x d_l, leaf -> neighbor
        pre = spaces[k].preimage(orig)
        if pre.dim != f.e[step.leaf]:
            raise OutOfDomainError(
                f"preimage at reflected source {step.leaf!r} has dimension "
                f"{pre.dim}, expected {f.e[step.leaf]}",
                "unreflect",
            )
        spaces[step.leaf] = pre
    root = frames[0].rep
    pt = SubrepPoint.of(root.quiver, spaces)
    if not pt.is_subrep(root):
        raise ChartError("chart evaluation produced a non-subrepresentation")
    return pt


def _greedy_complement(im: Subspace, d: int) -> tuple:
    field = im.field
    cur = im
    out = []
    for c in range(d):
        vec = [field.zero()] * d
        vec[c] = field.one()
        if not cur.contains_vector(vec):
            out.append(c)
            cur = cur.sum(Subspace.from_rows(field, d, [vec]))
    return tuple(out)


def _sample_coords(field, dim: int, root_total: int, samples: int):
    # over the rationals, integer coordinates below the first prime past
    # 2 * total dim already separate the generic strata
    vals = field.p if field.is_finite else next_prime(2 * max(1, root_total))
    yield (0,) * dim
    yield (1,) * dim
    rng = random.Random(SAMPLE_SEED + dim)
    for _ in range(samples):
        yield tuple(rng.randrange(vals) for _ in range(dim))


def _generic_rank(peel_rep, l, arrow_name, inner_m, inner_e, inner_steps, root_total, samples):
    """Sampled generic rank of the leaf map over the inner chart,
    plus the complement pivots frozen at the first max-rank sample."""
    frames = _stage_chain(inner_m, inner_e, inner_steps)
    inner_dim = sum(s.cell[0] * s.cell[1] for s in inner_steps)
    arrow = peel_rep.quiver.arrow_map[arrow_name]
    mat = peel_rep.mats[arrow_name]
    d_l = peel_rep.dims[l]
    best = None
    pivots = None
    for coords in _sample_coords(peel_rep.field, inner_dim, root_total, samples):
        try:
            pt = _eval_frames(frames, coords)
        except OutOfDomainError:
            continue
        im = pt.at(arrow.src).image(mat)
        if best is None or im.dim > best:
            best = im.dim
            pivots = _greedy_complement(im, d_l)
    if best is None:
        raise ChartError(f"inner chart yielded no valid sample point at leaf {l!r}")
    return best, pivots


def _build(m: Representation, e: dict, root_total: int, samples: int) -> list:
    q = m.quiver
    if not q.arrows:
        return [
            PeelStep(v, "base", None, 0, tuple(range(m.dims[v])), (e[v], m.dims[v] - e[v]))
            for v in q.vertices
        ]
    leaves = [v for v in q.vertices if q.degree(v) == 1]
    sink_leaves = sorted(v for v in leaves if q.in_arrows[v])
    source_leaves = sorted(v for v in leaves if q.out_arrows[v])
    failures = []
    for l in sink_leaves:
        try:
            return _peel_sink(m, e, l, root_total, samples)
        except ChartError as ex:
            failures.append(f"sink {l!r}: {ex}")
    for l in source_leaves:
        try:
            return _peel_source(m, e, l, root_total, samples)
        except ChartError as ex:
            failures.append(f"source {l!r}: {ex}")
    raise ChartError("no leaf admits a peel: " + "; ".join(failures))


def _peel_sink(m, e, l, root_total, samples) -> list:
    beta = m.quiver.in_arrows[l][0]
    inner_m = delete_vertex(m, l)
    inner_e = {v: e[v] for v in inner_m.quiver.vertices}
    inner_steps = _build(inner_m, inner_e, root_total, samples)
    r, pivots = _generic_rank(m, l, beta.name, inner_m, inner_e, inner_steps, root_total, samples)
    if r > e[l]:
        raise ChartError(
            f"leaf map has generic rank {r} > e = {e[l]} at sink leaf {l!r}; "
            "the peel projection is not dominant"
        )
    step = PeelStep(l, "sink", beta.name, r, pivots, (e[l] - r, m.dims[l] - e[l]))
    return [step] + inner_steps


def _peel_source(m, e, l, root_total, samples) -> list:
    beta = m.quiver.out_arrows[l][0]
    if e[l] == 0:
        # nothing to choose at the leaf and no condition on the rest
        inner_m = delete_vertex(m, l)
        inner_e = {v: e[v] for v in inner_m.quiver.vertices}
        step = PeelStep(l, "drop", beta.name, 0, (), (0, m.dims[l]))
        return [step] + _build(inner_m, inner_e, root_total, samples)
    if m.mats[beta.name].rank() != m.dims[l]:
        raise ChartError(
            f"leaf map at source leaf {l!r} is not injective; reflection does "
            "not preserve the points there"
        )
    try:
        refl, se = reflect(m, l, e)
    except ReflectionError as ex:
        raise ChartError(f"reflection at {l!r} not applicable: {ex}") from None
    if se[l] > refl.dims[l]:
        raise ChartError(
            f"reflected dimension vector exceeds the reflected space at {l!r}"
        )
    inner_m = delete_vertex(refl, l)
    inner_e = {v: se[v] for v in inner_m.quiver.vertices}
    inner_steps = _build(inner_m, inner_e, root_total, samples)
    r, pivots = _generic_rank(refl, l, beta.name, inner_m, inner_e, inner_steps, root_total, samples)
    if r > se[l]:
        raise ChartError(
            f"reflected leaf map has generic rank {r} > {se[l]} at {l!r}; "
            "the reflected peel is not dominant"
        )
    step = PeelStep(l, "source", beta.name, r, pivots, (se[l] - r, refl.dims[l] - se[l]))
    return [step] + inner_steps


def build_chart(m: Representation, e: dict, samples: int = 64) -> RationalChart:
    """Build the peel chart for Gr_e(M); M must be rigid on a forest.

    The affine dimension of the chart must equal <e, d-e>; a mismatch
    (possible when a peel is not dominant in edge configurations) raises
    ChartError rather than returning a chart that cannot cover the space.
    """
    shape = structure_report(m.quiver)
    if shape.girth is not None:
        raise ValidationError("charts need a forest-shaped quiver")
    if not rigidity_report(m).rigid:
        raise ValidationError("charts need a rigid representation")
    steps = _build(m, dict(e), m.total_dim, samples)
    return chart_from_steps(m, e, steps)


def chart_from_steps(m: Representation, e: dict, steps) -> RationalChart:
    """Assemble a chart from recorded steps (e.g. a parsed chart file):
    resolve the incident arrows, revalidate every shape against the
    representation, and enforce the affine dimension identity."""
    e = check_dim_vector(m, e)
    frames = _stage_chain(m, e, steps)
    resolved = tuple(
        s
        if s.arrow == f.arrow
        else PeelStep(s.leaf, s.mode, f.arrow, s.rank, s.pivots, s.cell)
        for s, f in zip(steps, frames)
    )
    dim = sum(s.cell[0] * s.cell[1] for s in resolved)
    de = {v: m.dims[v] - e[v] for v in m.quiver.vertices}
    form = euler_form(m.quiver, e, de)
    if dim != form:
        raise ChartError(
            f"chart dimension {dim} does not match <e, d-e> = {form}; "
            "the peel schedule cannot dominate this Grassmannian"
        )
    return RationalChart(m, e, resolved, dim)


def generic_rank_at_leaf(
    m: Representation, e: dict, l: str, inner_chart: RationalChart, samples: int = 64
) -> int:
    """Sampled maximal rank of the leaf map over inner-chart points.

    l must be a sink leaf of m; inner_chart parameterizes the deleted
    problem Gr_{e'}(M').  Over the rationals the sampling runs in F_p with
    p the first prime past twice the total dimension; the all-zero and
    all-one coordinate tuples are always among the samples.
    """
    q = m.quiver
    e = check_dim_vector(m, e)
    if q.degree(l) != 1 or not q.in_arrows[l]:
        raise ChartError(f"{l!r} is not a sink leaf")
    beta = q.in_arrows[l][0]
    total = sum(m.dims.values())
    p = None if m.field.is_finite else next_prime(2 * max(1, total))
    work = m if p is None else reduce_rep(m, p)
    mat = work.mats[beta.name]
    best = None
    for coords in _sample_coords(m.field, inner_chart.dim, total, samples):
        try:
            pt = eval_chart(inner_chart, coords, p)
        except OutOfDomainError:
            continue
        r = pt.at(beta.src).image(mat).dim
        if best is None or r > best:
            best = r
    if best is None:
        raise ChartError(f"inner chart yielded no valid sample point at leaf {l!r}")
    return best


def _eval_rep(chart: RationalChart, q: int | None) -> Representation:
    if q is None:
        return chart.rep
    if chart.rep.field.is_finite:
        if chart.rep.field.p != q:
            raise ValidationError(f"chart lives over {chart.rep.field}, not F{q}")
        return chart.rep
    return reduce_rep(chart.rep, q)


def eval_chart(chart: RationalChart, coords, q: int | None = None) -> SubrepPoint:
    """Evaluate at a coordinate tuple (innermost cell first), optionally
    reducing an integral chart modulo q first."""
    rep = _eval_rep(chart, q)
    frames = _stage_chain(rep, chart.e, chart.steps)
    return _eval_frames(frames, coords)


@dataclass(frozen=True)
class ChartVerification:
    q: int
    dim: int
    domain: int  # sample tuples that evaluated to a point
    image: int  # distinct points hit
    collisions: int  # domain - image
    out_of_domain: int
    ood_kinds: tuple  # ((kind, count), ...) sorted
    total: int  # points of the Grassmannian over F_q
    ratio: Fraction  # image / total


def verify_chart(
    chart: RationalChart,
    q: int,
    dim_bound: int = 4,
    grid_bound: int = 10**6,
) -> ChartVerification:
    """Exhaust the chart over F_q and compare with the point count.

    The chart is expected to be injective on its domain (collisions 0) and
    to dominate: the image misses only lower-dimensional loci, so the
    ratio tends to 1 as q grows.
    """
    if chart.dim > dim_bound:
        raise ValidationError(f"chart dimension {chart.dim} exceeds the bound {dim_bound}")
    if q ** chart.dim > grid_bound:
        raise ValidationError(f"{q}^{chart.dim} exceeds the grid bound {grid_bound}")
    rep = _eval_rep(chart, q)
    frames = _stage_chain(rep, chart.e, chart.steps)
    seen = set()
    domain = 0
    ood = {}
    for coords in itertools.product(range(q), repeat=chart.dim):
        try:
            pt = _eval_frames(frames, coords)
        except OutOfDomainError as ex:
            ood[ex.kind] = ood.get(ex.kind, 0) + 1
            continue
        domain += 1
        seen.add(tuple((v, u.basis.entries) for v, u in pt.spaces))
    total = count_subreps(rep, chart.e)
    image = len(seen)
    return ChartVerification(
        q,
        chart.dim,
        domain,
        image,
        domain - image,
        sum(ood.values()),
        tuple(sorted(ood.items())),
        total,
        Fraction(image, total) if total else Fraction(0),
    )
