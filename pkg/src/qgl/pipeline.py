"""End-to-end rationality verification.

The five stages mirror the reduction chain of the main theorem: check
rigidity, split into indecomposable summands with the fixed-locus Euler
identity, lift each summand along its coefficient quiver, iterate the
covering until the support is a forest, then parametrize every graded
piece by a rational chart and measure dominance and injectivity over the
requested primes.

Verification failures never raise: each stage records its findings and
the report carries the verdict.  Only unusable input (a finite-field or
non-integral representation) raises ValidationError up front.
"""

from dataclasses import dataclass
from fractions import Fraction

from .charts import build_chart, verify_chart
from .covers import (
    GradedRepresentation,
    graded_homext_check,
    iterate_cover_to_tree,
    lift_from_coefficient_quiver,
    pushdown,
)
from .errors import (
    ChartError,
    DecompositionError,
    IterationError,
    LiftError,
    ValidationError,
    VerificationError,
)
from .grass import (
    attractor_flow,
    check_dim_vector,
    count_subreps,
    grading_action,
    grading_fixed_components,
    summand_fixed_components,
)
from .io import format_dim_vector
from .reps import (
    Representation,
    decompose,
    direct_sum,
    euler_form,
    reduce_rep,
    rep_is_integral,
    rigidity_report,
)

STAGE_NAMES = ("rigidity", "decomposition", "lift", "tree", "charts")


@dataclass(frozen=True)
class StageRecord:
    index: int
    name: str
    ok: bool
    lines: tuple


@dataclass(frozen=True)
class PipelineReport:
    stages: tuple
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def render(self) -> str:
        out = []
        for s in self.stages:
            out.append(f"stage {s.index} {s.name}: {'ok' if s.ok else 'FAIL'}")
            out.extend("  " + ln for ln in s.lines)
        out.append(f"verdict: {self.verdict}")
        return "\n".join(out)


def _fmt_bool(b) -> str:
    return "true" if b else "false"


def _fmt_girths(girths) -> str:
    return "->".join("absent" if g is None else str(g) for g in girths)


def _splits(total: int, bounds) -> list:
    out = []

    def rec(i, left, acc):
        if i == len(bounds):
            if left == 0:
                out.append(tuple(acc))
            return
        for k in range(min(left, bounds[i]) + 1):
            rec(i + 1, left - k, acc + [k])

    rec(0, total, [])
    return out


def _tree_dim_vectors(tree_rep: Representation, to_base, base_quiver, e: dict) -> list:
    """All dim vectors on the tree support that push down to e."""
    fibers = {v: [] for v in base_quiver.vertices}
    for w in sorted(tree_rep.quiver.vertices):
        fibers[to_base.vertex_map[w]].append(w)
    per_base = []
    for v in base_quiver.vertices:
        ws = fibers[v]
        per_base.append([dict(zip(ws, s)) for s in
                         _splits(e[v], [tree_rep.dims[w] for w in ws])])
    out = []

    def rec(i, acc):
        if i == len(per_base):
            out.append(dict(acc))
            return
        for piece in per_base[i]:
            acc.update(piece)
            rec(i + 1, acc)

    rec(0, {})
    return out


def _verify_one_chart(chart, q, lines, label, dim_bound, grid_bound) -> bool:
    v = verify_chart(chart, q, dim_bound=dim_bound, grid_bound=grid_bound)
    lines.append(
        f"{label}: q={q} domain={v.domain} image={v.image} "
        f"collisions={v.collisions} ood={v.out_of_domain} total={v.total} "
        f"ratio={v.ratio.numerator}/{v.ratio.denominator}"
    )
    if v.domain == 0 or v.image == 0:
        lines.append(f"{label}: FAIL empty chart domain at q={q}")
        return False
    tol = Fraction(4, q)
    ok = True
    if 1 - v.ratio > tol:
        lines.append(f"{label}: FAIL dominance 1-{v.ratio} > 4/{q}")
        ok = False
    if Fraction(v.collisions, v.domain) > tol:
        lines.append(f"{label}: FAIL collisions {v.collisions}/{v.domain} > 4/{q}")
        ok = False
    if Fraction(v.out_of_domain, v.domain) > tol:
        lines.append(f"{label}: FAIL out-of-domain {v.out_of_domain}/{v.domain} > 4/{q}")
        ok = False
    return ok


def verify_pipeline(
    m: Representation,
    e: dict,
    qs,
    seed: int = 0,
    chart_dim_bound: int = 4,
    chart_grid_bound: int = 10**6,
) -> PipelineReport:
    if m.field.is_finite:
        raise ValidationError("the verification pipeline needs a rational representation")
    if not rep_is_integral(m):
        raise ValidationError("the verification pipeline needs integral matrix entries")
    e = check_dim_vector(m, e)
    qs = tuple(sorted(set(qs)))
    if not qs:
        raise ValidationError("need at least one prime to verify charts")
    base = m.quiver

    stages = []

    def fail(index, lines):
        stages.append(StageRecord(index, STAGE_NAMES[index], False, tuple(lines)))
        return PipelineReport(
            tuple(stages), f"fail: stage {index} ({STAGE_NAMES[index]})"
        )

    def ok(index, lines):
        stages.append(StageRecord(index, STAGE_NAMES[index], True, tuple(lines)))

    # stage 0: the whole reduction is only available for rigid representations
    rig = rigidity_report(m)
    lines = [
        f"rigid={_fmt_bool(rig.rigid)} exceptional={_fmt_bool(rig.exceptional)} "
        f"end={rig.end_dim} ext={rig.ext_dim}"
    ]
    if not rig.rigid:
        return fail(0, lines)
    ok(0, lines)

    # stage 1: decomposition and the summand fixed-locus Euler identity
    lines = []
    if m.total_dim == 0:
        ok(1, ["zero representation, nothing to decompose"])
        ok(2, ["no summands"])
        ok(3, ["no summands"])
        ok(4, ["the empty Grassmannian point needs no chart"])
        return PipelineReport(tuple(stages), "pass")
    try:
        parts = tuple(
            rep for rep, mult in decompose(m, seed=seed) for _ in range(mult)
        )
    except DecompositionError as ex:
        return fail(1, [f"decomposition failed: {ex}"])
    lines.append(f"summands={len(parts)}")
    for k, p in enumerate(parts):
        lines.append(f"summand {k}: dim {format_dim_vector(p.dims, base)}")
    ds = direct_sum(parts)
    try:
        fc = summand_fixed_components(ds, e)
    except VerificationError as ex:
        lines.append(str(ex))
        return fail(1, lines)
    chi_total = fc.total(1)
    for key, polys in fc.components:
        chi = 1
        for p in polys:
            chi *= p(1)
        split = ";".join(",".join(str(x) for x in part) for part in key)
        lines.append(f"split={split} chi={chi}")
    lines.append(f"identity {_sum_chi(fc)} = {chi_total}")
    ok(1, lines)

    # per-summand graded dim vectors that occur in some nonzero splitting
    summand_evecs = [[] for _ in parts]
    for key, polys in fc.components:
        if any(p.is_zero() for p in polys):
            continue
        for k, part_key in enumerate(key):
            ev = dict(zip(base.vertices, part_key))
            if any(ev.values()) and ev not in summand_evecs[k]:
                summand_evecs[k].append(ev)

    # stage 2: coefficient-quiver lifts, each one exceptional in the graded sense
    lines = []
    lifts = []
    stage2_ok = True
    for k, p in enumerate(parts):
        prig = rigidity_report(p)
        if not prig.exceptional:
            lines.append(
                f"summand {k}: FAIL not exceptional "
                f"(end={prig.end_dim} ext={prig.ext_dim})"
            )
            stage2_ok = False
            lifts.append(None)
            continue
        try:
            lift = lift_from_coefficient_quiver(p)
        except LiftError as ex:
            lines.append(f"summand {k}: FAIL no coefficient-quiver grading: {ex}")
            stage2_ok = False
            lifts.append(None)
            continue
        try:
            ghe = graded_homext_check(lift.graded, lift.graded)
        except VerificationError as ex:
            lines.append(f"summand {k}: FAIL graded hom/ext: {ex}")
            stage2_ok = False
            lifts.append(None)
            continue
        lifts.append(lift)
        lines.append(
            f"summand {k}: chars={len(lift.graded.support_chars())} "
            f"hom={ghe.hom_sum} ext={ghe.ext_sum}"
        )
    if not stage2_ok:
        return fail(2, lines)
    ok(2, lines)

    # stage 3: iterate the covering until every summand is supported on a forest
    lines = []
    iterations = []
    stage3_ok = True
    for k, lift in enumerate(lifts):
        try:
            it = iterate_cover_to_tree(lift.graded)
        except IterationError as ex:
            lines.append(f"summand {k}: FAIL {ex}")
            stage3_ok = False
            iterations.append(None)
            continue
        iterations.append(it)
        lines.append(f"summand {k}: n={it.n} girths={_fmt_girths(it.girths)}")
    if not stage3_ok:
        return fail(3, lines)
    ok(3, lines)

    # stage 4: grading identity plus a verified chart for every graded piece
    lines = []
    stage4_ok = True
    for k, (lift, it) in enumerate(zip(lifts, iterations)):
        for ev in summand_evecs[k]:
            label = f"summand {k} e={format_dim_vector(ev, base)}"
            try:
                gfc = grading_fixed_components(lift.graded, ev)
            except VerificationError as ex:
                lines.append(f"{label}: FAIL {ex}")
                stage4_ok = False
                continue
            nonzero = sum(1 for _, p in gfc.components if not p.is_zero())
            lines.append(
                f"{label}: graded pieces={nonzero} "
                f"identity {_sum_chi(gfc)} = {gfc.total(1)}"
            )
            for hat in _tree_dim_vectors(it.tree_rep, it.to_base, base, ev):
                if not _chart_piece(
                    it.tree_rep, hat, qs, chart_dim_bound, chart_grid_bound,
                    lines, label,
                ):
                    stage4_ok = False
            if not _dense_attractor(
                lift.graded, ev, base, qs, chart_grid_bound, lines, label
            ):
                stage4_ok = False
    if not stage4_ok:
        return fail(4, lines)
    ok(4, lines)
    return PipelineReport(tuple(stages), "pass")


def _sum_chi(fc) -> int:
    total = 0
    for _, val in fc.components:
        if isinstance(val, tuple):
            chi = 1
            for p in val:
                chi *= p(1)
            total += chi
        elif isinstance(val, int):
            total += val
        else:
            total += val(1)
    return total


def _chart_piece(tree_rep, hat, qs, dim_bound, grid_bound, lines, label) -> bool:
    """Chart and verify one graded piece; True when nothing failed."""
    tq = tree_rep.quiver
    name = format_dim_vector(hat, tq)
    rest = {v: tree_rep.dims[v] - hat[v] for v in tq.vertices}
    dim = euler_form(tq, hat, rest)
    if dim < 0:
        # rigid pieces of negative expected dimension must be empty
        return _piece_without_chart(tree_rep, hat, min(qs), grid_bound, lines,
                                    f"{label} piece {name}",
                                    f"expected dimension {dim} < 0")
    if dim > dim_bound or max(qs) ** dim > grid_bound:
        lines.append(f"{label} piece {name}: skipped (dim {dim} over budget)")
        return True
    try:
        chart = build_chart(tree_rep, hat)
    except (ChartError, ValidationError) as ex:
        return _piece_without_chart(tree_rep, hat, min(qs), grid_bound, lines,
                                    f"{label} piece {name}", str(ex))
    okq = True
    for q in qs:
        try:
            if not _verify_one_chart(chart, q, lines, f"{label} piece {name}",
                                     dim_bound, grid_bound):
                okq = False
        except (ValidationError, VerificationError) as ex:
            lines.append(f"{label} piece {name}: FAIL at q={q}: {ex}")
            okq = False
    return okq


def _dense_attractor(graded, ev, base, qs, grid_bound, lines, label) -> bool:
    """Rationality transfers along the densest attracting cell.

    The piece with the largest attracting set must account for all of the
    Grassmannian up to lower order, and its dimension plus the affine cell
    dimension must recover the expected total.
    """
    pd = pushdown(graded)
    summand = pd.rep
    free = sum(ev[v] * (summand.dims[v] - ev[v]) for v in base.vertices)
    exp_dim = euler_form(base, ev, {v: summand.dims[v] - ev[v] for v in base.vertices})
    ok = True
    for q in qs:
        if q**free > grid_bound:
            lines.append(f"{label}: flow skipped at q={q} (budget)")
            continue
        gq = GradedRepresentation(graded.window, reduce_rep(graded.rep, q))
        try:
            flow = attractor_flow(grading_action(gq), ev)
        except VerificationError as ex:
            lines.append(f"{label}: FAIL flow at q={q}: {ex}")
            ok = False
            continue
        if not flow.entries:
            lines.append(f"{label}: empty at q={q}")
            continue
        key, _, tally, cell = max(flow.entries, key=lambda t: t[2])
        piece_dim = _window_piece_dim(gq, key)
        lines.append(
            f"{label}: q={q} dense piece dim={piece_dim} flow={cell} "
            f"total dim={exp_dim} dominance={tally}/{flow.total}"
        )
        if piece_dim + cell != exp_dim:
            lines.append(
                f"{label}: FAIL dense cell dim {piece_dim}+{cell} != {exp_dim}"
            )
            ok = False
        if 1 - Fraction(tally, flow.total) > Fraction(4, q):
            lines.append(
                f"{label}: FAIL dominance {tally}/{flow.total} at q={q}"
            )
            ok = False
    return ok


def _window_piece_dim(gq: GradedRepresentation, key) -> int:
    """Expected dimension of the graded piece named by a flow component key."""
    pd = pushdown(gq)
    wq = gq.window.quiver
    e_hat = {ident: 0 for ident in wq.vertices}
    for iv, v in enumerate(gq.window.base.vertices):
        for (c, _, _), k in zip(pd.blocks[v], key[iv]):
            e_hat[gq.window.vertex_id(v, c)] = k
    rest = {ident: gq.rep.dims[ident] - e_hat[ident] for ident in wq.vertices}
    return euler_form(wq, e_hat, rest)


def _piece_without_chart(tree_rep, hat, q0, grid_bound, lines, label, reason) -> bool:
    """A piece with no chart is fine only if it is actually empty."""
    free = sum(hat[v] * (tree_rep.dims[v] - hat[v]) for v in tree_rep.quiver.vertices)
    if q0**free > grid_bound:
        lines.append(f"{label}: skipped (no chart: {reason}; emptiness not checkable)")
        return True
    n = count_subreps(reduce_rep(tree_rep, q0), hat)
    if n == 0:
        lines.append(f"{label}: empty (no chart needed)")
        return True
    lines.append(f"{label}: FAIL no chart ({reason}) but {n} points at q={q0}")
    return False
