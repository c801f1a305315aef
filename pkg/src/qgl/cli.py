"""Command line interface.

Every command takes the quiver file first, then the representation
file(s) the command needs; dimension vectors are given as `--e v=k,...`
with omitted vertices read as 0.  Exit codes: 0 on success, 1 when a
verification assertion is violated, 2 on malformed or inconsistent
input (argparse errors included).

The environment variable QGL_SEED overrides any --seed flag.
"""

import argparse
import os
import sys
from fractions import Fraction

from . import io
from .charts import build_chart, eval_chart, verify_chart
from .covers import (
    GradedRepresentation,
    graded_homext_check,
    iterate_cover_to_tree,
    lift_from_coefficient_quiver,
    pushdown,
)
from .errors import (
    DecompositionError,
    IterationError,
    OutOfDomainError,
    QglError,
    ValidationError,
    VerificationError,
)
from .grass import (
    attractor_flow,
    count_subreps,
    counting_polynomial,
    grading_action,
    grading_fixed_components,
    summand_action,
    summand_fixed_components,
)
from .pipeline import verify_pipeline
from .reps import (
    decompose,
    direct_sum,
    euler_form,
    hom_ext_dims,
    reduce_rep,
    reflect,
    rigidity_report,
)


def _flat_summands(m, seed):
    return [rep for rep, mult in decompose(m, seed=seed) for _ in range(mult)]

VERIFY_FAILURES = (
    VerificationError,
    OutOfDomainError,
    DecompositionError,
    IterationError,
)


def _fmt_bool(b) -> str:
    return "true" if b else "false"


def _fmt_poly(coeffs) -> str:
    if not coeffs:
        return "0"
    return ",".join(str(c) for c in coeffs)


def _fmt_split(key) -> str:
    return ";".join(",".join(str(x) for x in part) for part in key)


def _fmt_girths(girths) -> str:
    return "->".join("absent" if g is None else str(g) for g in girths)


def _seed(args) -> int:
    env = os.environ.get("QGL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"QGL_SEED must be an integer, got {env!r}")
    return args.seed


def _parse_qs(s: str) -> tuple:
    try:
        qs = tuple(int(t) for t in s.split(",") if t.strip())
    except ValueError:
        raise ValidationError(f"bad prime list {s!r}")
    if not qs:
        raise ValidationError("empty prime list")
    return qs


def _parse_coords(s: str) -> tuple:
    out = []
    for t in s.split(","):
        t = t.strip()
        if not t:
            continue
        try:
            out.append(int(t))
        except ValueError:
            out.append(Fraction(t))
    return tuple(out)


def _load(args, want: int):
    """Quiver plus exactly `want` representation objects (graded included)."""
    quiver, pairs = io.parse_inputs(args.files)
    if len(pairs) != want:
        raise ValidationError(
            f"expected {want} representation file(s), got {len(pairs)}"
        )
    return quiver, pairs


def _plain(obj):
    """A Representation for commands that act on the base quiver."""
    if isinstance(obj, GradedRepresentation):
        return pushdown(obj).rep
    return obj


def _at_prime(m, q: int):
    if m.field.is_finite:
        if m.field.p != q:
            raise ValidationError(f"representation is over {m.field}, not F{q}")
        return m
    return reduce_rep(m, q)


# ------------------------------------------------------------------ commands


def _cmd_euler(args, out):
    quiver, _ = io.parse_inputs(args.files)
    d = io.parse_dim_vector(args.d, quiver)
    e = io.parse_dim_vector(args.e, quiver)
    print(f"euler={euler_form(quiver, d, e)}", file=out)
    return 0


def _cmd_homext(args, out):
    _, pairs = _load(args, 2)
    m, n = _plain(pairs[0][1]), _plain(pairs[1][1])
    h, x = hom_ext_dims(m, n)
    print(f"hom={h} ext={x}", file=out)
    return 0


def _cmd_rigid(args, out):
    _, pairs = _load(args, 1)
    r = rigidity_report(_plain(pairs[0][1]))
    print(
        f"rigid={_fmt_bool(r.rigid)} exceptional={_fmt_bool(r.exceptional)} "
        f"end={r.end_dim} ext={r.ext_dim}",
        file=out,
    )
    return 0


def _cmd_decompose(args, out):
    quiver, pairs = _load(args, 1)
    groups = decompose(_plain(pairs[0][1]), seed=_seed(args))
    print(f"summands={sum(mult for _, mult in groups)}", file=out)
    for rep, mult in groups:
        print(
            f"summand dim={io.format_dim_vector(rep.dims, quiver)} mult={mult}",
            file=out,
        )
    return 0


def _cmd_reflect(args, out):
    quiver, pairs = _load(args, 1)
    m = _plain(pairs[0][1])
    e = io.parse_dim_vector(args.e, quiver) if args.e else None
    refl, sigma_e = reflect(m, args.l, e)
    if sigma_e is not None:
        print(f"sigma_e={io.format_dim_vector(sigma_e, refl.quiver)}", file=out)
    print(io.serialize_quiver(refl.quiver), end="", file=out)
    print(io.serialize_rep(refl, pairs[0][0]), end="", file=out)
    return 0


def _cmd_grass(args, out):
    quiver, pairs = _load(args, 1)
    obj = pairs[0][1]
    m = _plain(obj)
    e = io.parse_dim_vector(args.e, quiver)
    if args.action == "count":
        print(f"total={count_subreps(_at_prime(m, args.q), e)}", file=out)
        return 0
    if args.action == "poly":
        primes = _parse_qs(args.qs) if args.qs else None
        poly = counting_polynomial(m, e, primes)
        print(f"poly={_fmt_poly(poly.coeffs)}", file=out)
        return 0
    if args.action == "fixed":
        if isinstance(obj, GradedRepresentation):
            fc = grading_fixed_components(obj, e)
        else:
            ds = direct_sum(_flat_summands(m, _seed(args)))
            fc = summand_fixed_components(ds, e)
        for key, val in fc.components:
            if isinstance(val, tuple):
                cnt = 1
                for p in val:
                    cnt *= p(1)
            elif isinstance(val, int):
                cnt = val
            else:
                cnt = val(1)
            print(f"split={_fmt_split(key)} count={cnt}", file=out)
        if fc.mode == "polynomial":
            print(
                f"total={fc.total(1)} poly={_fmt_poly(fc.total.coeffs)}", file=out
            )
        else:
            print(f"total={fc.total}", file=out)
        return 0
    # limit: tally the attracting sets of the torus flow at one prime
    if isinstance(obj, GradedRepresentation):
        gq = GradedRepresentation(obj.window, _at_prime(obj.rep, args.q))
        action = grading_action(gq)
    else:
        mq = _at_prime(m, args.q)
        action = summand_action(direct_sum(_flat_summands(mq, _seed(args))))
    flow = attractor_flow(action, e)
    for key, cnt, tally, k in flow.entries:
        print(
            f"split={_fmt_split(key)} count={cnt} flow={tally} cell=q^{k}",
            file=out,
        )
    print(f"total={flow.total}", file=out)
    return 0


def _as_graded(obj) -> GradedRepresentation:
    if isinstance(obj, GradedRepresentation):
        return obj
    return lift_from_coefficient_quiver(obj).graded


def _cmd_cover(args, out):
    _, pairs = io.parse_inputs(args.files)
    if args.action == "check":
        if len(pairs) not in (1, 2):
            raise ValidationError("cover check takes one or two representation files")
    elif len(pairs) != 1:
        raise ValidationError(f"cover {args.action} takes one representation file")
    name, obj = pairs[0]
    if args.action == "lift":
        lift = lift_from_coefficient_quiver(_plain(obj))
        print(io.serialize_graded(lift.graded, name), end="", file=out)
        return 0
    if args.action == "iterate":
        it = iterate_cover_to_tree(_as_graded(obj), max_n=args.max_n)
        print(f"n={it.n}", file=out)
        print(f"girths={_fmt_girths(it.girths)}", file=out)
        return 0
    gm = _as_graded(obj)
    gn = _as_graded(pairs[1][1]) if len(pairs) == 2 else gm
    ghe = graded_homext_check(gm, gn)
    print(
        f"hom={ghe.base_hom} ext={ghe.base_ext} "
        f"hom_sum={ghe.hom_sum} ext_sum={ghe.ext_sum}",
        file=out,
    )
    return 0


def _cmd_chart(args, out):
    quiver, pairs = _load(args, 1)
    m = _plain(pairs[0][1])
    if args.action == "build":
        e = io.parse_dim_vector(args.e, quiver)
        chart = build_chart(m, e, samples=args.samples)
        print(io.serialize_chart(chart), end="", file=out)
        return 0
    chart_text = io.load_text(args.chart)
    chart = io.parse_chart_text(chart_text, m, path=args.chart)
    if args.action == "eval":
        coords = _parse_coords(args.coords)
        pt = eval_chart(chart, coords, q=args.q)
        field = pt.spaces[0][1].field if pt.spaces else m.field
        for v, u in pt.spaces:
            print(f"U {v} dim={u.dim}", file=out)
            for row in u.basis.entries:
                print(" ".join(field.format_element(x) for x in row), file=out)
        return 0
    v = verify_chart(chart, args.q, dim_bound=args.dim_bound,
                     grid_bound=args.grid_bound)
    print(
        f"domain={v.domain} image={v.image} collisions={v.collisions} "
        f"outdomain={v.out_of_domain} total={v.total} "
        f"ratio={v.ratio.numerator}/{v.ratio.denominator}",
        file=out,
    )
    return 0


def _cmd_verify(args, out):
    quiver, pairs = _load(args, 1)
    m = _plain(pairs[0][1])
    e = io.parse_dim_vector(args.e, quiver)
    qs = _parse_qs(args.qs)
    report = verify_pipeline(m, e, qs, seed=_seed(args))
    print(report.render(), file=out)
    return 0 if report.passed else 1


# ------------------------------------------------------------------ dispatch


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qgl",
        description="quiver Grassmannian rationality toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_files(sp, n="+"):
        sp.add_argument("files", nargs=n, help="quiver file, then representation file(s)")

    sp = sub.add_parser("euler", help="Euler form of two dimension vectors")
    add_files(sp)
    sp.add_argument("--d", required=True)
    sp.add_argument("--e", required=True)
    sp.set_defaults(fn=_cmd_euler)

    sp = sub.add_parser("homext", help="dim Hom and dim Ext of two representations")
    add_files(sp)
    sp.set_defaults(fn=_cmd_homext)

    sp = sub.add_parser("rigid", help="rigidity and exceptionality report")
    add_files(sp)
    sp.set_defaults(fn=_cmd_rigid)

    sp = sub.add_parser("decompose", help="indecomposable direct summands")
    add_files(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=_cmd_decompose)

    sp = sub.add_parser("reflect", help="reflection functor at a sink or source")
    add_files(sp)
    sp.add_argument("--l", required=True, help="vertex to reflect at")
    sp.add_argument("--e", default=None, help="dimension vector to reflect along")
    sp.set_defaults(fn=_cmd_reflect)

    sp = sub.add_parser("grass", help="quiver Grassmannian points and fixed loci")
    sp.add_argument("action", choices=("count", "poly", "fixed", "limit"))
    add_files(sp)
    sp.add_argument("--e", required=True)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--qs", default=None, help="comma-separated primes")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=_cmd_grass)

    sp = sub.add_parser("cover", help="abelian covering lifts")
    sp.add_argument("action", choices=("lift", "iterate", "check"))
    add_files(sp)
    sp.add_argument("--max-n", dest="max_n", type=int, default=6)
    sp.set_defaults(fn=_cmd_cover)

    sp = sub.add_parser("chart", help="rational charts for tree Grassmannians")
    sp.add_argument("action", choices=("build", "eval", "verify"))
    add_files(sp)
    sp.add_argument("--e", default=None)
    sp.add_argument("--chart", default=None, help="chart file (eval/verify)")
    sp.add_argument("--coords", default="", help="comma-separated coordinates")
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--samples", type=int, default=64)
    sp.add_argument("--dim-bound", dest="dim_bound", type=int, default=4)
    sp.add_argument("--grid-bound", dest="grid_bound", type=int, default=10**6)
    sp.set_defaults(fn=_cmd_chart)

    sp = sub.add_parser("verify", help="end-to-end rationality verification")
    sp.add_argument("what", choices=("all",))
    add_files(sp)
    sp.add_argument("--e", required=True)
    sp.add_argument("--qs", default="2,3,5")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=_cmd_verify)

    return p


def run_command(argv, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_args(args)
        return args.fn(args, out)
    except VERIFY_FAILURES as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    except QglError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


def _check_args(args):
    needs_q = (
        (args.command == "grass" and args.action in ("count", "limit"))
        or (args.command == "chart" and args.action == "verify")
    )
    if needs_q and args.q is None:
        raise ValidationError(f"{args.command} {args.action} needs --q")
    if args.command == "chart":
        if args.action == "build" and not args.e:
            raise ValidationError("chart build needs --e")
        if args.action in ("eval", "verify") and not args.chart:
            raise ValidationError(f"chart {args.action} needs --chart")


def main(argv=None) -> int:
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
