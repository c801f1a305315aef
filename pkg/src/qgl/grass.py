"""Quiver Grassmannians: point enumeration, counting polynomials, torus
fixed loci and attractor flows.

Points are tuples of subspaces, one per vertex, closed under the arrow
maps.  Over a finite field they are enumerated exactly; over the integers
point counts at several primes interpolate to the counting polynomial,
with one prime always held out to confirm polynomiality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .covers import Character, GradedRepresentation, Pushdown, pushdown
from .errors import ValidationError, VerificationError
from .linalg import Subspace, enumerate_subspaces, lagrange_coeffs, next_prime
from .reps import (
    DirectSum,
    Representation,
    euler_form,
    reduce_rep,
    rep_is_integral,
    rigidity_report,
    subrep_closure_check,
)


@dataclass(frozen=True)
class SubrepPoint:
    """A point of a quiver Grassmannian: one subspace per vertex."""

    spaces: tuple  # ((vertex, Subspace), ...) in quiver vertex order

    @staticmethod
    def of(quiver, d: dict) -> "SubrepPoint":
        return SubrepPoint(tuple((v, d[v]) for v in quiver.vertices))

    def at(self, v: str) -> Subspace:
        return dict(self.spaces)[v]

    def as_dict(self) -> dict:
        return dict(self.spaces)

    def dims(self) -> dict:
        return {v: u.dim for v, u in self.spaces}

    def is_subrep(self, m: Representation) -> bool:
        return subrep_closure_check(m, self.as_dict())


def check_dim_vector(m: Representation, e: dict) -> dict:
    """Validate e against m and return it with absent vertices filled as 0."""
    unknown = set(e) - set(m.quiver.vertices)
    if unknown:
        raise ValidationError(f"dims for unknown vertices: {sorted(unknown)}")
    e = {v: e.get(v, 0) for v in m.quiver.vertices}
    for v, k in e.items():
        if not isinstance(k, int) or k < 0 or k > m.dims[v]:
            raise ValidationError(f"entry {k!r} at vertex {v!r} out of range")
    return e


def enumerate_subreps(m: Representation, e: dict):
    """All subrepresentations with the given dimension vector, lazily.

    Vertices are filled in quiver order; every arrow whose endpoints are
    both chosen is checked immediately, so dead branches are cut early.
    """
    e = check_dim_vector(m, e)
    if not m.field.is_finite:
        raise ValidationError("enumeration needs a finite field")
    q = m.quiver
    verts = q.vertices
    arrows_ready = []
    placed = set()
    for v in verts:
        placed.add(v)
        arrows_ready.append(
            tuple(a for a in q.arrows if a.src in placed and a.dst in placed and v in (a.src, a.dst))
        )

    def rec(i, chosen):
        if i == len(verts):
            yield SubrepPoint(tuple((v, chosen[v]) for v in verts))
            return
        v = verts[i]
        for u in enumerate_subspaces(m.field, m.dims[v], e[v]):
            chosen[v] = u
            ok = True
            for a in arrows_ready[i]:
                if not chosen[a.dst].contains(chosen[a.src].image(m.mats[a.name])):
                    ok = False
                    break
            if ok:
                yield from rec(i + 1, chosen)
        del chosen[v]

    yield from rec(0, {})


def count_subreps(m: Representation, e: dict) -> int:
    return sum(1 for _ in enumerate_subreps(m, e))


@dataclass(frozen=True)
class CountingPolynomial:
    coeffs: tuple  # ascending, integer, no trailing zeros; () is zero

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValidationError("trailing zero coefficient")
        if any(not isinstance(c, int) for c in self.coeffs):
            raise ValidationError("coefficients must be integers")

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self):
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"


def default_primes(k: int) -> tuple:
    out = []
    p = 1
    while len(out) < k:
        p = next_prime(p)
        out.append(p)
    return tuple(out)


def counting_polynomial(m: Representation, e: dict, primes=None) -> CountingPolynomial:
    """Interpolate point counts over several primes; one prime is held out.

    The representation must be rational with integer entries.  For rigid
    representations the result is checked to be monic of degree <e, d-e>
    when nonzero.
    """
    if m.field.is_finite or not rep_is_integral(m):
        raise ValidationError("counting needs an integer rational representation")
    e = check_dim_vector(m, e)
    de = {v: m.dims[v] - e[v] for v in m.quiver.vertices}
    form = euler_form(m.quiver, e, de)
    if primes is None:
        primes = default_primes(max(form, 0) + 2)
    primes = tuple(primes)
    if len(primes) != len(set(primes)) or len(primes) < 2:
        raise ValidationError("need at least two distinct primes")
    if form >= 0 and len(primes) < form + 2:
        raise ValidationError(f"need at least {form + 2} primes for degree {form}")
    counts = [count_subreps(reduce_rep(m, p), e) for p in primes]
    if all(c == 0 for c in counts):
        return CountingPolynomial(())
    if form < 0:
        raise VerificationError(
            f"nonzero point count with negative expected dimension {form}"
        )
    cs = lagrange_coeffs(primes[:-1], counts[:-1])
    if any(c.denominator != 1 for c in cs):
        raise VerificationError("point counts do not interpolate to integer coefficients")
    poly = CountingPolynomial(tuple(int(c) for c in cs))
    if poly(primes[-1]) != counts[-1]:
        raise VerificationError(
            f"held-out prime {primes[-1]} disagrees: predicted {poly(primes[-1])}, "
            f"counted {counts[-1]}"
        )
    if rigidity_report(m).rigid and not poly.is_zero():
        if poly.degree != form or poly.leading != 1:
            raise VerificationError(
                f"rigid representation but the polynomial {poly} is not monic of "
                f"degree {form}"
            )
    return poly


def _bounded_splits(total: int, bounds) -> list:
    """All tuples t with sum(t) == total, 0 <= t[i] <= bounds[i], lex order."""
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


@dataclass(frozen=True)
class FixedComponents:
    total: CountingPolynomial | int
    components: tuple  # (key, CountingPolynomial | int)
    mode: str  # 'polynomial' or 'count'


def summand_fixed_components(ds: DirectSum, e: dict, primes=None) -> FixedComponents:
    """Fixed components of the summand-scaling torus, with the Euler check.

    Components are indexed by splittings of e across the summands; the sum
    of their Euler characteristics must match the total one.
    """
    m = ds.rep
    e = check_dim_vector(m, e)
    q = m.quiver
    r = len(ds.summands)
    per_vertex = {
        v: _bounded_splits(e[v], [s.dims[v] for s in ds.summands]) for v in q.vertices
    }
    components = []
    chi_sum = 0
    for combo in itertools.product(*(per_vertex[v] for v in q.vertices)):
        evecs = [
            {v: combo[iv][k] for iv, v in enumerate(q.vertices)} for k in range(r)
        ]
        key = tuple(tuple(ev[v] for v in q.vertices) for ev in evecs)
        polys = [counting_polynomial(s, ev, primes) for s, ev in zip(ds.summands, evecs)]
        # empty splittings stay in the list with count 0
        prod_chi = 1
        for p in polys:
            prod_chi *= p(1)
        chi_sum += prod_chi
        components.append((key, tuple(polys)))
    total = counting_polynomial(m, e, primes)
    if chi_sum != total(1):
        raise VerificationError(
            f"summand fixed components sum to Euler characteristic {chi_sum}, "
            f"the whole space has {total(1)}"
        )
    return FixedComponents(total, tuple(components), "polynomial")


def _graded_dim_vectors(pd: Pushdown, e: dict, quiver) -> list:
    """All gradings of e along the pushdown blocks: per vertex, distribute
    e_v over that vertex's character blocks.  Keys are block dim tuples."""
    per_vertex = {}
    for v in quiver.vertices:
        bounds = [d for _, _, d in pd.blocks[v]]
        per_vertex[v] = _bounded_splits(e[v], bounds)
    return [
        {v: combo[iv] for iv, v in enumerate(quiver.vertices)}
        for combo in itertools.product(*(per_vertex[v] for v in quiver.vertices))
    ]


def _hat_to_window_evec(g: GradedRepresentation, pd: Pushdown, hat: dict) -> dict:
    e_hat = {ident: 0 for ident in g.window.quiver.vertices}
    for v, per_block in hat.items():
        for (c, _, _), k in zip(pd.blocks[v], per_block):
            e_hat[g.window.vertex_id(v, c)] = k
    return e_hat


def grading_fixed_components(g: GradedRepresentation, e: dict, primes=None) -> FixedComponents:
    """Fixed components of the grading torus on the pushdown Grassmannian.

    Over the rationals each graded dimension vector contributes a counting
    polynomial and the Euler characteristics must sum to the total.  Over a
    finite field exact point counts are compared with the enumerated
    graded-fixed locus instead.
    """
    pd = pushdown(g)
    m = pd.rep
    e = check_dim_vector(m, e)
    base = g.window.base
    hats = _graded_dim_vectors(pd, e, base)
    if not g.field.is_finite:
        components = []
        chi_sum = 0
        for hat in hats:
            e_hat = _hat_to_window_evec(g, pd, hat)
            poly = counting_polynomial(g.rep, e_hat, primes)
            key = tuple(tuple(hat[v]) for v in base.vertices)
            components.append((key, poly))
            chi_sum += poly(1)
        total = counting_polynomial(m, e, primes)
        if chi_sum != total(1):
            raise VerificationError(
                f"graded fixed components sum to Euler characteristic {chi_sum}, "
                f"the whole space has {total(1)}"
            )
        return FixedComponents(total, tuple(components), "polynomial")
    components = []
    count_sum = 0
    for hat in hats:
        e_hat = _hat_to_window_evec(g, pd, hat)
        c = count_subreps(g.rep, e_hat)
        key = tuple(tuple(hat[v]) for v in base.vertices)
        components.append((key, c))
        count_sum += c
    fixed = 0
    for pt in enumerate_subreps(m, e):
        if _is_graded_point(pt, pd, m):
            fixed += 1
    if count_sum != fixed:
        raise VerificationError(
            f"graded pieces count {count_sum} points, the graded-fixed locus has {fixed}"
        )
    return FixedComponents(fixed, tuple(components), "count")


def _block_subspace(field, ambient: int, offset: int, dim: int) -> Subspace:
    rows = []
    for i in range(dim):
        r = [field.zero()] * ambient
        r[offset + i] = field.one()
        rows.append(r)
    return Subspace.from_rows(field, ambient, rows)


def _is_graded_point(pt: SubrepPoint, pd: Pushdown, m: Representation) -> bool:
    for v, u in pt.spaces:
        s = 0
        for _, ofs, d in pd.blocks[v]:
            s += u.intersect(_block_subspace(m.field, m.dims[v], ofs, d)).dim
        if s != u.dim:
            return False
    return True


@dataclass(frozen=True)
class TorusAction:
    """A torus acting blockwise on a representation, for attractor limits.

    Per vertex: disjoint coordinate blocks with pairwise distinct integer
    weights.  ``source`` keeps the structure the blocks came from (a direct
    sum or a graded representation) so fixed components can be counted.
    """

    kind: str  # 'summand' or 'grading'
    rep: Representation
    blocks: dict  # vertex -> ((key, offset, dim, weight), ...)
    source: object

    def __post_init__(self):
        for v, bl in self.blocks.items():
            total = sum(d for _, _, d, _ in bl)
            if total != self.rep.dims[v]:
                raise ValidationError(f"blocks at {v!r} do not fill the space")
            ws = [w for _, _, _, w in bl]
            if len(set(ws)) != len(ws):
                raise ValidationError(f"blocks at {v!r} repeat a weight")


def summand_action(ds: DirectSum, weights=None) -> TorusAction:
    r = len(ds.summands)
    if weights is None:
        weights = tuple(range(r))
    weights = tuple(weights)
    if len(weights) != r or len(set(weights)) != r:
        raise ValidationError("need one distinct weight per summand")
    blocks = {}
    for v in ds.rep.quiver.vertices:
        bl = []
        for k, s in enumerate(ds.summands):
            if s.dims[v]:
                bl.append((k, ds.offsets[v][k], s.dims[v], weights[k]))
        blocks[v] = tuple(bl)
    return TorusAction("summand", ds.rep, blocks, ds)


def grading_action(g: GradedRepresentation, arrow_weights=None) -> TorusAction:
    """Weights from a cocharacter of the arrow torus.

    By default arrow j gets weight B^j with B wide enough that distinct
    characters in the window always get distinct weights.
    """
    pd = pushdown(g)
    base = g.window.base
    if arrow_weights is None:
        maxc = max(
            (abs(n) for c in g.window.chars for _, n in c.items),
            default=0,
        )
        b = 2 * maxc + 1
        arrow_weights = {a.name: b**j for j, a in enumerate(base.arrows)}
    blocks = {}
    for v in base.vertices:
        bl = []
        for c, ofs, d in pd.blocks[v]:
            w = sum(arrow_weights[a] * n for a, n in c.items)
            bl.append((c, ofs, d, w))
        blocks[v] = tuple(bl)
    return TorusAction("grading", pd.rep, blocks, g)


def bb_limit(pt: SubrepPoint, action: TorusAction) -> SubrepPoint:
    """Limit of a point under the attracting flow of the torus action.

    Per vertex, the limit is the direct sum over weights w of the
    projection to the weight-w block of the intersection with the part of
    weight at least w; the result is checked to be a subrepresentation.
    """
    m = action.rep
    f = m.field
    out = {}
    for v in m.quiver.vertices:
        u = pt.at(v)
        amb = m.dims[v]
        bl = sorted(action.blocks[v], key=lambda t: t[3])
        rows = []
        for i, (_, ofs, d, w) in enumerate(bl):
            # coordinates of weight >= w
            high = [f.zero()] * amb
            keep = []
            for _, ofs2, d2, w2 in bl:
                if w2 >= w:
                    keep.extend(range(ofs2, ofs2 + d2))
            high_space = Subspace.from_rows(
                f,
                amb,
                [
                    [f.one() if j == k else f.zero() for j in range(amb)]
                    for k in keep
                ],
            )
            inter = u.intersect(high_space)
            for r in inter.basis.entries:
                proj = [f.zero()] * amb
                for k in range(ofs, ofs + d):
                    proj[k] = r[k]
                rows.append(proj)
        out[v] = Subspace.from_rows(f, amb, rows)
        if out[v].dim != u.dim:
            raise VerificationError(f"limit at {v!r} changed dimension")
    limit = SubrepPoint.of(m.quiver, out)
    if not limit.is_subrep(m):
        raise VerificationError("attractor limit is not a subrepresentation")
    return limit


def component_of(pt: SubrepPoint, action: TorusAction) -> tuple:
    """Key of the fixed component containing a torus-fixed point."""
    m = action.rep
    key = []
    for v in m.quiver.vertices:
        u = pt.at(v)
        dims = []
        s = 0
        for _, ofs, d, _ in action.blocks[v]:
            k = u.intersect(_block_subspace(m.field, m.dims[v], ofs, d)).dim
            dims.append(k)
            s += k
        if s != u.dim:
            raise ValidationError(f"point is not fixed at {v!r}")
        key.append(tuple(dims))
    return tuple(key)


def _expected_fixed_counts(action: TorusAction, e: dict) -> dict:
    """Point count of every nonempty fixed component, keyed like component_of."""
    m = action.rep
    q = m.quiver
    out = {}
    if action.kind == "summand":
        ds: DirectSum = action.source
        per_vertex = {}
        for v in q.vertices:
            bounds = [d for _, _, d, _ in action.blocks[v]]
            per_vertex[v] = _bounded_splits(e[v], bounds)
        for combo in itertools.product(*(per_vertex[v] for v in q.vertices)):
            key = tuple(combo)
            # blocks skip zero-dim summands, so map positions back to the
            # summand index before counting factor by factor
            per_summand = [dict() for _ in ds.summands]
            for iv, v in enumerate(q.vertices):
                present = {bk: combo[iv][pos] for pos, (bk, _, _, _) in enumerate(action.blocks[v])}
                for k in range(len(ds.summands)):
                    per_summand[k][v] = present.get(k, 0)
            cnt = 1
            for k, s in enumerate(ds.summands):
                cnt *= count_subreps(s, per_summand[k])
                if cnt == 0:
                    break
            if cnt:
                out[key] = cnt
        return out
    g: GradedRepresentation = action.source
    pd = pushdown(g)
    per_vertex = {}
    for v in q.vertices:
        bounds = [d for _, _, d, _ in action.blocks[v]]
        per_vertex[v] = _bounded_splits(e[v], bounds)
    for combo in itertools.product(*(per_vertex[v] for v in q.vertices)):
        key = tuple(combo)
        hat = {v: combo[iv] for iv, v in enumerate(q.vertices)}
        e_hat = _hat_to_window_evec(g, pd, hat)
        cnt = count_subreps(g.rep, e_hat)
        if cnt:
            out[key] = cnt
    return out


@dataclass(frozen=True)
class FlowReport:
    q: int
    total: int
    entries: tuple  # (key, fixed_count, tally, cell_dim)


def attractor_flow(action: TorusAction, e: dict) -> FlowReport:
    """Flow every point to its limit and tally the attracting sets.

    Checks that every limit lands in a predicted fixed component, that the
    tallies exhaust the Grassmannian, and that each attracting set has
    exactly (component size) x q^k points for some k >= 0.
    """
    m = action.rep
    if not m.field.is_finite:
        raise ValidationError("attractor flow needs a finite field")
    e = check_dim_vector(m, e)
    qq = m.field.p
    expected = _expected_fixed_counts(action, e)
    tallies = {}
    total = 0
    for pt in enumerate_subreps(m, e):
        total += 1
        key = component_of(bb_limit(pt, action), action)
        if key not in expected:
            raise VerificationError(f"limit lands outside the predicted components: {key}")
        tallies[key] = tallies.get(key, 0) + 1
    if total != sum(tallies.values()):
        raise VerificationError("tallies do not exhaust the point set")
    entries = []
    for key, cnt in sorted(expected.items()):
        t = tallies.get(key, 0)
        if t == 0:
            raise VerificationError(f"fixed component {key} attracts no points")
        if t % cnt:
            raise VerificationError(
                f"attracting set of {key} has {t} points, not a multiple of {cnt}"
            )
        ratio = t // cnt
        k = 0
        while ratio % qq == 0:
            ratio //= qq
            k += 1
        if ratio != 1:
            raise VerificationError(
                f"attracting set of {key} is {t} = {cnt} x {t // cnt}, not size x q^k"
            )
        entries.append((key, cnt, t, k))
    return FlowReport(qq, total, tuple(entries))
