"""Gradings by the character lattice of the arrow torus.

A character assigns an integer to every base arrow (almost all zero).  The
universal abelian cover has vertex set (base vertex) x (characters); a
finite window materializes a chosen character set.  Graded representations
live on windows; pushing down forgets the grading, shifting translates it,
and lifting reads a grading off the coefficient quiver of a base
representation when one exists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import LiftError, IterationError, ValidationError, VerificationError
from .linalg import Matrix
from .quivers import Arrow, Quiver, QuiverMorphism, check_base_ident, structure_report
from .reps import Representation, hom_ext_dims


@dataclass(frozen=True, order=True)
class Character:
    """Finitely supported integer vector on the base arrows."""

    items: tuple = ()

    def __post_init__(self):
        if list(self.items) != sorted(self.items) or any(n == 0 for _, n in self.items):
            raise ValidationError("character items must be sorted and zero-free")
        if len({a for a, _ in self.items}) != len(self.items):
            raise ValidationError("character repeats an arrow")

    @staticmethod
    def of(d) -> "Character":
        if isinstance(d, Character):
            return d
        items = d.items() if isinstance(d, dict) else d
        return Character(tuple(sorted((a, int(n)) for a, n in items if int(n) != 0)))

    @staticmethod
    def unit(arrow: str) -> "Character":
        return Character(((arrow, 1),))

    def get(self, arrow: str) -> int:
        return dict(self.items).get(arrow, 0)

    def add(self, other: "Character") -> "Character":
        d = dict(self.items)
        for a, n in other.items:
            d[a] = d.get(a, 0) + n
        return Character.of(d)

    def sub(self, other: "Character") -> "Character":
        return self.add(other.neg())

    def neg(self) -> "Character":
        return Character(tuple((a, -n) for a, n in self.items))

    def encode(self) -> str:
        return ",".join(f"{a}:{n}" for a, n in self.items)

    @staticmethod
    def decode(s: str) -> "Character":
        s = s.strip()
        if not s:
            return Character()
        items = []
        for part in s.split(","):
            if ":" not in part:
                raise ValidationError(f"bad character entry {part!r}")
            a, n = part.rsplit(":", 1)
            try:
                items.append((a, int(n)))
            except ValueError:
                raise ValidationError(f"bad character entry {part!r}") from None
        return Character.of(items)

    def __str__(self):
        return self.encode() or "0"


ZERO_CHAR = Character()


def cover_vertex_id(v: str, chi: Character) -> str:
    return f"{v}@{chi.encode()}"


def cover_arrow_id(a: str, chi: Character) -> str:
    return f"{a}@{chi.encode()}"


def split_cover_id(ident: str) -> tuple:
    if "@" not in ident:
        raise ValidationError(f"not a cover identifier: {ident!r}")
    base, enc = ident.split("@", 1)
    return base, Character.decode(enc)


@dataclass(frozen=True, eq=False)
class CoverWindow:
    """Finite piece of the universal abelian cover over a character set."""

    base: Quiver
    chars: tuple
    quiver: Quiver
    to_base: QuiverMorphism

    @cached_property
    def charset(self) -> frozenset:
        return frozenset(self.chars)

    @cached_property
    def vertex_of(self) -> dict:
        return {cover_vertex_id(v, c): (v, c) for v in self.base.vertices for c in self.chars}

    def vertex_id(self, v: str, chi: Character) -> str:
        ident = cover_vertex_id(v, chi)
        if ident not in self.vertex_of:
            raise ValidationError(f"vertex ({v!r}, {chi}) outside the window")
        return ident

    def has_vertex(self, v: str, chi: Character) -> bool:
        return chi in self.charset and v in self.base.vertex_index

    def has_arrow(self, a: str, chi: Character) -> bool:
        if chi not in self.charset or a not in self.base.arrow_map:
            return False
        return chi.add(Character.unit(a)) in self.charset

    def interior(self) -> tuple:
        """Window vertices all of whose incident cover arrows are present."""
        out = []
        for v in self.base.vertices:
            for c in self.chars:
                ok = all(
                    c.add(Character.unit(a.name)) in self.charset for a in self.base.out_arrows[v]
                ) and all(
                    c.sub(Character.unit(a.name)) in self.charset for a in self.base.in_arrows[v]
                )
                if ok:
                    out.append(cover_vertex_id(v, c))
        return tuple(out)

    def __eq__(self, other):
        return (
            isinstance(other, CoverWindow)
            and self.base == other.base
            and self.chars == other.chars
        )


def build_cover_window(base: Quiver, chars) -> CoverWindow:
    for v in base.vertices:
        check_base_ident(v, "base vertex")
    for a in base.arrows:
        check_base_ident(a.name, "base arrow")
    # empty chars is legal and yields the empty window
    cs = tuple(sorted({Character.of(c) for c in chars}))
    charset = set(cs)
    verts = tuple(cover_vertex_id(v, c) for v in base.vertices for c in cs)
    arrows = []
    for a in base.arrows:
        da = Character.unit(a.name)
        for c in cs:
            if c.add(da) in charset:
                arrows.append(
                    Arrow(
                        cover_arrow_id(a.name, c),
                        cover_vertex_id(a.src, c),
                        cover_vertex_id(a.dst, c.add(da)),
                    )
                )
    quiver = Quiver(f"{base.name}^", verts, tuple(arrows))
    vmap = {cover_vertex_id(v, c): v for v in base.vertices for c in cs}
    amap = {ar.name: split_cover_id(ar.name)[0] for ar in arrows}
    return CoverWindow(base, cs, quiver, QuiverMorphism(quiver, base, vmap, amap))


@dataclass(frozen=True, eq=False)
class GradedRepresentation:
    window: CoverWindow
    rep: Representation

    def __post_init__(self):
        if self.rep.quiver != self.window.quiver:
            raise ValidationError("graded rep must live on the window quiver")

    @property
    def field(self):
        return self.rep.field

    def dim_at(self, v: str, chi: Character) -> int:
        ident = cover_vertex_id(v, chi)
        return self.rep.dims.get(ident, 0)

    def support_chars(self) -> tuple:
        out = set()
        for ident, d in self.rep.dims.items():
            if d:
                out.add(self.window.vertex_of[ident][1])
        return tuple(sorted(out))

    def support_quiver(self) -> Quiver:
        keep = [v for v in self.window.quiver.vertices if self.rep.dims[v] > 0]
        return self.window.quiver.subquiver(keep, f"{self.window.base.name}^supp")

    def support_rep(self) -> Representation:
        """Restriction of the window rep to its support subquiver."""
        q = self.support_quiver()
        return Representation(
            q,
            self.field,
            {v: self.rep.dims[v] for v in q.vertices},
            {a.name: self.rep.mats[a.name] for a in q.arrows},
        )


@dataclass(frozen=True)
class Pushdown:
    rep: Representation
    blocks: dict  # base vertex -> tuple of (Character, offset, dim), dims > 0


def pushdown(g: GradedRepresentation) -> Pushdown:
    """Forget the grading: concatenate the character blocks per base vertex.

    Blocks are ordered by character; arrows paste blockwise, and a block
    whose displaced character leaves the window contributes zeros.
    """
    w = g.window
    base = w.base
    f = g.field
    blocks = {}
    dims = {}
    for v in base.vertices:
        ofs = 0
        bl = []
        for c in w.chars:
            d = g.dim_at(v, c)
            if d:
                bl.append((c, ofs, d))
                ofs += d
        blocks[v] = tuple(bl)
        dims[v] = ofs
    mats = {}
    for a in base.arrows:
        da = Character.unit(a.name)
        rows = [[f.zero()] * dims[a.src] for _ in range(dims[a.dst])]
        tgt_ofs = {c: (o, d) for c, o, d in blocks[a.dst]}
        for c, o, d in blocks[a.src]:
            c2 = c.add(da)
            if c2 not in tgt_ofs or not w.has_arrow(a.name, c):
                continue
            o2, d2 = tgt_ofs[c2]
            blk = g.rep.mats[cover_arrow_id(a.name, c)]
            for i in range(d2):
                for j in range(d):
                    rows[o2 + i][o + j] = blk.entries[i][j]
        mats[a.name] = Matrix(f, dims[a.dst], dims[a.src], tuple(tuple(r) for r in rows))
    return Pushdown(Representation(base, f, dims, mats), blocks)


def shift(g: GradedRepresentation, xi: Character) -> GradedRepresentation:
    """Shift the grading: the new piece at chi is the old piece at chi + xi."""
    w = g.window
    new_chars = [c.sub(xi) for c in w.chars]
    w2 = build_cover_window(w.base, new_chars)
    dims = {}
    for v in w.base.vertices:
        for c in w2.chars:
            dims[cover_vertex_id(v, c)] = g.dim_at(v, c.add(xi))
    mats = {}
    for ar in w2.quiver.arrows:
        a, c = split_cover_id(ar.name)
        mats[ar.name] = g.rep.mats[cover_arrow_id(a, c.add(xi))]
    return GradedRepresentation(w2, Representation(w2.quiver, g.field, dims, mats))


def embed_in_window(g: GradedRepresentation, w: CoverWindow) -> Representation:
    """Re-express a graded rep on a larger (or equal) compatible window."""
    if w.base != g.window.base:
        raise ValidationError("windows over different base quivers")
    for c in g.support_chars():
        if c not in w.charset:
            raise ValidationError(f"support character {c} missing from the window")
    f = g.field
    dims = {}
    for ident in w.quiver.vertices:
        v, c = w.vertex_of[ident]
        dims[ident] = g.dim_at(v, c) if g.window.has_vertex(v, c) else 0
    mats = {}
    for ar in w.quiver.arrows:
        a, c = split_cover_id(ar.name)
        if g.window.has_arrow(a, c):
            mats[ar.name] = g.rep.mats[cover_arrow_id(a, c)]
        else:
            # the source window never materialized this arrow; that is only
            # unambiguous when one endpoint block is empty
            if dims[ar.src] and dims[ar.dst]:
                raise ValidationError(f"arrow {ar.name!r} lost by the source window")
            mats[ar.name] = Matrix.zero(f, dims[ar.dst], dims[ar.src])
    return Representation(w.quiver, f, dims, mats)


@dataclass(frozen=True)
class Lift:
    graded: GradedRepresentation
    basis_order: dict  # base vertex -> tuple of original basis indices


def lift_from_coefficient_quiver(m: Representation, halo: int = 1) -> Lift:
    """Grade a representation along its coefficient quiver, if consistent.

    Nodes are the standard basis vectors; every nonzero matrix entry of an
    arrow a forces the target node's character to exceed the source node's
    by the unit character of a.  Characters propagate from the smallest
    node of each connected component (set to zero); a contradictory cycle
    raises LiftError.  The window takes the support characters plus a halo
    of the given radius.
    """
    q = m.quiver
    nodes = [(v, j) for v in q.vertices for j in range(m.dims[v])]
    edges = {nd: [] for nd in nodes}
    for a in q.arrows:
        mat = m.mats[a.name]
        da = Character.unit(a.name)
        for i in range(mat.nrows):
            for j in range(mat.ncols):
                if mat.entries[i][j]:
                    edges[(a.src, j)].append(((a.dst, i), da, a.name, i, j))
                    edges[(a.dst, i)].append(((a.src, j), da.neg(), a.name, i, j))
    char_of = {}
    order = {v: i for i, v in enumerate(q.vertices)}
    for root in sorted(nodes, key=lambda nd: (order[nd[0]], nd[1])):
        if root in char_of:
            continue
        char_of[root] = ZERO_CHAR
        dq = deque([root])
        while dq:
            nd = dq.popleft()
            for other, delta, an, i, j in edges[nd]:
                want = char_of[nd].add(delta)
                if other not in char_of:
                    char_of[other] = want
                    dq.append(other)
                elif char_of[other] != want:
                    raise LiftError(
                        f"no consistent grading: entry ({i},{j}) of arrow {an!r} closes a "
                        f"cycle with mismatched characters {char_of[other]} vs {want}"
                    )
    chars = {c for c in char_of.values()}
    for _ in range(max(0, halo)):
        grown = set(chars)
        for c in chars:
            for a in q.arrows:
                da = Character.unit(a.name)
                grown.add(c.add(da))
                grown.add(c.sub(da))
        chars = grown
    w = build_cover_window(q, chars)
    basis_order = {}
    dims = {ident: 0 for ident in w.quiver.vertices}
    index_in_block = {}
    for v in q.vertices:
        js = sorted(range(m.dims[v]), key=lambda j: (char_of[(v, j)], j))
        basis_order[v] = tuple(js)
        for j in js:
            ident = cover_vertex_id(v, char_of[(v, j)])
            index_in_block[(v, j)] = dims[ident]
            dims[ident] += 1
    f = m.field
    mats = {}
    for ar in w.quiver.arrows:
        a, c = split_cover_id(ar.name)
        arr = q.arrow_map[a]
        mat = m.mats[a]
        d2, d1 = dims[ar.dst], dims[ar.src]
        rows = [[f.zero()] * d1 for _ in range(d2)]
        da = Character.unit(a)
        for i in range(mat.nrows):
            for j in range(mat.ncols):
                if not mat.entries[i][j]:
                    continue
                if char_of[(arr.src, j)] == c and char_of[(arr.dst, i)] == c.add(da):
                    rows[index_in_block[(arr.dst, i)]][index_in_block[(arr.src, j)]] = (
                        mat.entries[i][j]
                    )
        mats[ar.name] = Matrix(f, d2, d1, tuple(tuple(r) for r in rows))
    g = GradedRepresentation(w, Representation(w.quiver, f, dims, mats))
    return Lift(g, basis_order)


def _fresh_names(support: Quiver) -> tuple:
    """Rename a support quiver with short generated ids; returns
    (renamed quiver, vertex rename dict, arrow rename dict)."""
    vmap = {v: f"v{i}" for i, v in enumerate(support.vertices)}
    amap = {a.name: f"e{i}" for i, a in enumerate(support.arrows)}
    q = Quiver(
        support.name,
        tuple(vmap[v] for v in support.vertices),
        tuple(Arrow(amap[a.name], vmap[a.src], vmap[a.dst]) for a in support.arrows),
    )
    return q, vmap, amap


@dataclass(frozen=True)
class IterationResult:
    graded: GradedRepresentation  # final lift, support is a forest
    tree_rep: Representation  # its support, re-encoded over fresh ids
    to_base: QuiverMorphism  # tree_rep.quiver -> the original base
    n: int
    girths: tuple


def iterate_cover_to_tree(g: GradedRepresentation, max_n: int = 6, halo: int = 1) -> IterationResult:
    """Lift repeatedly until the supporting quiver becomes a forest.

    Each round restricts to the support, renames it to fresh identifiers,
    and lifts the restricted representation along its coefficient quiver.
    The girth of the support must strictly grow; the trace of girths ends
    with None on success.
    """
    base0 = g.window.base
    # vertex/arrow maps from the current level down to base0
    vdown = {v: v for v in base0.vertices}
    adown = {a.name: a.name for a in base0.arrows}
    cur = g
    girths = []
    n = 0
    while True:
        supp = cur.support_quiver()
        shape = structure_report(supp)
        girths.append(shape.girth)
        if shape.girth is None:
            fresh, vmap, amap = _fresh_names(supp)
            rep = cur.support_rep()
            tree_rep = Representation(
                fresh,
                rep.field,
                {vmap[v]: rep.dims[v] for v in supp.vertices},
                {amap[a.name]: rep.mats[a.name] for a in supp.arrows},
            )
            tb = QuiverMorphism(
                fresh,
                base0,
                {vmap[v]: vdown[cur.window.to_base.vertex_map[v]] for v in supp.vertices},
                {amap[a.name]: adown[cur.window.to_base.arrow_map[a.name]] for a in supp.arrows},
            )
            return IterationResult(cur, tree_rep, tb, n, tuple(girths))
        if n >= max_n:
            raise IterationError(
                f"support is not a forest after {n} liftings (girth trace {girths})"
            )
        if len(girths) >= 2 and girths[-2] is not None and girths[-1] <= girths[-2]:
            raise IterationError(f"girth failed to grow (trace {girths})")
        fresh, vmap, amap = _fresh_names(supp)
        rep = cur.support_rep()
        rep2 = Representation(
            fresh,
            rep.field,
            {vmap[v]: rep.dims[v] for v in supp.vertices},
            {amap[a.name]: rep.mats[a.name] for a in supp.arrows},
        )
        vdown = {vmap[v]: vdown[cur.window.to_base.vertex_map[v]] for v in supp.vertices}
        adown = {amap[a.name]: adown[cur.window.to_base.arrow_map[a.name]] for a in supp.arrows}
        cur = lift_from_coefficient_quiver(rep2, halo=halo).graded
        n += 1


@dataclass(frozen=True)
class GradedHomExt:
    base_hom: int
    base_ext: int
    hom_sum: int
    ext_sum: int
    contributions: tuple  # (Character, hom, ext), nonzero entries only
    shifts_used: tuple


def graded_homext_check(gm: GradedRepresentation, gn: GradedRepresentation) -> GradedHomExt:
    """Degreewise Hom/Ext sums against the ungraded totals.

    Every grading shift that can carry a nonzero Hom or Ext moves some
    support character of M onto one of N, possibly displaced by a single
    arrow; those candidates are enumerated, each graded pair is compared
    inside a common window, and the sums must reproduce the base numbers.
    """
    if gm.window.base != gn.window.base:
        raise ValidationError("graded reps over different base quivers")
    if gm.field != gn.field:
        raise ValidationError("graded reps over different fields")
    base = gm.window.base
    m = pushdown(gm).rep
    n = pushdown(gn).rep
    base_hom, base_ext = hom_ext_dims(m, n)
    cm = gm.support_chars()
    cn = gn.support_chars()
    candidates = set()
    for a_ in cm:
        for b_ in cn:
            d = a_.sub(b_)
            candidates.add(d)
            for ar in base.arrows:
                da = Character.unit(ar.name)
                candidates.add(d.add(da))
                candidates.add(d.sub(da))
    shifts = tuple(sorted(candidates))
    hom_sum = ext_sum = 0
    contributions = []
    for xi in shifts:
        sgm = shift(gm, xi)
        chars = sorted(set(sgm.support_chars()) | set(cn))
        if not chars:
            continue
        w = build_cover_window(base, chars)
        rm = embed_in_window(sgm, w)
        rn = embed_in_window(gn, w)
        h, x = hom_ext_dims(rm, rn)
        if h or x:
            contributions.append((xi, h, x))
            hom_sum += h
            ext_sum += x
    if (hom_sum, ext_sum) != (base_hom, base_ext):
        raise VerificationError(
            f"graded sums (hom {hom_sum}, ext {ext_sum}) disagree with the base "
            f"representation (hom {base_hom}, ext {base_ext})"
        )
    return GradedHomExt(base_hom, base_ext, hom_sum, ext_sum, tuple(contributions), shifts)
