"""Quivers, morphisms, covering checks and girth of reduced cycles.

A quiver is a finite directed multigraph with named vertices and arrows.
Identifiers are free-form strings except for characters the text formats
reserve (whitespace, '@', ':', ',', '#').
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import ValidationError

# whitespace and '#' break the line formats outright; '@' ':' ',' are
# reserved for derived (cover) identifiers and only banned in base names
TOKEN_BREAKERS = set(" \t\r\n#")
BASE_RESERVED = TOKEN_BREAKERS | set("@:,")


def check_ident(s: str, what: str) -> str:
    if not s or any(c in TOKEN_BREAKERS for c in s):
        raise ValidationError(f"bad {what} identifier {s!r}")
    return s


def check_base_ident(s: str, what: str) -> str:
    if not s or any(c in BASE_RESERVED for c in s):
        raise ValidationError(f"bad {what} identifier {s!r} (reserved character)")
    return s


@dataclass(frozen=True)
class Arrow:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Quiver:
    name: str
    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            check_ident(v, "vertex")
            if v in seen:
                raise ValidationError(f"duplicate vertex {v!r}")
            seen.add(v)
        vs = set(self.vertices)
        anames = set()
        for a in self.arrows:
            check_ident(a.name, "arrow")
            if a.name in anames:
                raise ValidationError(f"duplicate arrow {a.name!r}")
            anames.add(a.name)
            if a.src not in vs or a.dst not in vs:
                raise ValidationError(f"arrow {a.name!r} endpoint not a vertex")

    @cached_property
    def arrow_map(self) -> dict:
        return {a.name: a for a in self.arrows}

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_arrows(self) -> dict:
        d = {v: [] for v in self.vertices}
        for a in self.arrows:
            d[a.src].append(a)
        return {v: tuple(l) for v, l in d.items()}

    @cached_property
    def in_arrows(self) -> dict:
        d = {v: [] for v in self.vertices}
        for a in self.arrows:
            d[a.dst].append(a)
        return {v: tuple(l) for v, l in d.items()}

    def degree(self, v: str) -> int:
        """Undirected degree; a loop counts twice."""
        return len(self.out_arrows[v]) + len(self.in_arrows[v])

    def darts(self, v: str):
        """All (arrow, sign) usable from v; sign +1 along, -1 against."""
        out = [(a, +1) for a in self.out_arrows[v]]
        inn = [(a, -1) for a in self.in_arrows[v]]
        return out + inn

    def op(self, name: str | None = None) -> "Quiver":
        """Same vertices, all arrows reversed."""
        return Quiver(
            name or f"{self.name}_op",
            self.vertices,
            tuple(Arrow(a.name, a.dst, a.src) for a in self.arrows),
        )

    def subquiver(self, keep_vertices, name: str | None = None) -> "Quiver":
        """Full subquiver on the given vertices (order inherited)."""
        keep = set(keep_vertices)
        return Quiver(
            name or self.name,
            tuple(v for v in self.vertices if v in keep),
            tuple(a for a in self.arrows if a.src in keep and a.dst in keep),
        )

    def __str__(self):
        return f"quiver {self.name} ({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


def double_quiver(q: Quiver, name: str | None = None) -> Quiver:
    """Each arrow doubled: a^+1 keeps the orientation, a^-1 reverses it."""
    arrows = []
    for a in q.arrows:
        arrows.append(Arrow(f"{a.name}^+1", a.src, a.dst))
        arrows.append(Arrow(f"{a.name}^-1", a.dst, a.src))
    return Quiver(name or f"{q.name}_double", q.vertices, tuple(arrows))


def reduced_cycle_girth(q: Quiver) -> int | None:
    """Length of the shortest unoriented cycle with no immediate backtrack.

    None when the underlying graph is a forest.  A loop gives 1; two arrows
    joining the same unordered pair of vertices give 2; beyond that every
    reduced cycle is a simple cycle of the underlying simple graph, found
    by per-vertex BFS.
    """
    if any(a.src == a.dst for a in q.arrows):
        return 1
    pairs = set()
    for a in q.arrows:
        key = frozenset((a.src, a.dst))
        if key in pairs:
            return 2
        pairs.add(key)
    # simple graph now; girth via BFS from every vertex
    adj = {v: set() for v in q.vertices}
    for a in q.arrows:
        adj[a.src].add(a.dst)
        adj[a.dst].add(a.src)
    best = None
    for root in q.vertices:
        dist = {root: 0}
        parent = {root: None}
        dq = deque([root])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    dq.append(w)
                elif parent[u] != w:
                    cyc = dist[u] + dist[w] + 1
                    if best is None or cyc < best:
                        best = cyc
        if best == 3:
            break
    return best


@dataclass(frozen=True)
class QuiverShape:
    connected: bool
    tree: bool
    girth: int | None
    leaves: tuple
    sinks: tuple
    sources: tuple


def structure_report(q: Quiver) -> QuiverShape:
    """Connectivity, tree-ness, girth, and the special vertex lists.

    The empty quiver counts as connected (and a tree).  A leaf is a vertex
    of undirected degree 1.
    """
    connected = True
    if q.vertices:
        adj = {v: set() for v in q.vertices}
        for a in q.arrows:
            adj[a.src].add(a.dst)
            adj[a.dst].add(a.src)
        seen = {q.vertices[0]}
        dq = deque([q.vertices[0]])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    dq.append(w)
        connected = len(seen) == len(q.vertices)
    girth = reduced_cycle_girth(q)
    leaves = tuple(v for v in q.vertices if q.degree(v) == 1)
    sinks = tuple(v for v in q.vertices if not q.out_arrows[v])
    sources = tuple(v for v in q.vertices if not q.in_arrows[v])
    return QuiverShape(connected, connected and girth is None, girth, leaves, sinks, sources)


@dataclass(frozen=True)
class QuiverMorphism:
    """Vertex and arrow maps that commute with endpoints."""

    domain: Quiver
    codomain: Quiver
    vertex_map: dict
    arrow_map: dict

    def __post_init__(self):
        vm, am = self.vertex_map, self.arrow_map
        if set(vm) != set(self.domain.vertices):
            raise ValidationError("vertex map domain mismatch")
        if set(am) != set(self.domain.arrow_map):
            raise ValidationError("arrow map domain mismatch")
        cod_v = set(self.codomain.vertices)
        cod_a = self.codomain.arrow_map
        for v, w in vm.items():
            if w not in cod_v:
                raise ValidationError(f"vertex {v!r} maps outside the codomain")
        for an, bn in am.items():
            if bn not in cod_a:
                raise ValidationError(f"arrow {an!r} maps outside the codomain")
            a = self.domain.arrow_map[an]
            b = cod_a[bn]
            if vm[a.src] != b.src or vm[a.dst] != b.dst:
                raise ValidationError(f"arrow {an!r} endpoints do not commute")

    def vertex(self, v: str) -> str:
        return self.vertex_map[v]

    def arrow(self, a: str) -> str:
        return self.arrow_map[a]


def identity_morphism(q: Quiver) -> QuiverMorphism:
    return QuiverMorphism(q, q, {v: v for v in q.vertices}, {a.name: a.name for a in q.arrows})


def compose(outer: QuiverMorphism, inner: QuiverMorphism) -> QuiverMorphism:
    """outer after inner."""
    if inner.codomain != outer.domain:
        raise ValidationError("morphisms do not compose")
    return QuiverMorphism(
        inner.domain,
        outer.codomain,
        {v: outer.vertex_map[w] for v, w in inner.vertex_map.items()},
        {a: outer.arrow_map[b] for a, b in inner.arrow_map.items()},
    )


@dataclass(frozen=True)
class CoverCheck:
    ok: bool
    violation: str | None


def is_cover(m: QuiverMorphism, interior=None) -> CoverCheck:
    """Check the covering property: surjective, and locally bijective.

    Local bijectivity (arrows out of v biject with arrows out of the image,
    same for arrows in) is only required at ``interior`` vertices when that
    collection is given; surjectivity is always required of the whole map.
    """
    dom, cod = m.domain, m.codomain
    if set(m.vertex_map.values()) != set(cod.vertices):
        return CoverCheck(False, "vertex map not surjective")
    if set(m.arrow_map.values()) != set(cod.arrow_map):
        return CoverCheck(False, "arrow map not surjective")
    check_at = dom.vertices if interior is None else tuple(interior)
    for v in check_at:
        w = m.vertex_map[v]
        for kind, local, target in (
            ("out", dom.out_arrows[v], cod.out_arrows[w]),
            ("in", dom.in_arrows[v], cod.in_arrows[w]),
        ):
            images = [m.arrow_map[a.name] for a in local]
            if len(set(images)) != len(images):
                return CoverCheck(False, f"{kind}-arrows at {v!r} collapse")
            if set(images) != {a.name for a in target}:
                return CoverCheck(False, f"{kind}-arrows at {v!r} miss the fiber")
    return CoverCheck(True, None)


def universal_cover_window(q: Quiver, base: str, radius: int) -> tuple:
    """Ball of the universal cover: reduced paths from ``base`` up to ``radius``.

    Vertex ids encode the path ('~' for the root, then '.<arrow><+|->' per
    step); each non-root vertex carries the single arrow that created it,
    named like the vertex.  Returns (window quiver, covering morphism).
    """
    if base not in set(q.vertices):
        raise ValidationError(f"base vertex {base!r} not in quiver")
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    if not structure_report(q).connected:
        raise ValidationError("quiver is not connected")
    root = "~"
    verts = [root]
    arrows = []
    vmap = {root: base}
    amap = {}
    frontier = [(root, base, None)]  # (cover id, base vertex, dart to parent)
    for _ in range(radius):
        nxt = []
        for cid, bv, back in frontier:
            for a, sign in q.darts(bv):
                if back is not None and back == (a, -sign):
                    continue  # immediate backtrack is not reduced
                tag = "+" if sign > 0 else "-"
                child = f"{cid}.{a.name}{tag}"
                if child in vmap:
                    raise ValidationError(f"cover id collision at {child!r}")
                nb = a.dst if sign > 0 else a.src
                verts.append(child)
                vmap[child] = nb
                amap[child] = a.name
                if sign > 0:
                    arrows.append(Arrow(child, cid, child))
                else:
                    arrows.append(Arrow(child, child, cid))
                nxt.append((child, nb, (a, sign)))
        frontier = nxt
    window = Quiver(f"{q.name}_cover", tuple(verts), tuple(arrows))
    return window, QuiverMorphism(window, q, vmap, amap)


def tree_window_interior(window: Quiver, radius: int, root: str = "~") -> tuple:
    """Vertices of a universal-cover window at path length < radius."""
    adj = {v: set() for v in window.vertices}
    for a in window.arrows:
        adj[a.src].add(a.dst)
        adj[a.dst].add(a.src)
    dist = {root: 0}
    dq = deque([root])
    while dq:
        u = dq.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                dq.append(w)
    return tuple(v for v in window.vertices if dist.get(v, radius) < radius)
