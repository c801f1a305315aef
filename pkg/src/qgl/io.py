"""Line-oriented text formats: quivers, representations, graded
representations on cover windows, charts.

Shared conventions: UTF-8, LF, '#' starts a comment, blank lines are
ignored, tokens are whitespace-separated.  Parsing is strict; errors
carry the path and line number.  Dimension-vector syntax (`v=k,...`)
requires vertex ids free of ',' and '='; everything the package writes
satisfies that.
"""

from __future__ import annotations

from .charts import PeelStep, RationalChart, chart_from_steps
from .covers import (
    GradedRepresentation,
    build_cover_window,
    cover_arrow_id,
    cover_vertex_id,
    split_cover_id,
)
from .errors import ParseError, ValidationError
from .linalg import Field
from .quivers import Arrow, Quiver
from .reps import Representation, make_rep


def _lines(text: str):
    """(lineno, tokens) for each non-blank, non-comment line."""
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((i, body.split()))
    return out


def load_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise ParseError(str(ex), path=path) from None


# ---------------------------------------------------------------- quivers


def parse_quiver_text(text: str, path: str | None = None) -> Quiver:
    rows = _lines(text)
    if not rows or rows[0][1][0] != "quiver" or len(rows[0][1]) != 2:
        ln = rows[0][0] if rows else None
        raise ParseError("expected 'quiver <name>' header", line=ln, path=path)
    name = rows[0][1][1]
    vertices, arrows = [], []
    seen_arrow = False
    for ln, toks in rows[1:]:
        if toks[0] == "vertex":
            if len(toks) != 2:
                raise ParseError("expected 'vertex <id>'", line=ln, path=path)
            if seen_arrow:
                raise ParseError("vertex lines must precede arrow lines", line=ln, path=path)
            if toks[1] in vertices:
                raise ParseError(f"duplicate vertex {toks[1]!r}", line=ln, path=path)
            vertices.append(toks[1])
        elif toks[0] == "arrow":
            if len(toks) != 4:
                raise ParseError("expected 'arrow <id> <src> <dst>'", line=ln, path=path)
            seen_arrow = True
            aid, src, dst = toks[1:]
            if any(a.name == aid for a in arrows):
                raise ParseError(f"duplicate arrow {aid!r}", line=ln, path=path)
            if src not in vertices or dst not in vertices:
                raise ParseError(f"arrow {aid!r} references an unknown vertex", line=ln, path=path)
            arrows.append(Arrow(aid, src, dst))
        else:
            raise ParseError(f"unknown keyword {toks[0]!r}", line=ln, path=path)
    try:
        return Quiver(name, tuple(vertices), tuple(arrows))
    except ValidationError as ex:
        raise ParseError(str(ex), path=path) from None


def serialize_quiver(q: Quiver) -> str:
    out = [f"quiver {q.name}"]
    out += [f"vertex {v}" for v in q.vertices]
    out += [f"arrow {a.name} {a.src} {a.dst}" for a in q.arrows]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------- representations


def _parse_field(tok: str, ln, path) -> Field:
    if tok == "Q":
        return Field(None)
    if tok.startswith("F"):
        try:
            return Field(int(tok[1:]))
        except (ValueError, ValidationError):
            raise ParseError(f"bad field {tok!r}", line=ln, path=path) from None
    raise ParseError(f"bad field {tok!r} (expected Q or F<p>)", line=ln, path=path)


def _parse_rep_header(toks, ln, path):
    if len(toks) != 4 or toks[0] != "rep" or toks[2] != "over":
        raise ParseError("expected 'rep <name> over <field>' header", line=ln, path=path)
    return toks[1], _parse_field(toks[3], ln, path)


def _parse_matrix_block(rows, i, field, nrows, ncols, path):
    """Read nrows lines of ncols entries starting at rows[i]."""
    entries = []
    for _ in range(nrows):
        if i >= len(rows):
            raise ParseError("matrix block ends early", line=rows[-1][0], path=path)
        ln, toks = rows[i]
        if len(toks) != ncols:
            raise ParseError(f"expected {ncols} entries, got {len(toks)}", line=ln, path=path)
        try:
            entries.append([field.parse_element(t) for t in toks])
        except (ValueError, ZeroDivisionError):
            raise ParseError("bad matrix entry", line=ln, path=path) from None
        i += 1
    return entries, i


def parse_rep_text(text: str, quiver: Quiver, path: str | None = None) -> tuple:
    """Returns (name, Representation)."""
    rows = _lines(text)
    if not rows:
        raise ParseError("empty representation file", path=path)
    name, field = _parse_rep_header(rows[0][1], rows[0][0], path)
    dims = {}
    mats = {}
    i = 1
    while i < len(rows):
        ln, toks = rows[i]
        if toks[0] == "dim":
            if len(toks) != 3:
                raise ParseError("expected 'dim <vertex> <n>'", line=ln, path=path)
            v = toks[1]
            if v not in quiver.vertex_index:
                raise ParseError(f"unknown vertex {v!r}", line=ln, path=path)
            if v in dims:
                raise ParseError(f"duplicate dim for {v!r}", line=ln, path=path)
            try:
                dims[v] = int(toks[2])
            except ValueError:
                raise ParseError(f"bad dimension {toks[2]!r}", line=ln, path=path) from None
            if dims[v] < 0:
                raise ParseError("negative dimension", line=ln, path=path)
            i += 1
        elif toks[0] == "mat":
            if len(toks) != 2:
                raise ParseError("expected 'mat <arrow-id>'", line=ln, path=path)
            a = quiver.arrow_map.get(toks[1])
            if a is None:
                raise ParseError(f"unknown arrow {toks[1]!r}", line=ln, path=path)
            if a.name in mats:
                raise ParseError(f"duplicate matrix for {a.name!r}", line=ln, path=path)
            nrows, ncols = dims.get(a.dst, 0), dims.get(a.src, 0)
            if nrows == 0 or ncols == 0:
                raise ParseError(
                    f"matrix for {a.name!r} has a zero-dimensional side; omit it",
                    line=ln,
                    path=path,
                )
            mats[a.name], i = _parse_matrix_block(rows, i + 1, field, nrows, ncols, path)
        else:
            raise ParseError(f"unknown keyword {toks[0]!r}", line=ln, path=path)
    for a in quiver.arrows:
        if a.name not in mats and dims.get(a.src, 0) > 0 and dims.get(a.dst, 0) > 0:
            raise ParseError(f"missing matrix for arrow {a.name!r}", path=path)
    full_dims = {v: dims.get(v, 0) for v in quiver.vertices}
    try:
        return name, make_rep(quiver, field, full_dims, mats)
    except ValidationError as ex:
        raise ParseError(str(ex), path=path) from None


def serialize_rep(m: Representation, name: str = "m") -> str:
    out = [f"rep {name} over {m.field}"]
    for v in m.quiver.vertices:
        if m.dims[v]:
            out.append(f"dim {v} {m.dims[v]}")
    for a in m.quiver.arrows:
        mat = m.mats[a.name]
        if mat.nrows == 0 or mat.ncols == 0:
            continue
        out.append(f"mat {a.name}")
        for row in mat.entries:
            out.append(" ".join(m.field.format_element(x) for x in row))
    return "\n".join(out) + "\n"


# ---------------------------------------------------- graded representations


def parse_graded_text(text: str, base: Quiver, path: str | None = None) -> tuple:
    """Returns (name, GradedRepresentation).

    Dim lines fix the window: every character mentioned by a `dim` line is
    materialized, dim-0 lines included, so a window can be wider than the
    support.  Dim lines must precede mat blocks.
    """
    rows = _lines(text)
    if not rows or rows[0][1] != ["cover-of", base.name]:
        ln = rows[0][0] if rows else None
        raise ParseError(f"expected 'cover-of {base.name}' header", line=ln, path=path)
    rows = rows[1:]
    if not rows:
        raise ParseError("missing representation header", path=path)
    name, field = _parse_rep_header(rows[0][1], rows[0][0], path)

    dim_rows = []
    i = 1
    while i < len(rows) and rows[i][1][0] == "dim":
        ln, toks = rows[i]
        if len(toks) != 3:
            raise ParseError("expected 'dim <vertex> <n>'", line=ln, path=path)
        try:
            v, chi = split_cover_id(toks[1])
            n = int(toks[2])
        except (ValidationError, ValueError) as ex:
            raise ParseError(str(ex), line=ln, path=path) from None
        if v not in base.vertex_index:
            raise ParseError(f"unknown base vertex {v!r}", line=ln, path=path)
        if n < 0:
            raise ParseError("negative dimension", line=ln, path=path)
        dim_rows.append((ln, v, chi, n))
        i += 1
    if not dim_rows:
        raise ParseError("graded file needs at least one dim line", path=path)
    window = build_cover_window(base, {chi for _, _, chi, _ in dim_rows})
    dims = {}
    for ln, v, chi, n in dim_rows:
        ident = cover_vertex_id(v, chi)
        if ident in dims:
            raise ParseError(f"duplicate dim for {ident!r}", line=ln, path=path)
        dims[ident] = n

    mats = {}
    wq = window.quiver
    while i < len(rows):
        ln, toks = rows[i]
        if toks[0] == "dim":
            raise ParseError("dim lines must precede mat blocks", line=ln, path=path)
        if toks[0] != "mat" or len(toks) != 2:
            raise ParseError("expected 'mat <arrow-id>'", line=ln, path=path)
        try:
            a, chi = split_cover_id(toks[1])
        except ValidationError as ex:
            raise ParseError(str(ex), line=ln, path=path) from None
        ident = cover_arrow_id(a, chi)
        arr = wq.arrow_map.get(ident)
        if arr is None:
            raise ParseError(f"arrow {toks[1]!r} is not in the window", line=ln, path=path)
        if ident in mats:
            raise ParseError(f"duplicate matrix for {ident!r}", line=ln, path=path)
        nrows, ncols = dims.get(arr.dst, 0), dims.get(arr.src, 0)
        if nrows == 0 or ncols == 0:
            raise ParseError(
                f"matrix for {ident!r} has a zero-dimensional side; omit it",
                line=ln,
                path=path,
            )
        mats[ident], i = _parse_matrix_block(rows, i + 1, field, nrows, ncols, path)
    for arr in wq.arrows:
        if arr.name not in mats and dims.get(arr.src, 0) > 0 and dims.get(arr.dst, 0) > 0:
            raise ParseError(f"missing matrix for window arrow {arr.name!r}", path=path)
    full_dims = {v: dims.get(v, 0) for v in wq.vertices}
    try:
        return name, GradedRepresentation(window, make_rep(wq, field, full_dims, mats))
    except ValidationError as ex:
        raise ParseError(str(ex), path=path) from None


def serialize_graded(g: GradedRepresentation, name: str = "m") -> str:
    base = g.window.base
    out = [f"cover-of {base.name}", f"rep {name} over {g.field}"]
    for chi in g.window.chars:
        pinned = False
        for v in base.vertices:
            d = g.rep.dims[cover_vertex_id(v, chi)]
            if d:
                out.append(f"dim {cover_vertex_id(v, chi)} {d}")
                pinned = True
        if not pinned:
            # keep the character in the window on reread
            out.append(f"dim {cover_vertex_id(base.vertices[0], chi)} 0")
    for arr in g.window.quiver.arrows:
        mat = g.rep.mats[arr.name]
        if mat.nrows == 0 or mat.ncols == 0:
            continue
        out.append(f"mat {arr.name}")
        for row in mat.entries:
            out.append(" ".join(g.field.format_element(x) for x in row))
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ charts


def parse_dim_vector(s: str, quiver: Quiver) -> dict:
    """'v=k,...'; unmentioned vertices get 0."""
    e = {v: 0 for v in quiver.vertices}
    s = s.strip()
    if not s:
        return e
    for part in s.split(","):
        if "=" not in part:
            raise ParseError(f"bad dimension entry {part!r} (expected v=k)")
        v, k = part.rsplit("=", 1)
        if v not in quiver.vertex_index:
            raise ParseError(f"unknown vertex {v!r} in dimension vector")
        try:
            e[v] = int(k)
        except ValueError:
            raise ParseError(f"bad dimension entry {part!r}") from None
    return e


def format_dim_vector(e: dict, quiver: Quiver) -> str:
    return ",".join(f"{v}={e[v]}" for v in quiver.vertices)


def _kv_token(tok: str, key: str, ln, path) -> str:
    if not tok.startswith(key + "="):
        raise ParseError(f"expected {key}=..., got {tok!r}", line=ln, path=path)
    return tok[len(key) + 1 :]


def parse_chart_text(text: str, m: Representation, path: str | None = None) -> RationalChart:
    rows = _lines(text)
    if not rows or rows[0][1] != ["chart"]:
        ln = rows[0][0] if rows else None
        raise ParseError("expected 'chart' header", line=ln, path=path)
    if len(rows) < 3 or rows[1][1][0] != "e" or rows[2][1][0] != "dim":
        raise ParseError("expected 'e ...' and 'dim <n>' after the header", path=path)
    ln, toks = rows[1]
    if len(toks) != 2:
        raise ParseError("expected 'e v=k,...'", line=ln, path=path)
    try:
        e = parse_dim_vector(toks[1], m.quiver)
    except ParseError as ex:
        raise ParseError(ex.msg, line=ln, path=path) from None
    ln, toks = rows[2]
    if len(toks) != 2 or not toks[1].isdigit():
        raise ParseError("expected 'dim <n>'", line=ln, path=path)
    claimed_dim = int(toks[1])

    steps = []
    for ln, toks in rows[3:]:
        if toks[0] != "peel" or len(toks) != 6:
            raise ParseError(
                "expected 'peel <leaf> <mode> r=<int> cell=<a>x<b> pivots=<cols>'",
                line=ln,
                path=path,
            )
        leaf, mode = toks[1], toks[2]
        if mode not in ("sink", "source", "drop", "base"):
            raise ParseError(f"unknown peel mode {mode!r}", line=ln, path=path)
        r_s = _kv_token(toks[3], "r", ln, path)
        cell_s = _kv_token(toks[4], "cell", ln, path)
        piv_s = _kv_token(toks[5], "pivots", ln, path)
        try:
            r = int(r_s)
            a, b = cell_s.split("x")
            cell = (int(a), int(b))
            pivots = tuple(int(p) for p in piv_s.split(",")) if piv_s else ()
        except ValueError:
            raise ParseError("bad peel parameters", line=ln, path=path) from None
        try:
            steps.append(PeelStep(leaf, mode, None, r, pivots, cell))
        except ValidationError as ex:
            raise ParseError(str(ex), line=ln, path=path) from None
    chart = chart_from_steps(m, e, steps)
    if chart.dim != claimed_dim:
        raise ParseError(
            f"header claims dimension {claimed_dim}, steps give {chart.dim}", path=path
        )
    return chart


def serialize_chart(chart: RationalChart) -> str:
    out = [
        "chart",
        f"e {format_dim_vector(chart.e, chart.rep.quiver)}",
        f"dim {chart.dim}",
    ]
    for s in chart.steps:
        piv = ",".join(str(p) for p in s.pivots)
        out.append(
            f"peel {s.leaf} {s.mode} r={s.rank} cell={s.cell[0]}x{s.cell[1]} pivots={piv}"
        )
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ inputs


def _sniff(text: str) -> str:
    rows = _lines(text)
    return rows[0][1][0] if rows else ""


def parse_inputs(paths) -> tuple:
    """Classify and parse input files: exactly one quiver file plus any
    number of representation / graded-representation files.

    Returns (Quiver, ((name, Representation | GradedRepresentation), ...))
    with the representations in argument order.
    """
    texts = [(p, load_text(p)) for p in paths]
    quivers = [(p, t) for p, t in texts if _sniff(t) == "quiver"]
    if len(quivers) != 1:
        raise ParseError("need exactly one quiver file among the inputs")
    quiver = parse_quiver_text(quivers[0][1], path=quivers[0][0])
    reps = []
    for p, t in texts:
        kind = _sniff(t)
        if kind == "quiver":
            continue
        if kind == "rep":
            reps.append(parse_rep_text(t, quiver, path=p))
        elif kind == "cover-of":
            reps.append(parse_graded_text(t, quiver, path=p))
        else:
            raise ParseError(f"unrecognized file (starts with {kind!r})", path=p)
    return quiver, tuple(reps)
