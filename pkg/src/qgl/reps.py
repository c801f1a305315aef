"""Quiver representations over an exact field.

Hom and Ext via the two-term complex, rigidity, direct sums, a randomized
Fitting-style splitter into indecomposables, and reflection at sinks and
sources.  The conventions: the matrix of an arrow a: i -> j has shape
d_j x d_i and acts on column vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import DecompositionError, ReflectionError, ValidationError
from .linalg import (
    QQ,
    Field,
    Matrix,
    Subspace,
    express_rows_in_basis,
    hstack,
    next_prime,
)
from .quivers import Arrow, Quiver


@dataclass(frozen=True, eq=False)
class Representation:
    quiver: Quiver
    field: Field
    dims: dict
    mats: dict

    def __post_init__(self):
        q = self.quiver
        if set(self.dims) != set(q.vertices):
            raise ValidationError("dims must cover every vertex exactly")
        for v, d in self.dims.items():
            if not isinstance(d, int) or d < 0:
                raise ValidationError(f"bad dimension {d!r} at vertex {v!r}")
        if set(self.mats) != set(q.arrow_map):
            raise ValidationError("mats must cover every arrow exactly")
        for an, m in self.mats.items():
            a = q.arrow_map[an]
            if m.field != self.field:
                raise ValidationError(f"matrix for {an!r} over the wrong field")
            if (m.nrows, m.ncols) != (self.dims[a.dst], self.dims[a.src]):
                raise ValidationError(
                    f"matrix for {an!r} has shape {m.nrows}x{m.ncols}, "
                    f"expected {self.dims[a.dst]}x{self.dims[a.src]}"
                )

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim_vector(self) -> tuple:
        return tuple(self.dims[v] for v in self.quiver.vertices)

    def mat(self, arrow_name: str) -> Matrix:
        return self.mats[arrow_name]

    def __eq__(self, other):
        return (
            isinstance(other, Representation)
            and self.quiver == other.quiver
            and self.field == other.field
            and self.dims == other.dims
            and self.mats == other.mats
        )

    def __str__(self):
        ds = " ".join(f"{v}={self.dims[v]}" for v in self.quiver.vertices)
        return f"rep over {self.field} of {self.quiver.name}: {ds}"


def make_rep(quiver: Quiver, field: Field, dims: dict, mats: dict | None = None) -> Representation:
    """Factory: unmentioned dims are 0, unmentioned arrows get zero matrices."""
    unknown = set(dims) - set(quiver.vertices)
    if unknown:
        raise ValidationError(f"dims for unknown vertices: {sorted(unknown)}")
    dims = {v: dims.get(v, 0) for v in quiver.vertices}
    full = {}
    mats = mats or {}
    for a in quiver.arrows:
        nrows, ncols = dims[a.dst], dims[a.src]
        if a.name in mats:
            m = mats[a.name]
            if not isinstance(m, Matrix):
                rows = tuple(tuple(field.normalize(x) for x in row) for row in m)
                if len(rows) != nrows or any(len(r) != ncols for r in rows):
                    raise ValidationError(
                        f"matrix for {a.name!r} must be {nrows}x{ncols}"
                    )
                m = Matrix(field, nrows, ncols, rows)
            full[a.name] = m
        else:
            full[a.name] = Matrix.zero(field, nrows, ncols)
    extra = set(mats) - set(quiver.arrow_map)
    if extra:
        raise ValidationError(f"matrices for unknown arrows: {sorted(extra)}")
    return Representation(quiver, field, dims, full)


def simple_rep(quiver: Quiver, field: Field, v: str) -> Representation:
    return make_rep(quiver, field, {w: 1 if w == v else 0 for w in quiver.vertices})


def euler_form(q: Quiver, d: dict, e: dict) -> int:
    for vec in (d, e):
        unknown = set(vec) - set(q.vertices)
        if unknown:
            raise ValidationError(f"dims for unknown vertices: {sorted(unknown)}")
    s = sum(d.get(v, 0) * e.get(v, 0) for v in q.vertices)
    return s - sum(d.get(a.src, 0) * e.get(a.dst, 0) for a in q.arrows)


def hom_matrix(m: Representation, n: Representation) -> Matrix:
    """Matrix of f -> (N_a f_src - f_dst M_a)_a on the per-vertex Hom spaces.

    Columns enumerate entries of the f_i (vertex order, row-major); rows
    enumerate entries of the per-arrow blocks Hom(M_src, N_dst).
    """
    if m.quiver != n.quiver or m.field != n.field:
        raise ValidationError("hom_matrix needs two reps of one quiver over one field")
    q = m.quiver
    f = m.field
    col_ofs = {}
    c = 0
    for v in q.vertices:
        col_ofs[v] = c
        c += n.dims[v] * m.dims[v]
    row_ofs = {}
    r = 0
    for a in q.arrows:
        row_ofs[a.name] = r
        r += n.dims[a.dst] * m.dims[a.src]
    rows = [[f.zero()] * c for _ in range(r)]
    for a in q.arrows:
        na, ma = n.mats[a.name], m.mats[a.name]
        ms, mt = m.dims[a.src], m.dims[a.dst]
        ns, nt = n.dims[a.src], n.dims[a.dst]
        base = row_ofs[a.name]
        for i in range(nt):
            for b in range(ms):
                rr = base + i * ms + b
                # (N_a f_src)[i, b]
                for k in range(ns):
                    if na.entries[i][k]:
                        rows[rr][col_ofs[a.src] + k * ms + b] = f.add(
                            rows[rr][col_ofs[a.src] + k * ms + b], na.entries[i][k]
                        )
                # -(f_dst M_a)[i, b]
                for s in range(mt):
                    if ma.entries[s][b]:
                        rows[rr][col_ofs[a.dst] + i * mt + s] = f.sub(
                            rows[rr][col_ofs[a.dst] + i * mt + s], ma.entries[s][b]
                        )
    return Matrix(f, r, c, tuple(tuple(x) for x in rows))


def hom_ext_dims(m: Representation, n: Representation) -> tuple:
    """(dim Hom, dim Ext^1); their difference is the Euler form."""
    phi = hom_matrix(m, n)
    rk = phi.rank()
    return phi.ncols - rk, phi.nrows - rk


def hom_basis(m: Representation, n: Representation) -> tuple:
    """Basis of Hom(M, N) as dicts vertex -> Matrix (n_i x m_i)."""
    phi = hom_matrix(m, n)
    ker = phi.kernel()
    q = m.quiver
    out = []
    for vec in ker.entries:
        f = {}
        ofs = 0
        for v in q.vertices:
            ni, mi = n.dims[v], m.dims[v]
            f[v] = Matrix(
                m.field,
                ni,
                mi,
                tuple(tuple(vec[ofs + r * mi + s] for s in range(mi)) for r in range(ni)),
            )
            ofs += ni * mi
        out.append(f)
    return tuple(out)


@dataclass(frozen=True)
class Rigidity:
    rigid: bool
    exceptional: bool
    end_dim: int
    ext_dim: int


def rigidity_report(m: Representation) -> Rigidity:
    h, e = hom_ext_dims(m, m)
    return Rigidity(e == 0, e == 0 and h == 1, h, e)


@dataclass(frozen=True)
class DirectSum:
    rep: Representation
    summands: tuple
    offsets: dict  # vertex -> tuple of block start offsets, one per summand


def direct_sum(ms) -> DirectSum:
    ms = tuple(ms)
    if not ms:
        raise ValidationError("direct sum of nothing")
    q, f = ms[0].quiver, ms[0].field
    if any(m.quiver != q or m.field != f for m in ms):
        raise ValidationError("summands must share quiver and field")
    dims = {v: sum(m.dims[v] for m in ms) for v in q.vertices}
    offsets = {}
    for v in q.vertices:
        ofs, acc = [], 0
        for m in ms:
            ofs.append(acc)
            acc += m.dims[v]
        offsets[v] = tuple(ofs)
    mats = {}
    for a in q.arrows:
        rows = [[f.zero()] * dims[a.src] for _ in range(dims[a.dst])]
        for k, m in enumerate(ms):
            ro, co = offsets[a.dst][k], offsets[a.src][k]
            blk = m.mats[a.name]
            for i in range(blk.nrows):
                for j in range(blk.ncols):
                    rows[ro + i][co + j] = blk.entries[i][j]
        mats[a.name] = Matrix(f, dims[a.dst], dims[a.src], tuple(tuple(r) for r in rows))
    return DirectSum(Representation(q, f, dims, mats), ms, offsets)


def _endo_compose(g: dict, f: dict, q: Quiver) -> dict:
    return {v: g[v].mul(f[v]) for v in q.vertices}


def _to_fraction(c) -> Fraction:
    """sympy Rational/Integer -> fractions.Fraction."""
    r = c.as_numer_denom()
    return Fraction(int(r[0]), int(r[1]))


def _charpoly_coeffs(m: Matrix) -> list:
    """Ascending coefficients of det(X - m), as field elements."""
    import sympy

    f = m.field
    if m.nrows == 0:
        return [f.one()]
    if f.is_finite:
        sm = sympy.Matrix([[int(x) for x in row] for row in m.entries])
    else:
        sm = sympy.Matrix(
            [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m.entries]
        )
    cs = list(reversed(sm.charpoly().all_coeffs()))
    return [f.normalize(_to_fraction(sympy.Rational(c))) for c in cs]


def _factor_distinct(coeffs, field: Field) -> list:
    """Distinct monic irreducible factors of a polynomial, ascending coeffs.

    Constant factors are dropped; the rest are sorted by (degree, entries)
    so the splitting order is reproducible.
    """
    import sympy

    X = sympy.Symbol("X")
    if field.is_finite:
        expr = sum(sympy.Integer(int(c)) * X**i for i, c in enumerate(coeffs))
        _, facs = sympy.Poly(expr, X, modulus=field.p, symmetric=False).factor_list()
    else:
        expr = sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(coeffs))
        _, facs = sympy.Poly(expr, X, domain="QQ").factor_list()
    out = set()
    for poly, _mult in facs:
        cs = list(reversed(poly.all_coeffs()))
        if len(cs) < 2:
            continue
        lead = sympy.Rational(cs[-1])
        tup = tuple(field.normalize(_to_fraction(sympy.Rational(c) / lead)) for c in cs)
        out.add(tup)
    return sorted(out, key=lambda t: (len(t), tuple(str(c) for c in t)))


def _try_split(m: Representation, endo: dict):
    """Split m along the generalized eigenspaces of one endomorphism.

    Returns a list of (basis dict vertex -> Matrix rows) per piece, or None
    when the characteristic polynomial has a single distinct irreducible
    factor.
    """
    q, f = m.quiver, m.field
    total = [f.one()]
    per_vertex = {}
    for v in q.vertices:
        cs = _charpoly_coeffs(endo[v])
        per_vertex[v] = cs
        # multiply polynomials
        new = [f.zero()] * (len(total) + len(cs) - 1)
        for i, a in enumerate(total):
            for j, b in enumerate(cs):
                new[i + j] = f.add(new[i + j], f.mul(a, b))
        total = new
    factors = _factor_distinct(total, f)
    if len(factors) < 2:
        return None
    pieces = []
    for fac in factors:
        bases = {}
        for v in q.vertices:
            n = m.dims[v]
            if n == 0:
                bases[v] = Matrix(f, 0, 0, ())
                continue
            pf = endo[v].poly_at(fac)
            bases[v] = pf.power(n).kernel()
        pieces.append(bases)
    for v in q.vertices:
        if sum(b[v].nrows for b in pieces) != m.dims[v]:
            return None  # defensive; primary decomposition should be exact
    return pieces


def _subrep_on_bases(m: Representation, bases: dict) -> Representation:
    """Restrict m to the subrepresentation spanned per vertex by basis rows."""
    q, f = m.quiver, m.field
    dims = {v: bases[v].nrows for v in q.vertices}
    mats = {}
    for a in q.arrows:
        bs, bt = bases[a.src], bases[a.dst]
        img = bs.mul(m.mats[a.name].transpose())
        coeff = express_rows_in_basis(img, bt)
        if coeff is None:
            raise ValidationError(f"basis is not closed under arrow {a.name!r}")
        mats[a.name] = coeff.transpose()
    return Representation(q, f, dims, mats)


def _random_endo(basis, q: Quiver, field: Field, rng: random.Random) -> dict:
    if field.is_finite:
        coeffs = [rng.randrange(field.p) for _ in basis]
    else:
        coeffs = [rng.randrange(10) for _ in basis]
    out = {v: Matrix.zero(field, b.nrows, b.ncols) for v, b in basis[0].items()}
    for c, e in zip(coeffs, basis):
        if c:
            out = {v: out[v].add(e[v].scale(c)) for v in q.vertices}
    return out


def _split_search(m: Representation, seed: int, bound: int):
    """One splitting pass: deterministic endomorphism trials, then random.

    Returns pieces (list of per-vertex bases) or None if nothing split
    within the budget.  A None with end_dim == 1 is a certificate; with
    end_dim > 1 it is only evidence.
    """
    q, f = m.quiver, m.field
    basis = hom_basis(m, m)
    if len(basis) <= 1:
        return None, len(basis)
    trials = []
    trials.extend(basis)
    cap = 0
    for i in range(len(basis)):
        for j in range(len(basis)):
            if i != j:
                trials.append(_endo_compose(basis[i], basis[j], q))
                cap += 1
                if cap >= 100:
                    break
        if cap >= 100:
            break
    for endo in trials:
        pieces = _try_split(m, endo)
        if pieces:
            return pieces, len(basis)
    rng = random.Random(seed)
    for _ in range(bound * max(1, m.total_dim)):
        endo = _random_endo(basis, q, f, rng)
        pieces = _try_split(m, endo)
        if pieces:
            return pieces, len(basis)
    return None, len(basis)


def _lift_entries(m: Representation, p: int) -> Representation:
    """Reinterpret the integer entries of a finite-field rep over GF(p)."""
    f2 = Field(p)
    mats = {
        an: Matrix.of(f2, [[int(x) for x in row] for row in mat.entries])
        for an, mat in m.mats.items()
    }
    return Representation(m.quiver, f2, dict(m.dims), mats)


def split_summands(m: Representation, seed: int = 0, bound: int = 64) -> tuple:
    """Flat tuple of indecomposable summands of m, deterministically ordered.

    Splits along generalized eigenspaces of endomorphisms: first every Hom
    basis element and their pairwise composites, then seeded random
    combinations, up to ``bound * total_dim`` random trials per piece.
    end_dim == 1 certifies indecomposability immediately.  When the budget
    runs out over a finite field, the trials are repeated with the entries
    reinterpreted over the next two larger primes as a cross-check: if a
    lift splits where the base field did not, one doubled-budget base pass
    runs, and a DecompositionError is raised if it still finds nothing.
    Rational representations that exhaust the budget are reported
    indecomposable.
    """
    if m.total_dim == 0:
        return ()
    pieces, end_dim = _split_search(m, seed, bound)
    if pieces is None:
        if end_dim > 1 and m.field.is_finite:
            p1 = next_prime(m.field.p)
            p2 = next_prime(p1)
            lifted_split = any(
                _split_search(_lift_entries(m, p), seed + 1, bound)[0] is not None
                for p in (p1, p2)
            )
            if lifted_split:
                pieces, _ = _split_search(m, seed + 2, 2 * bound)
                if pieces is None:
                    raise DecompositionError(
                        "splitting not found within trial budget, but the entry "
                        "pattern splits over larger primes"
                    )
        if pieces is None:
            return (m,)
    parts = []
    for k, bases in enumerate(pieces):
        sub = _subrep_on_bases(m, bases)
        parts.extend(split_summands(sub, seed=seed + 17 * (k + 1), bound=bound))
    return tuple(sorted(parts, key=lambda r: (r.total_dim, r.dim_vector())))


def decompose(m: Representation, seed: int = 0, bound: int = 64) -> tuple:
    """Indecomposable (summand, multiplicity) pairs, deterministically ordered."""
    return group_summands(split_summands(m, seed=seed, bound=bound), seed=seed)


def _invertible_everywhere(f: dict, m: Representation) -> bool:
    for v in m.quiver.vertices:
        mat = f[v]
        if mat.nrows != mat.ncols or mat.rank() != mat.nrows:
            return False
    return True


def are_isomorphic(a: Representation, b: Representation, seed: int = 0) -> bool:
    """Isomorphism test by exhibiting u: A -> B, v: B -> A with vu invertible.

    Basis pairs are tried first, then seeded random combinations; for the
    small rigid inputs this package targets the evidence search is
    effectively exact (Hom spaces are tiny).
    """
    if a.quiver != b.quiver or a.field != b.field:
        return False
    if a.dims != b.dims:
        return False
    if a.total_dim == 0:
        return True
    us = hom_basis(a, b)
    vs = hom_basis(b, a)
    if not us or not vs:
        return False
    q = a.quiver
    for u in us:
        for v in vs:
            if _invertible_everywhere(_endo_compose(v, u, q), a):
                return True
    rng = random.Random(seed)
    for _ in range(32):
        u = _random_endo(us, q, a.field, rng)
        v = _random_endo(vs, q, a.field, rng)
        if _invertible_everywhere(_endo_compose(v, u, q), a):
            return True
    return False


def group_summands(parts, seed: int = 0) -> tuple:
    """Group a summand list into (representative, multiplicity) pairs."""
    groups = []
    for p in parts:
        for g in groups:
            if are_isomorphic(g[0], p, seed=seed):
                g[1] += 1
                break
        else:
            groups.append([p, 1])
    return tuple((g[0], g[1]) for g in groups)


def op_rep(m: Representation) -> Representation:
    # keep the name so op of op is the identity on the nose
    qop = m.quiver.op(m.quiver.name)
    return Representation(
        qop,
        m.field,
        dict(m.dims),
        {an: mat.transpose() for an, mat in m.mats.items()},
    )


def delete_vertex(m: Representation, v: str) -> Representation:
    q = m.quiver
    if v not in set(q.vertices):
        raise ValidationError(f"no vertex {v!r}")
    keep_v = tuple(w for w in q.vertices if w != v)
    keep_a = tuple(a for a in q.arrows if v not in (a.src, a.dst))
    q2 = Quiver(q.name, keep_v, keep_a)
    return Representation(
        q2,
        m.field,
        {w: m.dims[w] for w in keep_v},
        {a.name: m.mats[a.name] for a in keep_a},
    )


def delete_leaf(m: Representation, l: str) -> Representation:
    """Forget the space and the single arrow at a leaf vertex."""
    if l in set(m.quiver.vertices) and m.quiver.degree(l) != 1:
        raise ValidationError(f"vertex {l!r} is not a leaf")
    return delete_vertex(m, l)


def reflect(m: Representation, l: str, e: dict | None = None) -> tuple:
    """Reflection functor at a sink or source l; optionally reflects e too.

    At a sink the new space is the kernel of the assembled map into M_l and
    every arrow at l is reversed, its new matrix the corresponding block of
    the kernel basis.  Sources go through the opposite representation.
    Returns (reflected rep, reflected e or None); the reflected dimension
    sigma_l(e)_l = sum of adjacent entries - e_l must be nonnegative.
    """
    q = m.quiver
    if l not in set(q.vertices):
        raise ReflectionError(f"no vertex {l!r}")
    if any(a.src == a.dst == l for a in q.arrows):
        raise ReflectionError(f"cannot reflect at {l!r}: loop present")
    inc = q.in_arrows[l]
    out = q.out_arrows[l]
    if inc and out:
        raise ReflectionError(f"vertex {l!r} is neither sink nor source")
    se = None
    if e is not None:
        adj = sum(e[a.src] for a in inc) + sum(e[a.dst] for a in out)
        new_el = adj - e[l]
        if new_el < 0:
            raise ReflectionError(f"reflection not applicable to this e at {l!r}")
        se = dict(e)
        se[l] = new_el
    if out and not inc:
        mo = op_rep(m)
        ro, _ = reflect(mo, l, None)
        return op_rep(ro), se
    # sink (or isolated vertex: kernel of the empty map is the zero space)
    f = m.field
    if inc:
        assembled = hstack([m.mats[a.name] for a in inc])
    else:
        assembled = Matrix.zero(f, m.dims[l], 0)
    ker = assembled.kernel()
    k = ker.nrows
    dims = dict(m.dims)
    dims[l] = k
    arrows = []
    mats = {}
    col = {}
    c = 0
    for a in inc:
        col[a.name] = c
        c += m.dims[a.src]
    for a in q.arrows:
        if a.dst == l:
            arrows.append(Arrow(a.name, l, a.src))
            c0 = col[a.name]
            w = m.dims[a.src]
            block = tuple(row[c0 : c0 + w] for row in ker.entries)
            mats[a.name] = Matrix(f, k, w, block).transpose()
        else:
            arrows.append(a)
            mats[a.name] = m.mats[a.name]
    q2 = Quiver(q.name, q.vertices, tuple(arrows))
    return Representation(q2, f, dims, mats), se


def rep_is_integral(m: Representation) -> bool:
    """True for rational reps whose entries are all integers."""
    if m.field.is_finite:
        return False
    return all(x.denominator == 1 for mat in m.mats.values() for row in mat.entries for x in row)


def reduce_rep(m: Representation, p: int) -> Representation:
    """Reduce an integral rational representation mod p."""
    if m.field.is_finite:
        raise ValidationError("can only reduce a rational representation")
    if not rep_is_integral(m):
        raise ValidationError("representation has non-integer entries")
    f2 = Field(p)
    # Matrix.of would infer ncols 0 for empty matrices; keep the shape
    mats = {
        an: Matrix(
            f2,
            mat.nrows,
            mat.ncols,
            tuple(tuple(f2.normalize(x) for x in row) for row in mat.entries),
        )
        for an, mat in m.mats.items()
    }
    return Representation(m.quiver, f2, dict(m.dims), mats)


def subrep_closure_check(m: Representation, spaces: dict) -> bool:
    """Do the given subspaces form a subrepresentation?"""
    for a in m.quiver.arrows:
        u: Subspace = spaces[a.src]
        if not spaces[a.dst].contains(u.image(m.mats[a.name])):
            return False
    return True
