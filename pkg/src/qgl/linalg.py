"""Exact linear algebra over prime fields and the rationals.

Everything here is deterministic and exact: elements are Python ints in
[0, p) for GF(p) and ``fractions.Fraction`` for the rationals.  Matrices
and subspaces are immutable; a Subspace keeps its basis in reduced row
echelon form, so equal subspaces compare equal as values.

Speed was traded for predictability throughout.  The dimensions that show
up in practice (a few dozen) and the enumeration bounds q^dim <= 10^6 keep
pure Python comfortably fast.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import ValidationError

_MAX_PRIME = 2**31


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    k = n + 1
    while not _is_prime(k):
        k += 1
    return k


@dataclass(frozen=True)
class Field:
    """GF(p) for prime p, or the rationals when p is None."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or not _is_prime(self.p):
                raise ValidationError(f"field order {self.p!r} is not prime")
            if self.p >= _MAX_PRIME:
                raise ValidationError(f"field order {self.p} too large (< 2^31)")

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def normalize(self, x):
        if self.p is not None:
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ValidationError(f"denominator of {x} vanishes mod {self.p}")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if self.p is not None:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(a, -1, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return Fraction(1) / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def elements(self):
        """All field elements; finite fields only."""
        if self.p is None:
            raise ValidationError("cannot enumerate the rationals")
        return range(self.p)

    def parse_element(self, s: str):
        s = s.strip()
        if self.p is not None:
            return int(s) % self.p
        return Fraction(s)

    def format_element(self, x) -> str:
        return str(x)

    def __str__(self):
        return "Q" if self.p is None else f"F{self.p}"


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)


@dataclass(frozen=True)
class Matrix:
    """Immutable matrix; entries is a tuple of row tuples."""

    field: Field
    nrows: int
    ncols: int
    entries: tuple

    @staticmethod
    def of(field: Field, rows) -> "Matrix":
        ent = tuple(tuple(field.normalize(x) for x in row) for row in rows)
        n = len(ent)
        m = len(ent[0]) if n else 0
        if any(len(r) != m for r in ent):
            raise ValidationError("ragged matrix rows")
        return Matrix(field, n, m, ent)

    @staticmethod
    def zero(field: Field, nrows: int, ncols: int) -> "Matrix":
        row = (field.zero(),) * ncols
        return Matrix(field, nrows, ncols, (row,) * nrows)

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return Matrix(
            field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def is_zero(self) -> bool:
        z = self.field.zero()
        return all(x == z for r in self.entries for x in r)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field,
            self.ncols,
            self.nrows,
            tuple(zip(*self.entries)) if self.nrows else ((),) * self.ncols,
        )

    def add(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        f = self.field
        return Matrix(
            self.field,
            self.nrows,
            self.ncols,
            tuple(
                tuple(f.add(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def sub(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        f = self.field
        return Matrix(
            self.field,
            self.nrows,
            self.ncols,
            tuple(
                tuple(f.sub(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.normalize(c)
        return Matrix(
            self.field,
            self.nrows,
            self.ncols,
            tuple(tuple(f.mul(c, x) for x in r) for r in self.entries),
        )

    def mul(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise ValidationError("field mismatch")
        if self.ncols != other.nrows:
            raise ValidationError(
                f"shape mismatch {self.nrows}x{self.ncols} * {other.nrows}x{other.ncols}"
            )
        f = self.field
        p = f.p
        ot = other.transpose().entries
        if p is not None:
            rows = tuple(
                tuple(sum(a * b for a, b in zip(r, c)) % p for c in ot) for r in self.entries
            )
        else:
            rows = tuple(
                tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in ot)
                for r in self.entries
            )
        return Matrix(self.field, self.nrows, other.ncols, rows)

    def apply(self, vec: tuple) -> tuple:
        """Matrix times column vector (vec given as a flat tuple)."""
        if len(vec) != self.ncols:
            raise ValidationError("vector length mismatch")
        f = self.field
        out = []
        for r in self.entries:
            acc = f.zero()
            for a, b in zip(r, vec):
                acc = f.add(acc, f.mul(a, b))
            out.append(acc)
        return tuple(out)

    def power(self, k: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValidationError("power of non-square matrix")
        acc = Matrix.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                acc = acc.mul(base)
            base = base.mul(base)
            k >>= 1
        return acc

    def poly_at(self, coeffs) -> "Matrix":
        """Evaluate a polynomial (ascending coeffs) at this square matrix."""
        if self.nrows != self.ncols:
            raise ValidationError("poly_at needs a square matrix")
        f = self.field
        eye = Matrix.identity(f, self.nrows)
        acc = Matrix.zero(f, self.nrows, self.nrows)
        for c in reversed(list(coeffs)):
            acc = acc.mul(self).add(eye.scale(c))
        return acc

    def rref(self) -> tuple["Matrix", tuple]:
        """Reduced row echelon form and the pivot column indices."""
        f = self.field
        rows = [list(r) for r in self.entries]
        pivots = []
        r = 0
        for c in range(self.ncols):
            pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if pr is None:
                continue
            rows[r], rows[pr] = rows[pr], rows[r]
            inv = f.inv(rows[r][c])
            rows[r] = [f.mul(inv, x) for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    m = rows[i][c]
                    rows[i] = [f.sub(x, f.mul(m, y)) for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return Matrix(f, self.nrows, self.ncols, tuple(tuple(r_) for r_ in rows)), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "Matrix":
        """Basis of the right kernel, as rows, in RREF."""
        R, pivots = self.rref()
        f = self.field
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [f.zero()] * self.ncols
            v[fc] = f.one()
            for i, pc in enumerate(pivots):
                v[pc] = f.neg(R.entries[i][fc])
            basis.append(tuple(v))
        if not basis:
            return Matrix(f, 0, self.ncols, ())
        return Matrix(f, len(basis), self.ncols, tuple(basis)).rref()[0]

    def solve(self, b: tuple) -> tuple | None:
        """One solution x of self @ x = b, or None."""
        f = self.field
        aug = Matrix(
            f,
            self.nrows,
            self.ncols + 1,
            tuple(r + (f.normalize(v),) for r, v in zip(self.entries, b)),
        )
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [f.zero()] * self.ncols
        for i, pc in enumerate(pivots):
            x[pc] = R.entries[i][self.ncols]
        return tuple(x)

    def _same_shape(self, other: "Matrix"):
        if self.field != other.field:
            raise ValidationError("field mismatch")
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValidationError("shape mismatch")

    def __str__(self):
        return "\n".join(" ".join(self.field.format_element(x) for x in r) for r in self.entries)


def hstack(mats) -> Matrix:
    mats = list(mats)
    if not mats:
        raise ValidationError("hstack of nothing")
    f = mats[0].field
    n = mats[0].nrows
    if any(m.field != f or m.nrows != n for m in mats):
        raise ValidationError("hstack shape mismatch")
    rows = tuple(reduce(lambda a, b: a + b, (m.entries[i] for m in mats)) for i in range(n))
    return Matrix(f, n, sum(m.ncols for m in mats), rows)


def vstack(mats) -> Matrix:
    mats = list(mats)
    if not mats:
        raise ValidationError("vstack of nothing")
    f = mats[0].field
    c = mats[0].ncols
    if any(m.field != f or m.ncols != c for m in mats):
        raise ValidationError("vstack shape mismatch")
    return Matrix(f, sum(m.nrows for m in mats), c, tuple(r for m in mats for r in m.entries))


def block_diag(mats) -> Matrix:
    mats = list(mats)
    if not mats:
        raise ValidationError("block_diag of nothing")
    f = mats[0].field
    n = sum(m.nrows for m in mats)
    c = sum(m.ncols for m in mats)
    out = [[f.zero()] * c for _ in range(n)]
    ro = co = 0
    for m in mats:
        for i in range(m.nrows):
            for j in range(m.ncols):
                out[ro + i][co + j] = m.entries[i][j]
        ro += m.nrows
        co += m.ncols
    return Matrix(f, n, c, tuple(tuple(r) for r in out))


def solve_matrix(a: Matrix, b: Matrix) -> Matrix | None:
    """X with a @ X = b, or None if some column is unsolvable."""
    if a.nrows != b.nrows:
        raise ValidationError("solve_matrix shape mismatch")
    cols = []
    for j in range(b.ncols):
        x = a.solve(b.col(j))
        if x is None:
            return None
        cols.append(x)
    if not cols:
        return Matrix(a.field, a.ncols, 0, ((),) * a.ncols)
    return Matrix(a.field, a.ncols, b.ncols, tuple(zip(*cols)) if a.ncols else ())


def express_rows_in_basis(rows: Matrix, basis: Matrix) -> Matrix | None:
    """C with C @ basis = rows, or None if a row is outside the span."""
    sol = solve_matrix(basis.transpose(), rows.transpose())
    return sol.transpose() if sol is not None else None


def rref_rank(m: Matrix) -> tuple:
    """Canonical reduced row echelon form together with the rank."""
    r, pivots = m.rref()
    return r, len(pivots)


def kernel_basis(m: Matrix):
    """Solution space of m x = 0 inside field^ncols."""
    return Subspace(m.field, m.ncols, m.kernel())


@dataclass(frozen=True)
class Subspace:
    """Subspace of field^ambient; basis rows always in RREF, no zero rows."""

    field: Field
    ambient: int
    basis: Matrix

    @staticmethod
    def from_rows(field: Field, ambient: int, rows) -> "Subspace":
        rows = [tuple(field.normalize(x) for x in r) for r in rows]
        if any(len(r) != ambient for r in rows):
            raise ValidationError("row length != ambient dimension")
        if not rows:
            return Subspace(field, ambient, Matrix(field, 0, ambient, ()))
        m, pivots = Matrix(field, len(rows), ambient, tuple(rows)).rref()
        keep = m.entries[: len(pivots)]
        return Subspace(field, ambient, Matrix(field, len(keep), ambient, keep))

    @staticmethod
    def zero(field: Field, ambient: int) -> "Subspace":
        return Subspace(field, ambient, Matrix(field, 0, ambient, ()))

    @staticmethod
    def full(field: Field, ambient: int) -> "Subspace":
        return Subspace(field, ambient, Matrix.identity(field, ambient))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def contains_vector(self, vec) -> bool:
        f = self.field
        v = [f.normalize(x) for x in vec]
        if len(v) != self.ambient:
            raise ValidationError("vector length != ambient dimension")
        for row in self.basis.entries:
            pc = next(j for j, x in enumerate(row) if x)
            if v[pc]:
                c = v[pc]
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, row)]
        return all(x == f.zero() for x in v)

    def _compat(self, other: "Subspace"):
        if self.field != other.field or self.ambient != other.ambient:
            raise ValidationError("subspaces of different ambient spaces")

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.basis.entries)

    def sum(self, other: "Subspace") -> "Subspace":
        self._compat(other)
        return Subspace.from_rows(
            self.field, self.ambient, self.basis.entries + other.basis.entries
        )

    def intersect(self, other: "Subspace") -> "Subspace":
        # rows of the left kernel of [A; B] give coefficients (x, y) with
        # x A = y B; the x A are a spanning set of the intersection
        self._compat(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient)
        stacked = vstack([self.basis, other.basis])
        lk = stacked.transpose().kernel()
        rows = []
        for coeff in lk.entries:
            x = coeff[: self.dim]
            vec = Matrix(self.field, 1, self.dim, (tuple(x),)).mul(self.basis)
            rows.append(vec.entries[0])
        return Subspace.from_rows(self.field, self.ambient, rows)

    def image(self, m: Matrix) -> "Subspace":
        """Image of this subspace under the linear map m (columns act)."""
        if m.ncols != self.ambient:
            raise ValidationError("map domain != ambient dimension")
        rows = [m.apply(r) for r in self.basis.entries]
        return Subspace.from_rows(self.field, m.nrows, rows)

    def preimage(self, m: Matrix) -> "Subspace":
        """Preimage of this subspace under m: {v : m v in self}."""
        if m.nrows != self.ambient:
            raise ValidationError("map codomain != ambient dimension")
        # m v in self  <=>  Y m v = 0 where Y spans the annihilator of self
        y = self.perp()
        if y.dim == 0:
            return Subspace.full(m.field, m.ncols)
        return Subspace(m.field, m.ncols, y.basis.mul(m).kernel())

    def perp(self) -> "Subspace":
        """Annihilator: row vectors y with y . b = 0 for all basis rows b."""
        if self.dim == 0:
            return Subspace.full(self.field, self.ambient)
        return Subspace(self.field, self.ambient, self.basis.kernel())

    def complement_pivots(self) -> tuple:
        """Indices of standard vectors spanning a complement (non-pivots)."""
        _, pivots = self.basis.rref()
        return tuple(c for c in range(self.ambient) if c not in pivots)

    def __str__(self):
        return f"<{self.dim}-dim subspace of {self.field}^{self.ambient}>"


@dataclass(frozen=True)
class SubspaceAlgebra:
    sum: Subspace
    intersection: Subspace


def subspace_algebra(a: Subspace, b: Subspace) -> SubspaceAlgebra:
    """Sum and intersection in one record; dims obey the modular law."""
    return SubspaceAlgebra(a.sum(b), a.intersect(b))


def quotient_project(a: Subspace, v) -> tuple:
    """Coordinates of v modulo a, in the canonical complement of a.

    The complement is spanned by the standard vectors at a's non-pivot
    columns; the projection is linear and its kernel is exactly a.
    """
    f = a.field
    vec = [f.normalize(x) for x in v]
    if len(vec) != a.ambient:
        raise ValidationError("vector length != ambient dimension")
    for row in a.basis.entries:
        pc = next(j for j, x in enumerate(row) if x)
        if vec[pc]:
            c = vec[pc]
            vec = [f.sub(x, f.mul(c, y)) for x, y in zip(vec, row)]
    return tuple(vec[c] for c in a.complement_pivots())


def enumerate_subspaces(field: Field, n: int, k: int):
    """All k-dim subspaces of GF(p)^n, deterministic order.

    Pivot column sets ascend lexicographically; for each, free entries run
    through field elements row-major with the last free slot fastest.  The
    emitted matrices are exactly the canonical RREF forms, so no dedup is
    needed and the count is the Gaussian binomial.
    """
    if not field.is_finite:
        raise ValidationError("cannot enumerate subspaces over the rationals")
    if k < 0 or k > n:
        raise ValidationError(f"no {k}-dimensional subspaces in dimension {n}")
    if k == 0:
        yield Subspace.zero(field, n)
        return
    els = list(field.elements())
    for pivots in itertools.combinations(range(n), k):
        pivset = set(pivots)
        free = [
            (i, c)
            for i in range(k)
            for c in range(pivots[i] + 1, n)
            if c not in pivset
        ]
        for vals in itertools.product(els, repeat=len(free)):
            rows = [[field.zero()] * n for _ in range(k)]
            for i in range(k):
                rows[i][pivots[i]] = field.one()
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            b = Matrix(field, k, n, tuple(tuple(r) for r in rows))
            yield Subspace(field, n, b)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dim subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def lagrange_coeffs(xs, ys) -> tuple:
    """Coefficients (ascending) of the interpolating polynomial, as Fractions."""
    xs = [Fraction(x) for x in xs]
    ys = [Fraction(y) for y in ys]
    if len(xs) != len(ys) or len(set(xs)) != len(xs):
        raise ValidationError("interpolation nodes must be distinct and match values")
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # numerator polynomial prod_{j != i} (X - x_j), ascending
        num = [Fraction(1)]
        den = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            num = [Fraction(0)] + num
            for t in range(len(num) - 1):
                num[t] -= xs[j] * num[t + 1]
            den *= xs[i] - xs[j]
        w = ys[i] / den
        for t in range(len(num)):
            coeffs[t] += w * num[t]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)
