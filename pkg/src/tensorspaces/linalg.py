"""Dense exact linear algebra over an explicit field.

Gaussian elimination uses the first nonzero pivot; equality is exact, there
are no tolerances.  Vectors are tuples of raw scalars.
"""

from __future__ import annotations

from .errors import DimensionError, FieldError


class Matrix:
    """Immutable dense matrix with entries in a fixed field."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, data):
        data = tuple(tuple(row) for row in data)
        self.field = field
        self.rows = len(data)
        self.cols = len(data[0]) if data else 0
        if any(len(row) != self.cols for row in data):
            raise DimensionError("ragged rows")
        self.data = data

    @classmethod
    def identity(cls, field, n):
        one, zero = field.one(), field.zero()
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field, rows, cols):
        zero = field.zero()
        return cls(field, [[zero] * cols for _ in range(rows)])

    @classmethod
    def from_columns(cls, field, columns, rows=None):
        if not columns:
            if rows is None:
                raise DimensionError("cannot infer row count of empty matrix")
            return cls.zeros(field, rows, 0)
        n = len(columns[0])
        if any(len(c) != n for c in columns):
            raise DimensionError("columns of unequal length")
        return cls(field, [[c[i] for c in columns] for i in range(n)])

    def column(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return Matrix(self.field, [self.column(j) for j in range(self.cols)])

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.field, self.data))

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.rows}x{self.cols})"

    def apply(self, vec):
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise DimensionError(f"vector length {len(vec)} != cols {self.cols}")
        F = self.field
        out = []
        for row in self.data:
            acc = F.zero()
            for a, x in zip(row, vec):
                if not F.is_zero(a) and not F.is_zero(x):
                    acc = F.add(acc, F.mul(a, x))
            out.append(acc)
        return tuple(out)

    def mul(self, other):
        if self.cols != other.rows:
            raise DimensionError(f"cols {self.cols} != rows {other.rows}")
        F = self.field
        if F != other.field:
            raise FieldError("mixed fields in matrix product")
        zero = F.zero()
        out = [[zero] * other.cols for _ in range(self.rows)]
        for i, row in enumerate(self.data):
            orow = out[i]
            for k, a in enumerate(row):
                if F.is_zero(a):
                    continue
                for j, b in enumerate(other.data[k]):
                    if not F.is_zero(b):
                        orow[j] = F.add(orow[j], F.mul(a, b))
        return Matrix(F, out)

    def _echelon(self, augment=None):
        """Row reduce a copy; returns (rows, pivots, aug_rows)."""
        F = self.field
        m = [list(row) for row in self.data]
        aug = [list(row) for row in augment] if augment is not None else None
        pivots = []
        r = 0
        for c in range(self.cols):
            pivot_row = None
            for i in range(r, self.rows):
                if not F.is_zero(m[i][c]):
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            m[r], m[pivot_row] = m[pivot_row], m[r]
            if aug is not None:
                aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
            inv = F.inv(m[r][c])
            m[r] = [F.mul(inv, x) for x in m[r]]
            if aug is not None:
                aug[r] = [F.mul(inv, x) for x in aug[r]]
            for i in range(self.rows):
                if i != r and not F.is_zero(m[i][c]):
                    factor = m[i][c]
                    m[i] = [F.sub(x, F.mul(factor, y)) for x, y in zip(m[i], m[r])]
                    if aug is not None:
                        aug[i] = [
                            F.sub(x, F.mul(factor, y)) for x, y in zip(aug[i], aug[r])
                        ]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return m, pivots, aug

    def rank(self):
        _, pivots, _ = self._echelon()
        return len(pivots)

    def is_injective(self):
        return self.rank() == self.cols

    def inverse(self):
        """Exact inverse, or None when singular."""
        if self.rows != self.cols:
            return None
        ident = Matrix.identity(self.field, self.rows)
        m, pivots, aug = self._echelon(augment=ident.data)
        if len(pivots) != self.rows:
            return None
        return Matrix(self.field, aug)


def solve_linear(A, b):
    """One exact solution x of A x = b, or None when inconsistent."""
    if len(b) != A.rows:
        raise DimensionError(f"rhs length {len(b)} != rows {A.rows}")
    F = A.field
    m, pivots, aug = A._echelon(augment=[[x] for x in b])
    rank = len(pivots)
    for i in range(rank, A.rows):
        if not F.is_zero(aug[i][0]):
            return None
    x = [F.zero()] * A.cols
    for r, c in enumerate(pivots):
        acc = aug[r][0]
        for j in range(c + 1, A.cols):
            if not F.is_zero(m[r][j]) and not F.is_zero(x[j]):
                acc = F.sub(acc, F.mul(m[r][j], x[j]))
        x[c] = acc
    return tuple(x)


def kernel_basis(A):
    """Linearly independent columns spanning the null space of A."""
    F = A.field
    m, pivots, _ = A._echelon()
    pivot_set = set(pivots)
    free = [c for c in range(A.cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [F.zero()] * A.cols
        v[f] = F.one()
        for r, c in enumerate(pivots):
            v[c] = F.neg(m[r][f])
        basis.append(tuple(v))
    return basis


def column_space_complement(columns, field, dim):
    """Standard basis vectors extending the given independent columns to a basis.

    One incremental elimination: each vector is reduced against the pivot
    rows collected so far, so the whole call is a single Gaussian pass.
    """
    pivot_rows = []  # (pivot position, normalized reduced vector)

    def try_insert(vec):
        v = list(vec)
        for pos, row in pivot_rows:
            c = v[pos]
            if not field.is_zero(c):
                v = [field.sub(x, field.mul(c, y)) for x, y in zip(v, row)]
        for i, x in enumerate(v):
            if not field.is_zero(x):
                inv = field.inv(x)
                pivot_rows.append((i, [field.mul(inv, y) for y in v]))
                return True
        return False

    for col in columns:
        if not try_insert(col):
            raise DimensionError("input columns were not independent")
    chosen = []
    for j in range(dim):
        if len(pivot_rows) == dim:
            break
        e = tuple(field.one() if i == j else field.zero() for i in range(dim))
        if try_insert(e):
            chosen.append(e)
    if len(pivot_rows) != dim:
        raise DimensionError("could not complete to a basis")
    return chosen


def in_column_span(columns, field, dim, vec):
    """Whether vec lies in the span of the given columns."""
    A = Matrix.from_columns(field, list(columns), rows=dim)
    return solve_linear(A, vec) is not None


def enumerate_vectors(d, field):
    """All vectors of k^d over a finite field, lexicographic in coordinates."""
    if not field.is_finite:
        raise FieldError("enumeration requires a finite field")
    elems = list(field.elements())

    def rec(prefix):
        if len(prefix) == d:
            yield tuple(prefix)
            return
        for e in elems:
            yield from rec(prefix + [e])

    return rec([])


def enumerate_gl(d, field, shard=None):
    """Every invertible d x d matrix exactly once, in row-major lexicographic order.

    Rows are built recursively and a candidate row is kept only when it is
    outside the span of the previous ones, so nothing invertible is ever
    rank-checked twice.  ``shard=(i, k)`` keeps only the matrices whose first
    row has index congruent to i mod k in the row enumeration, giving disjoint
    ranges for parallel oracles.
    """
    if not field.is_finite:
        raise FieldError("enumerate_gl requires a finite field")
    if d == 0:
        yield Matrix(field, [])
        return
    all_rows = list(enumerate_vectors(d, field))

    def independent(rows, row):
        A = Matrix(field, rows + [row])
        return A.rank() == len(rows) + 1

    def rec(rows):
        if len(rows) == d:
            yield Matrix(field, rows)
            return
        for idx, row in enumerate(all_rows):
            if len(rows) == 0 and shard is not None:
                i, k = shard
                if idx % k != i:
                    continue
            if independent(rows, row):
                yield from rec(rows + [row])

    yield from rec([])


def gl_order(d, q):
    """|GL_d(F_q)| by the closed-form product."""
    total = 1
    for i in range(d):
        total *= q**d - q**i
    return total
