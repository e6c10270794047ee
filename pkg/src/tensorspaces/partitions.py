"""Partitions, tableaux, Littlewood-Richardson and shift-tuple combinatorics.

Two independent routes exist for the LR numbers: skew-tableau enumeration
(`lr_coefficient`) and truncated Schur-polynomial multiplication
(`lr_coefficient_via_polynomials`), used to cross-check each other in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import FormatError


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __init__(self, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self):
        return sum(self.parts)

    @property
    def nrows(self):
        return len(self.parts)

    def is_empty(self):
        return not self.parts

    def conjugate(self):
        if not self.parts:
            return Partition()
        cols = [0] * self.parts[0]
        for p in self.parts:
            for j in range(p):
                cols[j] += 1
        return Partition(cols)

    def contains(self, other):
        if other.nrows > self.nrows:
            return False
        return all(other.parts[i] <= self.parts[i] for i in range(other.nrows))

    def cells(self):
        for i, p in enumerate(self.parts):
            for j in range(p):
                yield (i, j)

    def format(self):
        return "(" + ",".join(str(p) for p in self.parts) + ")"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise FormatError(f"bad partition {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return cls()
        try:
            return cls(tuple(int(p) for p in inner.split(",")))
        except ValueError as exc:
            raise FormatError(f"bad partition {text!r}") from exc

    def __repr__(self):
        return self.format()

    def sort_key(self):
        return (self.size, self.parts)


EMPTY = Partition()


@dataclass(frozen=True)
class PartitionTuple:
    entries: tuple

    def __init__(self, entries=()):
        entries = tuple(
            e if isinstance(e, Partition) else Partition(e) for e in entries
        )
        object.__setattr__(self, "entries", entries)

    @property
    def is_pure(self):
        return all(not e.is_empty() for e in self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def format(self):
        return "[" + ",".join(e.format() for e in self.entries) + "]"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise FormatError(f"bad partition tuple {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return cls()
        parts = []
        depth = 0
        current = ""
        for ch in inner:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "," and depth == 0:
                parts.append(current)
                current = ""
            else:
                current += ch
        parts.append(current)
        return cls(tuple(Partition.parse(p) for p in parts))

    def __repr__(self):
        return self.format()

    def max_entry_size(self):
        return max((e.size for e in self.entries), default=0)


@dataclass(frozen=True)
class StandardTableau:
    shape: Partition
    rows: tuple

    def __init__(self, shape, rows):
        shape = shape if isinstance(shape, Partition) else Partition(shape)
        rows = tuple(tuple(r) for r in rows)
        if tuple(len(r) for r in rows) != shape.parts:
            raise ValueError("rows do not match shape")
        n = shape.size
        seen = sorted(x for row in rows for x in row)
        if seen != list(range(1, n + 1)):
            raise ValueError("filling must use 1..n once each")
        for row in rows:
            if any(row[j] >= row[j + 1] for j in range(len(row) - 1)):
                raise ValueError("rows must strictly increase")
        for i in range(len(rows) - 1):
            for j in range(len(rows[i + 1])):
                if rows[i][j] >= rows[i + 1][j]:
                    raise ValueError("columns must strictly increase")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rows", rows)

    def position_of(self, k):
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                if x == k:
                    return (i, j)
        raise ValueError(f"{k} not in tableau")

    def content_vector(self):
        """content (col - row) of each of 1..n, indexed from entry 1."""
        n = self.shape.size
        out = []
        for k in range(1, n + 1):
            i, j = self.position_of(k)
            out.append(j - i)
        return tuple(out)

    def __repr__(self):
        return "ST" + str(list(list(r) for r in self.rows))


def canonical_tableau(shape):
    """Row-reading tableau: first row 1..λ_1, second row continues, etc."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    if shape.is_empty():
        raise ValueError("canonical tableau of the empty partition")
    rows = []
    nxt = 1
    for p in shape.parts:
        rows.append(tuple(range(nxt, nxt + p)))
        nxt += p
    return StandardTableau(shape, rows)


def standard_tableaux(shape):
    """All standard tableaux of the given shape."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    n = shape.size
    if n == 0:
        return []
    results = []
    rows = [[] for _ in shape.parts]

    def place(k):
        if k > n:
            results.append(StandardTableau(shape, [tuple(r) for r in rows]))
            return
        for i, p in enumerate(shape.parts):
            j = len(rows[i])
            if j >= p:
                continue
            if i > 0 and len(rows[i - 1]) <= j:
                continue
            rows[i].append(k)
            place(k + 1)
            rows[i].pop()

    place(1)
    return results


def hook_length_count(shape):
    """Number of standard tableaux f^lambda, by the hook length formula."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    if shape.is_empty():
        return 1
    conj = shape.conjugate()
    num = factorial(shape.size)
    for i, j in shape.cells():
        hook = (shape.parts[i] - j) + (conj.parts[j] - i) - 1
        num //= hook
    return num


def schur_dim(shape, n):
    """dim S_lambda(k^n), by the hook content formula; 0 when rows exceed n."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    if shape.is_empty():
        return 1
    if shape.nrows > n:
        return 0
    conj = shape.conjugate()
    value = Fraction(1)
    for i, j in shape.cells():
        hook = (shape.parts[i] - j) + (conj.parts[j] - i) - 1
        value *= Fraction(n + j - i, hook)
    assert value.denominator == 1
    return int(value)


def semistandard_tableaux_count(shape, n):
    """dim S_lambda(k^n) by direct SSYT enumeration (test oracle)."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    if shape.is_empty():
        return 1
    rows = [[] for _ in shape.parts]
    count = 0

    def fill(idx, cells):
        nonlocal count
        if idx == len(cells):
            count += 1
            return
        i, j = cells[idx]
        lo = 1
        if j > 0:
            lo = max(lo, rows[i][j - 1])
        if i > 0:
            lo = max(lo, rows[i - 1][j] + 1)
        for v in range(lo, n + 1):
            rows[i].append(v)
            fill(idx + 1, cells)
            rows[i].pop()

    fill(0, list(shape.cells()))
    return count


def lr_coefficient(mu, nu, lam):
    """c^lam_{mu,nu} by Littlewood-Richardson skew-tableau enumeration.

    Counts semistandard fillings of lam/mu with content nu whose reverse
    reading word is a lattice word.
    """
    mu = mu if isinstance(mu, Partition) else Partition(mu)
    nu = nu if isinstance(nu, Partition) else Partition(nu)
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    if mu.size + nu.size != lam.size or not lam.contains(mu):
        return 0
    if nu.is_empty():
        return 1 if lam == mu else 0
    nrows = lam.nrows
    mu_parts = mu.parts + (0,) * (nrows - mu.nrows)
    # cells in reverse reading order: rows top to bottom, right to left
    cells = []
    for i in range(nrows):
        for j in range(lam.parts[i] - 1, mu_parts[i] - 1, -1):
            cells.append((i, j))
    maxval = nu.nrows
    remaining = list(nu.parts)
    grid = [[0] * lam.parts[i] for i in range(nrows)]
    counts = [0] * (maxval + 1)
    total = 0

    def fill(idx):
        nonlocal total
        if idx == len(cells):
            total += 1
            return
        i, j = cells[idx]
        for v in range(1, maxval + 1):
            if remaining[v - 1] == 0:
                continue
            # lattice condition on the prefix
            if v > 1 and counts[v] + 1 > counts[v - 1]:
                continue
            # row weakly increasing: right neighbour already placed
            if j + 1 < lam.parts[i] and grid[i][j + 1] and v > grid[i][j + 1]:
                continue
            # column strictly increasing: cell above already placed (or in mu)
            if i > 0 and j < lam.parts[i - 1]:
                if j >= mu_parts[i - 1]:
                    if grid[i - 1][j] == 0 or grid[i - 1][j] >= v:
                        continue
                # cells of mu above count as "smaller than anything"
            grid[i][j] = v
            counts[v] += 1
            remaining[v - 1] -= 1
            fill(idx + 1)
            grid[i][j] = 0
            counts[v] -= 1
            remaining[v - 1] += 1

    fill(0)
    return total


@lru_cache(maxsize=None)
def _schur_monomials(shape, nvars):
    """Schur polynomial as {exponent tuple: coeff}, via SSYT enumeration."""
    if shape.is_empty():
        return {(0,) * nvars: 1}
    out = {}
    rows = [[] for _ in shape.parts]
    cells = list(shape.cells())

    def fill(idx):
        if idx == len(cells):
            expo = [0] * nvars
            for row in rows:
                for v in row:
                    expo[v - 1] += 1
            key = tuple(expo)
            out[key] = out.get(key, 0) + 1
            return
        i, j = cells[idx]
        lo = 1
        if j > 0:
            lo = max(lo, rows[i][j - 1])
        if i > 0:
            lo = max(lo, rows[i - 1][j] + 1)
        for v in range(lo, nvars + 1):
            rows[i].append(v)
            fill(idx + 1)
            rows[i].pop()

    fill(0)
    return out


def schur_product_expand(mu, nu, nvars=None):
    """Expand s_mu * s_nu in the Schur basis by leading-monomial peeling."""
    mu = mu if isinstance(mu, Partition) else Partition(mu)
    nu = nu if isinstance(nu, Partition) else Partition(nu)
    total = mu.size + nu.size
    if nvars is None:
        nvars = max(total, 1)
    prod = {}
    for ea, ca in _schur_monomials(mu, nvars).items():
        for eb, cb in _schur_monomials(nu, nvars).items():
            key = tuple(x + y for x, y in zip(ea, eb))
            prod[key] = prod.get(key, 0) + ca * cb
    result = {}
    while any(prod.values()):
        lead = max((e for e, c in prod.items() if c), key=lambda e: e)
        coeff = prod[lead]
        lam = Partition(tuple(p for p in lead if p))
        assert tuple(sorted(lead, reverse=True))[: lam.nrows] == lam.parts
        result[lam] = coeff
        for e, c in _schur_monomials(lam, nvars).items():
            prod[e] = prod.get(e, 0) - coeff * c
    return result


def lr_coefficient_via_polynomials(mu, nu, lam):
    """Independent LR oracle: coefficient of s_lam in s_mu * s_nu."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    return schur_product_expand(mu, nu).get(lam, 0)


def shift_tuple(tup, n):
    """Shift multiplicities of a partition tuple by an n-dimensional pin block.

    Returns (full, pure): associations Partition -> multiplicity, where
    full[nu] = sum_i sum_mu c^{lam_i}_{mu,nu} * dim S_mu(k^n) and pure drops
    the empty partition.
    """
    tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
    full = {}
    for lam in tup:
        if n == 0:
            full[lam] = full.get(lam, 0) + 1
            continue
        for nu in _subpartitions_of_size_at_most(lam.size):
            if nu.size > lam.size:
                continue
            mult = 0
            for mu in _partitions_of(lam.size - nu.size):
                c = lr_coefficient(mu, nu, lam)
                if c:
                    mult += c * schur_dim(mu, n)
            if mult:
                full[nu] = full.get(nu, 0) + mult
    pure = {p: m for p, m in full.items() if not p.is_empty()}
    return full, pure


def flatten_shift(full):
    """Deterministic flattening: degree ascending, then lex on parts, then copy."""
    out = []
    for p in sorted(full, key=lambda q: q.sort_key()):
        out.extend([p] * full[p])
    return out


@lru_cache(maxsize=None)
def _partitions_of(n):
    """All partitions of exactly n."""
    if n == 0:
        return (Partition(),)
    out = []

    def rec(remaining, maxpart, acc):
        if remaining == 0:
            out.append(Partition(tuple(acc)))
            return
        for p in range(min(remaining, maxpart), 0, -1):
            acc.append(p)
            rec(remaining - p, p, acc)
            acc.pop()

    rec(n, n, [])
    return tuple(out)


def partitions_of(n):
    return list(_partitions_of(n))


def _subpartitions_of_size_at_most(n):
    for k in range(n + 1):
        yield from _partitions_of(k)


def partitions_up_to(n):
    """All partitions of size 0..n."""
    return list(_subpartitions_of_size_at_most(n))
