"""Multilinear form calculus: Young projectors, decomposition, lambda-spaces.

A lambda-form is stored as its canonical n-form: the unique fixed point of
the normalized Young projector of the canonical tableau that encodes it.
Forms are sparse (dict keyed by index tuples); ambient dimensions in the
thousands are routine as long as the support stays small.
"""

from __future__ import annotations

import builtins
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial, lcm

from .errors import (
    CertificateError,
    CharacteristicError,
    DimensionError,
    FieldError,
)
from .fields import PrimeField, Rationals
from .linalg import Matrix, enumerate_gl
from .partitions import (
    Partition,
    PartitionTuple,
    canonical_tableau,
    hook_length_count,
    partitions_of,
    standard_tableaux,
)


class MultiForm:
    """Dense-in-meaning, sparse-in-storage n-linear form on k^d."""

    __slots__ = ("field", "dim", "arity", "entries")

    def __init__(self, field, dim, arity, entries=None):
        self.field = field
        self.dim = dim
        self.arity = arity
        clean = {}
        if entries:
            for key, val in entries.items():
                key = tuple(key)
                if len(key) != arity:
                    raise DimensionError(f"index {key} has wrong arity")
                if any(not 0 <= i < dim for i in key):
                    raise DimensionError(f"index {key} out of range for dim {dim}")
                if not field.is_zero(val):
                    clean[key] = val
        self.entries = clean

    @classmethod
    def zero(cls, field, dim, arity):
        return cls(field, dim, arity, {})

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, MultiForm)
            and self.field == other.field
            and self.dim == other.dim
            and self.arity == other.arity
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.dim, self.arity, frozenset(self.entries.items())))

    def __repr__(self):
        return f"MultiForm(dim={self.dim}, arity={self.arity}, nnz={len(self.entries)})"

    def add(self, other):
        self._check_compatible(other)
        F = self.field
        out = dict(self.entries)
        for key, val in other.entries.items():
            acc = F.add(out.get(key, F.zero()), val)
            if F.is_zero(acc):
                out.pop(key, None)
            else:
                out[key] = acc
        return MultiForm(F, self.dim, self.arity, out)

    def sub(self, other):
        return self.add(other.scale(self.field.neg(self.field.one())))

    def scale(self, c):
        F = self.field
        if F.is_zero(c):
            return MultiForm.zero(F, self.dim, self.arity)
        return MultiForm(
            F, self.dim, self.arity, {k: F.mul(c, v) for k, v in self.entries.items()}
        )

    def _check_compatible(self, other):
        if (
            self.field != other.field
            or self.dim != other.dim
            or self.arity != other.arity
        ):
            raise DimensionError("incompatible forms")

    def evaluate(self, vectors):
        """Multilinear evaluation at the given vectors."""
        if len(vectors) != self.arity:
            raise DimensionError(f"need {self.arity} vectors")
        for v in vectors:
            if len(v) != self.dim:
                raise DimensionError("vector dimension mismatch")
        F = self.field
        acc = F.zero()
        for key, val in self.entries.items():
            term = val
            for slot, i in enumerate(key):
                x = vectors[slot][i]
                if F.is_zero(x):
                    term = None
                    break
                term = F.mul(term, x)
            if term is not None:
                acc = F.add(acc, term)
        return acc

    def permuted(self, sigma):
        """Right slot action: (w.sigma)(v_1..v_n) = w(v_{sigma(1)},..,v_{sigma(n)}).

        sigma is a 0-based tuple, sigma[k] = image of slot k.
        """
        n = self.arity
        out = {}
        F = self.field
        for key, val in self.entries.items():
            new = [0] * n
            for k in range(n):
                new[sigma[k]] = key[k]
            new = tuple(new)
            if new in out:
                acc = F.add(out[new], val)
                if F.is_zero(acc):
                    del out[new]
                else:
                    out[new] = acc
            else:
                out[new] = val
        return MultiForm(F, self.dim, self.arity, out)

    def pullback(self, f):
        """(f* w)(v_1..v_n) = w(f v_1, .., f v_n); f maps k^{cols} -> k^{rows}."""
        if f.rows != self.dim:
            raise DimensionError(f"matrix rows {f.rows} != form dim {self.dim}")
        if f.field != self.field:
            raise FieldError("mixed fields in pullback")
        F = self.field
        if isinstance(F, Rationals):
            return self._pullback_rational(f)
        if isinstance(F, PrimeField):
            return self._pullback_prime(f)
        return self._pullback_generic(f)

    def _rows_nonzero(self, f):
        F = self.field
        return [
            [(j, f.data[i][j]) for j in range(f.cols) if not F.is_zero(f.data[i][j])]
            for i in range(f.rows)
        ]

    def _pullback_generic(self, f):
        F = self.field
        rows = self._rows_nonzero(f)
        out = {}
        n = self.arity
        for key, val in self.entries.items():
            slots = [rows[i] for i in key]
            if any(not s for s in slots):
                continue
            stack = [(0, val, ())]
            while stack:
                depth, acc, prefix = stack.pop()
                if depth == n:
                    prior = out.get(prefix)
                    total = acc if prior is None else F.add(prior, acc)
                    if F.is_zero(total):
                        out.pop(prefix, None)
                    else:
                        out[prefix] = total
                    continue
                for j, fv in slots[depth]:
                    stack.append((depth + 1, F.mul(acc, fv), prefix + (j,)))
        return MultiForm(F, f.cols, n, out)

    def _pullback_rational(self, f):
        # integer fast path: clear denominators, accumulate in int arithmetic
        n = self.arity
        dform = 1
        for v in self.entries.values():
            dform = lcm(dform, v.denominator)
        dmat = 1
        for row in f.data:
            for v in row:
                dmat = lcm(dmat, v.denominator)
        rows = [
            [(j, int(f.data[i][j] * dmat)) for j in range(f.cols) if f.data[i][j]]
            for i in range(f.rows)
        ]
        out = {}
        for key, val in self.entries.items():
            slots = [rows[i] for i in key]
            if any(not s for s in slots):
                continue
            ival = int(val * dform)
            stack = [(0, ival, ())]
            while stack:
                depth, acc, prefix = stack.pop()
                if depth == n:
                    out[prefix] = out.get(prefix, 0) + acc
                    continue
                for j, fv in slots[depth]:
                    stack.append((depth + 1, acc * fv, prefix + (j,)))
        denom = dform * dmat**n
        entries = {k: Fraction(v, denom) for k, v in out.items() if v}
        return MultiForm(self.field, f.cols, n, entries)

    def _pullback_prime(self, f):
        p = self.field.p
        n = self.arity
        rows = [
            [(j, f.data[i][j]) for j in range(f.cols) if f.data[i][j] % p]
            for i in range(f.rows)
        ]
        out = {}
        for key, val in self.entries.items():
            slots = [rows[i] for i in key]
            if any(not s for s in slots):
                continue
            stack = [(0, val, ())]
            while stack:
                depth, acc, prefix = stack.pop()
                if depth == n:
                    out[prefix] = (out.get(prefix, 0) + acc) % p
                    continue
                for j, fv in slots[depth]:
                    stack.append((depth + 1, (acc * fv) % p, prefix + (j,)))
        entries = {k: v for k, v in out.items() if v}
        return MultiForm(self.field, f.cols, n, entries)

    def map_coefficients(self, func, new_field):
        return MultiForm(
            new_field,
            self.dim,
            self.arity,
            {k: func(v) for k, v in self.entries.items()},
        )

    def sorted_items(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0])


# --------------------------------------------------------------------------
# Young projector machinery
# --------------------------------------------------------------------------


def _compose(q, r):
    """(q o r)(k) = q(r(k)) on 0-based tuples."""
    return tuple(q[r[k]] for k in range(len(q)))


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _stabilizer_perms(blocks, n):
    """Permutations of 0..n-1 preserving each block of a set partition."""
    arrangements = [list(permutations(b)) for b in blocks]
    out = []
    for combo in product(*arrangements):
        perm = list(range(n))
        for block, arr in zip(blocks, combo):
            for src, dst in zip(block, arr):
                perm[src] = dst
        out.append(tuple(perm))
    return out


@lru_cache(maxsize=None)
def _young_element(shape):
    """Collapsed group-algebra element of the normalized Young idempotent.

    Returns {perm: Fraction coefficient}; applying it to a form w gives
    sum_perm coeff * (w . perm).  Built from the canonical tableau: row
    symmetrizer applied first, column antisymmetrizer second; idempotency is
    verified symbolically once per shape.
    """
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    n = shape.size
    T = canonical_tableau(shape)
    row_blocks = [tuple(x - 1 for x in row) for row in T.rows]
    conj = shape.conjugate()
    col_blocks = []
    for j in range(len(conj.parts)):
        col_blocks.append(tuple(T.rows[i][j] - 1 for i in range(conj.parts[j])))
    rows = _stabilizer_perms(row_blocks, n)
    cols = _stabilizer_perms(col_blocks, n)
    norm = Fraction(hook_length_count(shape), factorial(n))
    element = {}
    for tau in cols:
        s = _perm_sign(tau)
        for sigma in rows:
            perm = _compose(tau, sigma)
            element[perm] = element.get(perm, Fraction(0)) + s * norm
    element = {p: c for p, c in element.items() if c}
    _assert_idempotent(element, n, shape)
    return element


def _assert_idempotent(element, n, shape):
    # operator composition: applying e then e equals applying e
    square = {}
    for r, cr in element.items():
        for q, cq in element.items():
            perm = _compose(q, r)
            square[perm] = square.get(perm, Fraction(0)) + cr * cq
    square = {p: c for p, c in square.items() if c}
    if square != element:
        raise CertificateError(f"Young element for {shape} is not idempotent")


def young_projector_apply(omega, shape):
    """Project an n-form onto the canonical lambda-component (idempotent)."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    if omega.arity != shape.size:
        raise DimensionError(
            f"form arity {omega.arity} != partition size {shape.size}"
        )
    omega.field.check_partition_size(shape.size)
    F = omega.field
    element = _young_element(shape)
    acc = MultiForm.zero(F, omega.dim, omega.arity)
    for perm, coeff in element.items():
        c = F.div(F.from_int(coeff.numerator), F.from_int(coeff.denominator))
        acc = acc.add(omega.permuted(perm).scale(c))
    return acc


def is_projector_fixed(omega, shape):
    return young_projector_apply(omega, shape) == omega


# --------------------------------------------------------------------------
# full decomposition into (lambda, T) components via Jucys-Murphy projectors
# --------------------------------------------------------------------------


def _transposition(i, k, n):
    perm = list(range(n))
    perm[i], perm[k] = perm[k], perm[i]
    return tuple(perm)


def _jm_apply(omega, k):
    """X_k acting on forms: sum of slot transpositions (i k), i < k (0-based)."""
    acc = MultiForm.zero(omega.field, omega.dim, omega.arity)
    for i in range(k):
        acc = acc.add(omega.permuted(_transposition(i, k, omega.arity)))
    return acc


def decompose_form(omega):
    """Split an n-form into its (lambda, standard tableau) components.

    Components are the images of the Gelfand-Tsetlin (Jucys-Murphy eigenvalue)
    projectors, which are pairwise orthogonal and sum to the identity, so
    reassembly is literally the sum of the returned forms.  Requires every
    content difference to be invertible; in particular characteristic 0 or
    p > 2(n-1) always suffices.
    """
    n = omega.arity
    F = omega.field
    components = {}
    for lam in partitions_of(n):
        for T in standard_tableaux(lam):
            contents = T.content_vector()
            comp = omega
            for k in range(1, n):  # slot index 0-based; entry k+1 in the tableau
                target = contents[k]
                if comp.is_zero():
                    break
                for c in range(-k, k + 1):
                    if c == target:
                        continue
                    denom = F.from_int(target - c)
                    if F.is_zero(denom):
                        raise CharacteristicError(
                            f"content difference {target - c} vanishes in {F!r}"
                        )
                    xk = _jm_apply(comp, k)
                    comp = xk.sub(comp.scale(F.from_int(c))).scale(F.inv(denom))
            components[(lam, T)] = comp
    return components


def reassemble(components, field, dim, arity):
    acc = MultiForm.zero(field, dim, arity)
    for comp in components.values():
        acc = acc.add(comp)
    return acc


# --------------------------------------------------------------------------
# lambda-spaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaForm:
    """A lambda-form, stored as its canonical projector-fixed n-form."""

    partition: Partition
    canonical: MultiForm

    def __init__(self, partition, canonical, project=False):
        partition = (
            partition if isinstance(partition, Partition) else Partition(partition)
        )
        if canonical.arity != partition.size:
            raise DimensionError("arity does not match partition size")
        if project:
            canonical = young_projector_apply(canonical, partition)
        elif young_projector_apply(canonical, partition) != canonical:
            raise CertificateError(
                f"form is not fixed by the Young projector of {partition}"
            )
        object.__setattr__(self, "partition", partition)
        object.__setattr__(self, "canonical", canonical)

    @property
    def dim(self):
        return self.canonical.dim

    def __eq__(self, other):
        return (
            isinstance(other, LambdaForm)
            and self.partition == other.partition
            and self.canonical == other.canonical
        )

    def __hash__(self):
        return hash((self.partition, self.canonical))


@dataclass(frozen=True)
class LambdaSpace:
    """A finite-dimensional space with one canonical form per tuple entry."""

    field: object
    dim: int
    tuple: PartitionTuple
    forms: tuple

    def __init__(self, field, dim, tup, forms):
        tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
        forms = builtins.tuple(forms)
        if len(forms) != len(tup):
            raise DimensionError("one form per tuple entry required")
        for lam, form in zip(tup, forms):
            if form.partition != lam:
                raise DimensionError("form partition does not match tuple entry")
            if form.canonical.dim != dim:
                raise DimensionError("form ambient dimension mismatch")
            if form.canonical.field != field:
                raise FieldError("form field mismatch")
            field.check_partition_size(lam.size)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "tuple", tup)
        object.__setattr__(self, "forms", forms)

    @classmethod
    def from_raw_forms(cls, field, dim, tup, raw_forms, project=True):
        tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
        lforms = [
            LambdaForm(lam, raw, project=project)
            for lam, raw in zip(tup, raw_forms)
        ]
        return cls(field, dim, tup, lforms)

    def canonical_forms(self):
        return [f.canonical for f in self.forms]

    def __eq__(self, other):
        return (
            isinstance(other, LambdaSpace)
            and self.field == other.field
            and self.dim == other.dim
            and self.tuple == other.tuple
            and self.forms == other.forms
        )

    def __hash__(self):
        return hash((self.field, self.dim, self.tuple))

    def __repr__(self):
        return f"LambdaSpace({self.field!r}, dim={self.dim}, tuple={self.tuple})"


@dataclass
class EmbeddingCheck:
    ok: bool
    injective: bool
    failed_form: int = -1
    failed_entry: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_embedding(f, src, dst):
    """Certificate check: f injective and every dst form pulls back to src's."""
    if src.tuple != dst.tuple:
        raise DimensionError("tuple mismatch")
    if src.field != dst.field or f.field != src.field:
        raise FieldError("field mismatch")
    if f.rows != dst.dim or f.cols != src.dim:
        raise DimensionError(
            f"matrix is {f.rows}x{f.cols}, expected {dst.dim}x{src.dim}"
        )
    if not f.is_injective():
        return EmbeddingCheck(False, False, reason="matrix not injective")
    for i, (wf, vf) in enumerate(zip(src.forms, dst.forms)):
        pulled = vf.canonical.pullback(f)
        if pulled != wf.canonical:
            entry = _first_difference(pulled, wf.canonical)
            return EmbeddingCheck(
                False,
                True,
                failed_form=i,
                failed_entry=entry,
                reason=f"form {i} pullback differs at {entry}",
            )
    return EmbeddingCheck(True, True)


def _first_difference(a, b):
    keys = sorted(set(a.entries) | set(b.entries))
    for k in keys:
        if a.entries.get(k) != b.entries.get(k):
            return k
    return ()


@dataclass(frozen=True)
class LinearEmbedding:
    """An injective structure-preserving map, verified at construction."""

    source: LambdaSpace
    target: LambdaSpace
    matrix: Matrix

    def __init__(self, source, target, matrix):
        check = is_embedding(matrix, source, target)
        if not check.ok:
            raise CertificateError(f"invalid embedding: {check.reason}")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", matrix)

    def compose(self, other):
        """self o other (apply other first)."""
        if other.target is not self.source and other.target != self.source:
            raise DimensionError("composition endpoints do not match")
        return LinearEmbedding(other.source, self.target, self.matrix.mul(other.matrix))

    def __eq__(self, other):
        return (
            isinstance(other, LinearEmbedding)
            and self.source == other.source
            and self.target == other.target
            and self.matrix == other.matrix
        )


def identity_embedding(space):
    return LinearEmbedding(space, space, Matrix.identity(space.field, space.dim))


def direct_sum(spaces):
    """Orthogonal-style direct sum: forms pulled back along the projections."""
    if not spaces:
        raise DimensionError("direct_sum of no spaces")
    field = spaces[0].field
    if any(s.field != field for s in spaces):
        raise FieldError("mixed fields in direct sum")
    total = sum(s.dim for s in spaces)
    entries = []
    forms = []
    offset = 0
    for s in spaces:
        for lam, form in zip(s.tuple, s.forms):
            entries.append(lam)
            shifted = {
                builtins.tuple(i + offset for i in key): val
                for key, val in form.canonical.entries.items()
            }
            forms.append(
                LambdaForm(lam, MultiForm(field, total, lam.size, shifted))
            )
        offset += s.dim
    return LambdaSpace(field, total, PartitionTuple(entries), forms)


def summand_inclusion(spaces, index):
    """Matrix of the inclusion of summand `index` into direct_sum(spaces)."""
    field = spaces[0].field
    total = sum(s.dim for s in spaces)
    offset = sum(s.dim for s in spaces[:index])
    cols = []
    for j in range(spaces[index].dim):
        col = [field.zero()] * total
        col[offset + j] = field.one()
        cols.append(col)
    return Matrix.from_columns(field, cols, rows=total)


def restrict_tuple(space, indices):
    """Same carrier, forms filtered to the given tuple indices in order."""
    for i in indices:
        if not 0 <= i < len(space.tuple):
            raise DimensionError(f"tuple index {i} out of range")
    tup = PartitionTuple([space.tuple[i] for i in indices])
    forms = [space.forms[i] for i in indices]
    return LambdaSpace(space.field, space.dim, tup, forms)


def fixed_form_basis(field, dim, shape):
    """Basis of the projector-fixed subspace of |shape|-forms on k^dim."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    basis = []  # (pivot key, normalized form)
    for key in product(range(dim), repeat=shape.size):
        cand = young_projector_apply(
            MultiForm(field, dim, shape.size, {key: field.one()}), shape
        )
        for pk, bf in basis:
            c = cand.entries.get(pk)
            if c is not None and not field.is_zero(c):
                cand = cand.sub(bf.scale(c))
        if cand.is_zero():
            continue
        pivot = min(cand.entries)
        cand = cand.scale(field.inv(cand.entries[pivot]))
        basis.append((pivot, cand))
    return [bf for _, bf in basis]


def enumerate_lambda_structures(tup, dim, field):
    """All lambda-structures on k^dim over a finite field (exhaustive oracle)."""
    tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
    if not field.is_finite:
        raise FieldError("structure enumeration requires a finite field")
    bases = [fixed_form_basis(field, dim, lam) for lam in tup]
    elems = list(field.elements())

    def combos(basis, lam):
        if not basis:
            yield MultiForm.zero(field, dim, lam.size)
            return
        for coeffs in product(elems, repeat=len(basis)):
            acc = MultiForm.zero(field, dim, lam.size)
            for c, bf in zip(coeffs, basis):
                if not field.is_zero(c):
                    acc = acc.add(bf.scale(c))
            yield acc

    def rec(idx, forms):
        if idx == len(tup):
            yield LambdaSpace(
                field,
                dim,
                tup,
                [LambdaForm(lam, f) for lam, f in zip(tup, forms)],
            )
            return
        for f in combos(bases[idx], tup[idx]):
            yield from rec(idx + 1, forms + [f])

    yield from rec(0, [])


def count_lambda_structures(tup, dim, field):
    tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
    total = 1
    for lam in tup:
        total *= field.order ** len(fixed_form_basis(field, dim, lam))
    return total


def random_multiform(field, dim, arity, rng, scale=3):
    """Random dense small-coefficient form (test instance generator)."""
    entries = {}
    for key in product(range(dim), repeat=arity):
        if isinstance(field, Rationals):
            val = Fraction(rng.randint(-scale, scale), rng.randint(1, scale))
        else:
            val = field.from_int(rng.randrange(field.order))
        entries[key] = val
    return MultiForm(field, dim, arity, entries)


def random_lambda_space(tup, dim, field, rng):
    tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
    forms = [random_multiform(field, dim, lam.size, rng) for lam in tup]
    return LambdaSpace.from_raw_forms(field, dim, tup, forms, project=True)


def iso_brute_force(A, B, use_kernels=True):
    """First isomorphism in enumerate_gl order, or None; small-instance oracle."""
    if not A.field.is_finite:
        raise FieldError("iso_brute_force requires a finite field")
    if A.dim > 3:
        raise DimensionError("iso_brute_force limited to dimension <= 3")
    if A.dim != B.dim or A.tuple != B.tuple or A.field != B.field:
        raise DimensionError("spaces not comparable")
    if A.dim == 0:
        return identity_embedding(A) if A == B else None
    if use_kernels and isinstance(A.field, PrimeField) and os.environ.get(
        "TSF_NO_KERNELS"
    ) != "1":
        from . import kernels

        g = kernels.iso_search_dense(A, B)
        if g is None:
            return None
        return LinearEmbedding(A, B, g)
    for g in enumerate_gl(A.dim, A.field):
        if is_embedding(g, A, B).ok:
            return LinearEmbedding(A, B, g)
    return None
