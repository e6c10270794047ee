"""Universal spaces and explicit certified embeddings into them.

The carrier of the universal n-form construction has basis v_{i,j} with
blocks i = 1..m of width n; the form is the sum of the rank-one products
x_{i,1} (x) ... (x) x_{i,n}.  A block count of d^n + d suffices to absorb
every d-dimensional n-form space, and the embedding is written down by an
explicit table on dual vectors, so every certificate is checkable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CertificateError, DimensionError, FieldError
from .fields import field_embedding
from .forms import (
    LambdaForm,
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    direct_sum,
    young_projector_apply,
)
from .linalg import Matrix
from .partitions import PartitionTuple


@dataclass(frozen=True)
class UniversalNFormSpace:
    """Truncated universal n-form carrier: m blocks of n basis vectors."""

    field: object
    n: int
    m: int

    @property
    def dim(self):
        return self.m * self.n

    def block_coords(self, i):
        return range(i * self.n, (i + 1) * self.n)

    @property
    def form(self):
        one = self.field.one()
        entries = {
            tuple(self.block_coords(i)): one for i in range(self.m)
        }
        return MultiForm(self.field, self.dim, self.n, entries)

    def capacity(self):
        """Largest d with m >= d^n + d (absorbed target dimension)."""
        d = 0
        while (d + 1) ** self.n + (d + 1) <= self.m:
            d += 1
        return d


def universal_nform(n, m, field):
    if n < 1:
        raise DimensionError("arity must be >= 1")
    if m < 0:
        raise DimensionError("block count must be >= 0")
    return UniversalNFormSpace(field, n, m)


def _digits(i, base, length):
    """Base-`base` digits of i, most significant first."""
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        out[pos] = i % base
        i //= base
    return tuple(out)


def embed_into_universal_nform(target, univ):
    """Matrix of an injective map with exact pullback onto the target form.

    `target` is a raw n-form on k^d; `univ` must have at least d^n + d
    blocks.  Returns the (univ.dim x d) matrix; blocks beyond d^n + d are
    sent to zero.
    """
    F = univ.field
    if target.field != F:
        raise FieldError("field mismatch")
    n, d = univ.n, target.dim
    if target.arity != n:
        raise DimensionError(f"target arity {target.arity} != {n}")
    if d == 0:
        return Matrix.zeros(F, univ.dim, 0)
    dn = d**n
    if univ.m < dn + d:
        raise DimensionError(f"need {dn + d} blocks, universal space has {univ.m}")
    zero, one = F.zero(), F.one()
    rows = [[zero] * d for _ in range(univ.dim)]
    if n == 1:
        # direct construction: first coordinate absorbs the form value,
        # the next d coordinates guarantee injectivity, the rest vanish
        for j in range(d):
            cj = target.entries.get((j,), zero)
            rows[0][j] = F.sub(cj, one)
            rows[1 + j][j] = one
    else:
        for i in range(dn):
            a = _digits(i, d, n)
            ci = target.entries.get(a, zero)
            rows[i * n][a[0]] = ci
            for j in range(1, n):
                rows[i * n + j][a[j]] = one
        for t in range(d):
            i = dn + t
            for j in range(1, n):
                rows[i * n + j][t] = one
    return Matrix(F, rows)


def verify_nform_embedding(target, univ, matrix):
    """Re-check injectivity and exact pullback for a raw n-form embedding."""
    if not matrix.is_injective():
        raise CertificateError("universal embedding is not injective")
    pulled = univ.form.pullback(matrix)
    if pulled != target:
        raise CertificateError("universal embedding pullback mismatch")
    return True


@dataclass(frozen=True)
class UniversalLambdaSpace:
    """d-universal lambda-space assembled blockwise from n-form carriers."""

    space: LambdaSpace
    d: int
    blocks: tuple  # one UniversalNFormSpace per tuple entry
    offsets: tuple

    @property
    def dim(self):
        return self.space.dim


def universal_lambda_space(tup, d, field):
    """One projected universal n-form carrier per tuple entry, direct-summed."""
    tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
    if not tup.is_pure:
        raise DimensionError("tuple must be pure (no empty partitions)")
    if len(tup) == 0:
        raise DimensionError("tuple must be nonempty")
    field.check_partition_size(tup.max_entry_size())
    blocks = []
    summands = []
    for lam in tup:
        n = lam.size
        univ = universal_nform(n, d**n + d, field)
        blocks.append(univ)
        form = LambdaForm(lam, young_projector_apply(univ.form, lam))
        summands.append(LambdaSpace(field, univ.dim, PartitionTuple([lam]), [form]))
    space = direct_sum(summands)
    offsets = []
    acc = 0
    for univ in blocks:
        offsets.append(acc)
        acc += univ.dim
    return UniversalLambdaSpace(space, d, tuple(blocks), tuple(offsets))


def embed_finite_space(space, univ):
    """Certified embedding of a finite lambda-space into a universal one.

    Each canonical form is treated as the raw n-form it is stored as, run
    through the universal n-form table for its tuple entry, and the pieces
    are stacked; the projector commutes with pullback, so the projected
    structure pulls back exactly.
    """
    if space.tuple != univ.space.tuple:
        raise DimensionError("tuple mismatch")
    if space.field != univ.space.field:
        raise FieldError("field mismatch")
    if space.dim > univ.d:
        raise DimensionError(
            f"space dimension {space.dim} exceeds universal bound {univ.d}"
        )
    F = space.field
    rows = []
    for form, block in zip(space.forms, univ.blocks):
        piece = embed_into_universal_nform(form.canonical, block)
        rows.extend(piece.data)
    matrix = Matrix(F, rows) if rows else Matrix.zeros(F, 0, space.dim)
    return LinearEmbedding(space, univ.space, matrix)


def recognize_universal(space):
    """Recover (tuple, d) metadata when `space` is a canonical universal file."""
    d = 0
    while True:
        dim = sum(
            lam.size * (d**lam.size + d) for lam in space.tuple
        )
        if dim == space.dim:
            candidate = universal_lambda_space(space.tuple, d, space.field)
            if candidate.space == space:
                return candidate
        if dim > space.dim or (d > 0 and dim == 0):
            return None
        d += 1


def base_change(space, src_field, dst_field):
    """Entrywise coefficient transport along a supported ring embedding."""
    if space.field != src_field:
        raise FieldError("space is not over the source field")
    emb = field_embedding(src_field, dst_field)
    forms = []
    for f in space.forms:
        moved = f.canonical.map_coefficients(emb, dst_field)
        forms.append(LambdaForm(f.partition, moved))
    return LambdaSpace(dst_field, space.dim, space.tuple, forms)


def pad_tuple(space, full_tuple, positions):
    """View a sub-tuple space as a full-tuple space with zero forms elsewhere.

    positions[i] is where entry i of `space.tuple` sits inside `full_tuple`.
    """
    full_tuple = (
        full_tuple
        if isinstance(full_tuple, PartitionTuple)
        else PartitionTuple(full_tuple)
    )
    if sorted(positions) != sorted(set(positions)) or len(positions) != len(
        space.tuple
    ):
        raise DimensionError("positions must be distinct, one per entry")
    forms = []
    by_position = dict(zip(positions, range(len(positions))))
    for idx, lam in enumerate(full_tuple):
        if idx in by_position:
            src = space.forms[by_position[idx]]
            if src.partition != lam:
                raise DimensionError("partition mismatch at padded position")
            forms.append(src)
        else:
            forms.append(
                LambdaForm(lam, MultiForm.zero(space.field, space.dim, lam.size))
            )
    return LambdaSpace(space.field, space.dim, full_tuple, forms)
