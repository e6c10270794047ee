"""Structure transfer to complements, relative universal extensions, amalgamation.

A pinned base splits every canonical form into residual blocks indexed by
filling patterns (which slots hold which pin).  Relative universal
extensions install universal residual carriers on a fresh free space so that
any bounded extension of the base embeds over it; the Young projector is
applied last, and since pullback commutes with it, raw blockwise matching is
enough.  Everything returned carries a verifiable certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations, product

from .errors import CapacityError, CertificateError, DimensionError, FieldError
from .forms import (
    LambdaForm,
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    _young_element,
)
from .linalg import Matrix, column_space_complement
from .partitions import PartitionTuple, schur_dim, shift_tuple
from .universal import embed_into_universal_nform, universal_nform


# --------------------------------------------------------------------------
# pinned bases, block structures, shift / unshift
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PinnedBase:
    """Ambient space with chosen pins and a complementary basis."""

    ambient: LambdaSpace
    pins: tuple
    complement: tuple

    def __init__(self, ambient, pins, complement):
        pins = tuple(tuple(v) for v in pins)
        complement = tuple(tuple(v) for v in complement)
        F = ambient.field
        all_cols = list(pins) + list(complement)
        if len(all_cols) != ambient.dim:
            raise DimensionError("pins + complement must have full length")
        if all_cols:
            B = Matrix.from_columns(F, all_cols, rows=ambient.dim)
            if B.rank() != ambient.dim:
                raise DimensionError("pins + complement is not a basis")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "pins", pins)
        object.__setattr__(self, "complement", complement)

    def basis_matrix(self):
        return Matrix.from_columns(
            self.ambient.field,
            list(self.pins) + list(self.complement),
            rows=self.ambient.dim,
        )


def all_patterns(arity, npins):
    """Every filling pattern: tuple with a pin index or None per slot."""
    out = []
    for filled in product(*[[None] + list(range(npins)) for _ in range(arity)]):
        out.append(tuple(filled))
    return out


def free_slots(pattern):
    return [k for k, p in enumerate(pattern) if p is None]


@dataclass(frozen=True)
class BlockStructure:
    """Residual forms of a pinned space, one per tuple entry and pattern.

    Patterns are stored for all slot subsets, without symmetry reduction;
    the all-filled pattern's arity-0 residual is the restriction of the
    ambient form to the pin span.
    """

    field: object
    base_dim: int
    free_dim: int
    tuple: PartitionTuple
    blocks: tuple  # per tuple entry: dict pattern -> MultiForm on free_dim

    def residual(self, entry, pattern):
        return self.blocks[entry][pattern]

    def __eq__(self, other):
        return (
            isinstance(other, BlockStructure)
            and self.field == other.field
            and self.base_dim == other.base_dim
            and self.free_dim == other.free_dim
            and self.tuple == other.tuple
            and self.blocks == other.blocks
        )


def shift_structure(pinned):
    """Partial evaluation of each canonical form at the pins, per pattern."""
    amb = pinned.ambient
    F = amb.field
    n = len(pinned.pins)
    dprime = len(pinned.complement)
    B = pinned.basis_matrix()
    blocks = []
    for lam, form in zip(amb.tuple, amb.forms):
        arity = lam.size
        changed = form.canonical.pullback(B)  # coords: pins first, then complement
        per_pattern = {
            pat: {} for pat in all_patterns(arity, n)
        }
        for key, val in changed.entries.items():
            pattern = tuple(i if i < n else None for i in key)
            residual_key = tuple(i - n for i in key if i >= n)
            per_pattern[pattern][residual_key] = val
        blocks.append(
            {
                pat: MultiForm(F, dprime, len(free_slots(pat)), entries)
                for pat, entries in per_pattern.items()
            }
        )
    return BlockStructure(F, n, dprime, amb.tuple, tuple(blocks))


def pinned_span_space(pinned):
    """The pin span with its restricted structure, plus the embedding matrix."""
    amb = pinned.ambient
    cols = list(pinned.pins)
    P = Matrix.from_columns(amb.field, cols, rows=amb.dim)
    forms = [
        LambdaForm(lam, f.canonical.pullback(P))
        for lam, f in zip(amb.tuple, amb.forms)
    ]
    space = LambdaSpace(amb.field, len(cols), amb.tuple, forms)
    return space, P


def unshift(base_space, blocks):
    """Reassemble an ambient space on base (+) free from residual blocks.

    The all-filled blocks must agree with the base structure (the scalar
    obstruction of impure shifts); the assembled tensors must be fixed by
    every Young projector, otherwise the block structure was not valid.
    Returns the space together with the certified inclusion of the base.
    """
    F = blocks.field
    if base_space.field != F:
        raise FieldError("field mismatch")
    if base_space.tuple != blocks.tuple:
        raise DimensionError("tuple mismatch")
    n, dprime = blocks.base_dim, blocks.free_dim
    if base_space.dim != n:
        raise DimensionError("base dimension mismatch")
    total = n + dprime
    raw_forms = []
    for idx, (lam, form) in enumerate(zip(base_space.tuple, base_space.forms)):
        arity = lam.size
        entries = {}
        for pattern, residual in blocks.blocks[idx].items():
            free = free_slots(pattern)
            if not free:
                expected = form.canonical.entries.get(
                    tuple(pattern), F.zero()
                )
                got = residual.entries.get((), F.zero())
                if expected != got:
                    raise CertificateError(
                        f"all-filled block mismatch at entry {idx}, pattern {pattern}"
                    )
            for rkey, val in residual.entries.items():
                key = list(pattern)
                for slot, coord in zip(free, rkey):
                    key[slot] = n + coord
                entries[tuple(key)] = val
        raw_forms.append(MultiForm(F, total, arity, entries))
    # project=False: a valid block structure assembles to projector-fixed forms
    space = LambdaSpace.from_raw_forms(
        F, total, base_space.tuple, raw_forms, project=False
    )
    incl_cols = []
    for j in range(n):
        col = [F.zero()] * total
        col[j] = F.one()
        incl_cols.append(col)
    incl = LinearEmbedding(
        base_space, space, Matrix.from_columns(F, incl_cols, rows=total)
    )
    return space, incl


# --------------------------------------------------------------------------
# relative universal extensions
# --------------------------------------------------------------------------


@dataclass
class _Slab:
    """One summand of the free space: either a shared covector slab
    (kind='cov', coordinate per pin class) or a universal b-form carrier
    (kind='univ')."""

    kind: str
    offset: int
    width: int
    entry: int
    b: int = 0
    blocks: int = 0
    classes: tuple = ()  # cov: ordered pin multisets; univ: single multiset/pattern


@dataclass
class RelativeExtension:
    """X together with X (+) F, relatively e-universal over X."""

    base: LambdaSpace
    bound: int
    target: LambdaSpace
    inclusion: LinearEmbedding
    slabs: tuple
    strategies: tuple  # per tuple entry: 'classes' or 'patterns'


def _single_row(lam):
    return lam.nrows == 1


def relative_universal_extension(X, e):
    """Build W = X (+) F absorbing every extension of X by at most e dimensions.

    Single-row entries get one residual carrier per unordered pin multiset
    (all slot arrangements share it; the target forms are fully symmetric so
    one matching works for every arrangement), with the arity-1 residuals
    sharing a single coordinate slab.  Other shapes fall back to one carrier
    per raw filling pattern.  An e-dimensional zero-form tail guarantees
    injectivity unconditionally.
    """
    F = X.field
    n = X.dim
    if e < 0:
        raise DimensionError("bound must be >= 0")
    F.check_partition_size(X.tuple.max_entry_size())
    slabs = []
    strategies = []
    offset = n + e  # X coords, then the injectivity tail
    for idx, lam in enumerate(X.tuple):
        ell = lam.size
        if _single_row(lam):
            strategies.append("classes")
            for b in range(1, ell + 1):
                classes = tuple(
                    combinations_with_replacement(range(n), ell - b)
                )
                if b == 1:
                    slabs.append(
                        _Slab("cov", offset, len(classes), idx, b=1, classes=classes)
                    )
                    offset += len(classes)
                else:
                    m = e**b + e
                    for cls in classes:
                        slabs.append(
                            _Slab(
                                "univ",
                                offset,
                                b * m,
                                idx,
                                b=b,
                                blocks=m,
                                classes=(cls,),
                            )
                        )
                        offset += b * m
        else:
            strategies.append("patterns")
            for pattern in all_patterns(ell, n):
                free = free_slots(pattern)
                b = len(free)
                if b == 0:
                    continue
                m = e**b + e
                slabs.append(
                    _Slab(
                        "univ", offset, b * m, idx, b=b, blocks=m, classes=(pattern,)
                    )
                )
                offset += b * m
    total = offset
    raw_forms = []
    for idx, (lam, form) in enumerate(zip(X.tuple, X.forms)):
        ell = lam.size
        entries = dict(form.canonical.entries)  # pure-X block
        for slab in slabs:
            if slab.entry != idx:
                continue
            if strategies[idx] == "classes":
                _install_class_slab(entries, slab, ell, F)
            else:
                _install_pattern_slab(entries, slab, F)
        raw_forms.append(MultiForm(F, total, ell, entries))
    target = LambdaSpace.from_raw_forms(F, total, X.tuple, raw_forms, project=True)
    incl_cols = []
    for j in range(n):
        col = [F.zero()] * total
        col[j] = F.one()
        incl_cols.append(col)
    inclusion = LinearEmbedding(
        X, target, Matrix.from_columns(F, incl_cols, rows=total)
    )
    return RelativeExtension(X, e, target, inclusion, tuple(slabs), tuple(strategies))


def _arrangements(cls, ell, b):
    """All ways to fill ell-b slots with the multiset cls, rest free."""
    out = set()
    for filled_positions in combinations(range(ell), ell - b):
        for arrangement in set(permutations(cls)):
            pattern = [None] * ell
            for pos, pin in zip(filled_positions, arrangement):
                pattern[pos] = pin
            out.add(tuple(pattern))
    return sorted(out, key=lambda p: tuple(-1 if x is None else x for x in p))


def _install_class_slab(entries, slab, ell, F):
    one = F.one()
    if slab.kind == "cov":
        for ci, cls in enumerate(slab.classes):
            coord = slab.offset + ci
            for pattern in _arrangements(cls, ell, 1):
                key = list(pattern)
                key[free_slots(pattern)[0]] = coord
                entries[tuple(key)] = one
    else:
        (cls,) = slab.classes
        b = slab.b
        univ = universal_nform(b, slab.blocks, F)
        for pattern in _arrangements(cls, ell, b):
            free = free_slots(pattern)
            for ukey in univ.form.entries:
                key = list(pattern)
                for slot, coord in zip(free, ukey):
                    key[slot] = slab.offset + coord
                entries[tuple(key)] = one


def _install_pattern_slab(entries, slab, F):
    (pattern,) = slab.classes
    free = free_slots(pattern)
    univ = universal_nform(slab.b, slab.blocks, F)
    for ukey, val in univ.form.entries.items():
        key = list(pattern)
        for slot, coord in zip(free, ukey):
            key[slot] = slab.offset + coord
        entries[tuple(key)] = val


def _normalized_extension(ext):
    """Change basis on ext.target so the base sits in the first coordinates.

    Returns (B, Binv, eta): eta[i] is target form i pulled back along
    B = [base image | complement]; its pure-base block equals the base form.
    """
    Y = ext.target
    F = Y.field
    comp = column_space_complement(ext.matrix.columns(), F, Y.dim)
    B = Matrix.from_columns(F, ext.matrix.columns() + comp, rows=Y.dim)
    Binv = B.inverse()
    eta = [f.canonical.pullback(B) for f in Y.forms]
    return B, Binv, eta


def embed_over_base(ext, rel):
    """Embed an extension of the base into the relative universal extension.

    ext : base -> Y (certified embedding); rel : relative extension of the
    same base.  Returns a certified embedding Y -> rel.target whose
    restriction along ext is rel.inclusion.
    """
    X = rel.base
    if ext.source != X:
        raise DimensionError("extension is not over the relative base")
    F = X.field
    Y = ext.target
    c = Y.dim - X.dim
    if c > rel.bound:
        raise CapacityError(
            f"extension adds {c} dimensions, bound is {rel.bound}"
        )
    n = X.dim
    _, Binv, eta = _normalized_extension(ext)
    total = rel.target.dim
    zero, one = F.zero(), F.one()
    # g : complement coords -> free coords of rel.target
    g_rows = {}
    for t in range(c):
        row = [zero] * c
        row[t] = one
        g_rows[n + t] = row  # injectivity tail
    for slab in rel.slabs:
        eta_i = eta[slab.entry]
        ell = X.tuple[slab.entry].size
        if slab.kind == "cov":
            for ci, cls in enumerate(slab.classes):
                row = []
                for j in range(c):
                    key = tuple(sorted(cls)) + (n + j,)
                    row.append(eta_i.entries.get(key, zero))
                if any(not F.is_zero(x) for x in row):
                    g_rows[slab.offset + ci] = row
        else:
            (cls,) = slab.classes
            b = slab.b
            if rel.strategies[slab.entry] == "classes":
                pins = tuple(sorted(cls))
                free_positions = list(range(ell - b, ell))
                base_key = list(pins) + [None] * b
            else:
                pins = None
                base_key = list(cls)
                free_positions = free_slots(cls)
            tau_entries = {}
            for jkey in product(range(c), repeat=b):
                key = list(base_key)
                for slot, j in zip(free_positions, jkey):
                    key[slot] = n + j
                val = eta_i.entries.get(tuple(key), zero)
                if not F.is_zero(val):
                    tau_entries[jkey] = val
            tau = MultiForm(F, c, b, tau_entries)
            univ = universal_nform(b, slab.blocks, F)
            piece = embed_into_universal_nform(tau, univ)
            for r in range(piece.rows):
                if any(not F.is_zero(x) for x in piece.data[r]):
                    g_rows[slab.offset + r] = list(piece.data[r])
    # assemble (identity_X (+) g) o Binv
    lift = []
    for r in range(total):
        if r < n:
            row = [one if j == r else zero for j in range(n + c)]
        else:
            grow = g_rows.get(r)
            if grow is None:
                row = [zero] * (n + c)
            else:
                row = [zero] * n + grow
        lift.append(row)
    M = Matrix(F, lift).mul(Binv)
    result = LinearEmbedding(Y, rel.target, M)
    if M.mul(ext.matrix) != rel.inclusion.matrix:
        raise CertificateError("embed_over_base does not restrict to the inclusion")
    return result


# --------------------------------------------------------------------------
# amalgamation
# --------------------------------------------------------------------------


@dataclass
class Amalgam:
    space: LambdaSpace
    leg_left: LinearEmbedding
    leg_right: LinearEmbedding


def amalgamate(f, g):
    """Push out two extensions of a common base, with zero cross-terms.

    f : X -> Y and g : X -> Z; returns W = X (+) Y' (+) Z' with certified
    legs y : Y -> W and z : Z -> W satisfying y o f = z o g exactly.
    """
    X = f.source
    if g.source != X:
        raise DimensionError("embeddings do not share a source")
    F = X.field
    n = X.dim
    _, BYinv, etaY = _normalized_extension(f)
    _, BZinv, etaZ = _normalized_extension(g)
    cy = f.target.dim - n
    cz = g.target.dim - n
    total = n + cy + cz
    raw_forms = []
    for idx, lam in enumerate(X.tuple):
        entries = {}
        for key, val in etaY[idx].entries.items():
            entries[key] = val
        for key, val in etaZ[idx].entries.items():
            if all(i < n for i in key):
                if entries.get(key) != val:
                    raise CertificateError(
                        "base structures disagree between the two extensions"
                    )
            else:
                shifted = tuple(i if i < n else i + cy for i in key)
                entries[shifted] = val
        raw_forms.append(MultiForm(F, total, lam.size, entries))
    W = LambdaSpace.from_raw_forms(F, total, X.tuple, raw_forms, project=False)
    zero, one = F.zero(), F.one()

    def padded(binv, src_dim, row_offset, rows_kept):
        rows = []
        for r in range(total):
            if r < n:
                rows.append(list(binv.data[r]))
            elif row_offset <= r < row_offset + rows_kept:
                rows.append(list(binv.data[n + (r - row_offset)]))
            else:
                rows.append([zero] * src_dim)
        return Matrix(F, rows)

    y = LinearEmbedding(f.target, W, padded(BYinv, f.target.dim, n, cy))
    z = LinearEmbedding(g.target, W, padded(BZinv, g.target.dim, n + cy, cz))
    if y.matrix.mul(f.matrix) != z.matrix.mul(g.matrix):
        raise CertificateError("amalgamation square does not commute")
    return Amalgam(W, y, z)


# --------------------------------------------------------------------------
# dimension cross-check against the shift tuple
# --------------------------------------------------------------------------


def _fixed_dim_zero_base_block(lam, n, total):
    """dim of projector-fixed `total`-dim forms vanishing on pure-base tuples.

    The projector permutes slots, so it is block-diagonal across index
    multiset orbits; the fixed dimension is the sum of per-orbit ranks, and
    dropping the pure-base orbits enforces the zero all-filled block.
    """
    from fractions import Fraction

    element = _young_element(lam)
    ell = lam.size
    orbits = {}
    for key in product(range(total), repeat=ell):
        orbits.setdefault(tuple(sorted(key)), []).append(key)
    dim = 0
    for rep, keys in orbits.items():
        if all(i < n for i in rep):
            continue
        index = {k: p for p, k in enumerate(keys)}
        size = len(keys)
        mat = [[Fraction(0)] * size for _ in range(size)]
        for p, key in enumerate(keys):
            for perm, coeff in element.items():
                new = [0] * ell
                for k in range(ell):
                    new[perm[k]] = key[k]
                mat[index[tuple(new)]][p] += coeff
        dim += _rational_rank(mat)
    return dim


def _rational_rank(mat):
    rows = [row[:] for row in mat]
    rank = 0
    cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
    return rank


def blocks_dimension_check(tup, n, dprime):
    """Concrete block carrier vs the shift-tuple dimension count.

    Compares the dimension of valid block structures (projector-fixed
    assembled tensors with zero all-filled block), computed by exact linear
    algebra, with sum over nonempty nu of mult_{sh_n}(nu) * dim S_nu(k^d').
    """
    tup = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
    total = n + dprime
    lhs = sum(
        _fixed_dim_zero_base_block(lam, n, total) for lam in tup
    )
    full, _ = shift_tuple(tup, n)
    rhs = 0
    for nu, mult in full.items():
        if nu.is_empty():
            continue
        rhs += mult * schur_dim(nu, dprime)
    return lhs == rhs
