"""Classifying map, orbit tests, oligomorphic witnesses, and Witt machinery.

The classifying map sends a linearly independent tuple to the structure
pulled back onto its span; it is a complete orbit invariant in the limit,
and the orbit test treats it as such: a mismatch is a sound "distinct
orbits" verdict, while equality triggers a back-and-forth search whose
failure is only ever reported as inconclusive.

The quadratic half implements the hyperbolic model exactly: Witt
decomposition embeds any quadratic space into hyperbolic space of the same
dimension, and Witt's theorem (via reflections) extends subspace isometries
to global ones.  These act as an independent oracle for the generic engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CapacityError,
    CertificateError,
    DimensionError,
    FieldError,
)
from .forms import LambdaForm, LambdaSpace, LinearEmbedding, MultiForm
from .linalg import (
    Matrix,
    column_space_complement,
    in_column_span,
    kernel_basis,
    solve_linear,
)
from .partitions import Partition, PartitionTuple
from .shifting import relative_universal_extension, embed_over_base
from .universal import universal_lambda_space, embed_finite_space
from .engine import LambdaInstance


# --------------------------------------------------------------------------
# classifying map
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RestrictionPoint:
    """Structure induced on the span of a tuple: a point of the type space."""

    tuple: PartitionTuple
    n: int
    forms: tuple  # MultiForm on dim n, one per tuple entry

    def __eq__(self, other):
        return (
            isinstance(other, RestrictionPoint)
            and self.tuple == other.tuple
            and self.n == other.n
            and self.forms == other.forms
        )

    def __hash__(self):
        return hash((self.tuple, self.n))

    def first_difference(self, other):
        for idx, (a, b) in enumerate(zip(self.forms, other.forms)):
            keys = sorted(set(a.entries) | set(b.entries))
            for k in keys:
                if a.entries.get(k) != b.entries.get(k):
                    return idx, k
        return None

    def as_space(self, field):
        forms = [
            LambdaForm(lam, f) for lam, f in zip(self.tuple, self.forms)
        ]
        return LambdaSpace(field, self.n, self.tuple, forms)


def tuple_matrix(space, vectors):
    M = Matrix.from_columns(space.field, [tuple(v) for v in vectors], rows=space.dim)
    if M.rank() != len(vectors):
        raise DimensionError("tuple is not linearly independent")
    return M


def classifying_map(space, vectors):
    """pi(v) = pullback of the structure along e_i -> v_i (independent tuple)."""
    M = tuple_matrix(space, vectors)
    forms = tuple(f.canonical.pullback(M) for f in space.forms)
    return RestrictionPoint(space.tuple, len(vectors), forms)


def span_embedding(space, vectors):
    """The span of the tuple as a lambda-space, embedded by the tuple itself."""
    M = tuple_matrix(space, vectors)
    point = classifying_map(space, vectors)
    X = point.as_space(space.field)
    return LinearEmbedding(X, space, M)


def principal_type_point(tower, level, vectors):
    """The complete principal-type datum of a tuple in a tower level."""
    return classifying_map(tower.levels[level], vectors)


# --------------------------------------------------------------------------
# orbit machinery
# --------------------------------------------------------------------------


@dataclass
class AutomorphismFragment:
    """Finite window of an automorphism: certified legs through the tower."""

    forward: object  # levels[src_fwd] -> levels[dst_fwd]
    src_fwd: int
    dst_fwd: int
    backward: object
    src_bwd: int
    dst_bwd: int


@dataclass
class OrbitResult:
    verdict: str  # "equal-orbit" | "distinct-orbits" | "inconclusive"
    fragment: AutomorphismFragment = None
    witness: tuple = ()  # (form index, entry key) on distinct verdicts
    detail: str = ""


def orbit_test(tower, level_v, vectors_v, level_w, vectors_w, budget):
    """Decide tower orbit equivalence of two independent tuples.

    A classifying-point mismatch is a sound "distinct orbits"; equality is
    followed by alternating extension requests producing a fragment mapping
    one tuple to the other.  Search failure within the budget is reported as
    inconclusive, never as distinctness.
    """
    if len(vectors_v) != len(vectors_w):
        raise DimensionError("tuples must have equal length")
    pv = classifying_map(tower.levels[level_v], vectors_v)
    pw = classifying_map(tower.levels[level_w], vectors_w)
    if pv != pw:
        idx, key = pv.first_difference(pw)
        return OrbitResult("distinct-orbits", witness=(idx, key))
    if budget < 2:
        return OrbitResult("inconclusive", detail="budget below 2 alternations")
    emb_v = span_embedding(tower.levels[level_v], vectors_v)
    emb_w = span_embedding(tower.levels[level_w], vectors_w)
    # shared source object: the classifying points are equal
    emb_w = LinearEmbedding(emb_v.source, tower.levels[level_w], emb_w.matrix)
    try:
        fwd, nf = tower.extend_embedding(level_w, emb_w, emb_v)
        bwd, nb = tower.extend_embedding(level_v, emb_v, emb_w)
    except CapacityError as exc:
        return OrbitResult("inconclusive", detail=str(exc))
    frag = AutomorphismFragment(fwd, level_v, nf, bwd, level_w, nb)
    _check_fragment_maps(tower, frag, vectors_v, vectors_w)
    return OrbitResult("equal-orbit", fragment=frag)


def _check_fragment_maps(tower, frag, vectors_v, vectors_w):
    eps_f = tower.transition(frag.src_bwd, frag.dst_fwd)
    for v, w in zip(vectors_v, vectors_w):
        if frag.forward.matrix.apply(tuple(v)) != eps_f.matrix.apply(tuple(w)):
            raise CertificateError("forward fragment does not map the tuples")
    eps_b = tower.transition(frag.src_fwd, frag.dst_bwd)
    for v, w in zip(vectors_v, vectors_w):
        if frag.backward.matrix.apply(tuple(w)) != eps_b.matrix.apply(tuple(v)):
            raise CertificateError("backward fragment does not map the tuples")


@dataclass
class OligomorphicWitness:
    absorber_level: int
    absorber_columns: Matrix  # universal carrier embedded in that level
    fragment: object  # levels[src] -> levels[dst]
    src_level: int
    dst_level: int


def _absorber(tower, d):
    """Fixed d-universal subspace of the tower (cached per tower and d)."""
    if d in tower.witness_cache:
        return tower.witness_cache[d]
    inst = tower.instance
    U = universal_lambda_space(inst.tuple, d, inst.field)
    alpha = inst.from_initial(tower.levels[0])
    iota = inst.from_initial(U.space)
    emb, level = tower.extend_embedding(0, alpha, iota, log=False)
    tower.witness_cache[d] = (U, emb, level)
    return tower.witness_cache[d]


def oligomorphic_witness(tower, level, w_vectors, d):
    """A fragment moving the span of the given vectors into the fixed absorber."""
    if len(w_vectors) > d:
        raise DimensionError("subspace dimension exceeds the bound")
    inst = tower.instance
    U, u_emb, u_level = _absorber(tower, d)
    emb_w = span_embedding(tower.levels[level], w_vectors)
    j = embed_finite_space(emb_w.source, U)
    alpha = u_emb.compose(j)
    frag, m = tower.extend_embedding(u_level, alpha, emb_w)
    eps = tower.transition(u_level, m)
    absorber_cols = eps.matrix.mul(u_emb.matrix)
    for w in w_vectors:
        moved = frag.matrix.apply(tuple(w))
        if not in_column_span(
            absorber_cols.columns(), inst.field, absorber_cols.rows, moved
        ):
            raise CertificateError("witness does not land in the absorber")
    return OligomorphicWitness(m, absorber_cols, frag, level, m)


def oligomorphic_witness_pinned(tower, level, pins, w_vectors, d):
    """Base-fixing variant: the fragment fixes the pins pointwise.

    Requires the span of the vectors to meet the pin span trivially.
    """
    inst = tower.instance
    emb_pins = span_embedding(tower.levels[level], pins)
    X_u = emb_pins.source
    combined = list(pins) + list(w_vectors)
    emb_all = span_embedding(tower.levels[level], combined)
    X_Y = emb_all.source
    if len(w_vectors) > d:
        raise DimensionError("subspace dimension exceeds the bound")
    rel = relative_universal_extension(X_u, d)
    kappa, n_kappa = tower.extend_embedding(level, emb_pins, rel.inclusion)
    F = inst.field
    zero, one = F.zero(), F.one()
    ext_rows = [
        [one if c == r else zero for c in range(X_u.dim)] for r in range(X_Y.dim)
    ]
    ext = LinearEmbedding(X_u, X_Y, Matrix(F, ext_rows))
    beta = embed_over_base(ext, rel)
    j = kappa.compose(beta)
    frag, m = tower.extend_embedding(n_kappa, j, emb_all)
    eps = tower.transition(level, m)
    for p in pins:
        if frag.matrix.apply(tuple(p)) != eps.matrix.apply(tuple(p)):
            raise CertificateError("pinned witness moved a pin")
    absorber_cols = tower.transition(n_kappa, m).matrix.mul(kappa.matrix)
    for w in w_vectors:
        moved = frag.matrix.apply(tuple(w))
        if not in_column_span(
            absorber_cols.columns(), F, absorber_cols.rows, moved
        ):
            raise CertificateError("pinned witness misses the relative absorber")
    return OligomorphicWitness(m, absorber_cols, frag, level, m)


# --------------------------------------------------------------------------
# quadratic spaces: hyperbolic model and Witt machinery
# --------------------------------------------------------------------------

QUADRATIC = PartitionTuple([Partition((2,))])


def hyperbolic_space(d, field):
    """H^{(+)d}: Gram is block diagonal with d blocks [[0,1],[1,0]]."""
    field.check_partition_size(2)
    one = field.one()
    entries = {}
    for k in range(d):
        entries[(2 * k, 2 * k + 1)] = one
        entries[(2 * k + 1, 2 * k)] = one
    form = MultiForm(field, 2 * d, 2, entries)
    return LambdaSpace(field, 2 * d, QUADRATIC, [LambdaForm(Partition((2,)), form)])


def gram_matrix(space):
    if space.tuple != QUADRATIC:
        raise DimensionError("not a quadratic space")
    F = space.field
    form = space.forms[0].canonical
    d = space.dim
    return Matrix(
        F,
        [[form.entries.get((i, j), F.zero()) for j in range(d)] for i in range(d)],
    )


def witt_embed_quadratic(space):
    """Certified embedding of a quadratic space into hyperbolic space.

    Splits off the radical, maps the nondegenerate part x -> (x, Gx/2) into
    matched hyperbolic pairs, and sends radical basis vectors to isotropic
    e-vectors of fresh blocks; the target is hyperbolic_space(dim).
    """
    F = space.field
    if F.char == 2:
        raise CharacteristicErrorFor2()
    G = gram_matrix(space)
    d = space.dim
    rad = kernel_basis(G)
    comp = column_space_complement(rad, F, d)
    # basis: nondegenerate part first, then the radical
    B = Matrix.from_columns(F, comp + rad, rows=d)
    r0 = len(comp)
    A0 = B.transpose().mul(G).mul(B)  # block diag: (A0_nondeg, 0)
    H = hyperbolic_space(d, F)
    zero, one = F.zero(), F.one()
    half = F.inv(F.from_int(2))
    rows = [[zero] * d for _ in range(2 * d)]
    for j in range(r0):
        rows[2 * j][j] = one  # e-coordinate of block j
        for k in range(r0):
            rows[2 * k + 1][j] = F.mul(half, A0.data[k][j])  # f-coordinates
    for i in range(len(rad)):
        rows[2 * (r0 + i)][r0 + i] = one  # radical -> isotropic e-vector
    M_parts = Matrix(F, rows)
    return LinearEmbedding(space, H, M_parts.mul(B.inverse()))


class CharacteristicErrorFor2(FieldError):
    def __init__(self):
        super().__init__("Witt machinery requires characteristic != 2")


def _bil(BV, x, y):
    return BV.field.sum(
        BV.field.mul(a, b) for a, b in zip(BV.apply(tuple(y)), tuple(x))
    )


def _reflection(BV, u):
    """Reflection in an anisotropic vector, as a matrix."""
    F = BV.field
    q = _bil(BV, u, u)
    factor = F.div(F.from_int(2), q)
    n = BV.rows
    pairings = BV.apply(tuple(u))  # (B(e_j, u))_j
    cols = []
    for j in range(n):
        col = [F.one() if i == j else F.zero() for i in range(n)]
        scale = F.mul(factor, pairings[j])
        col = [F.sub(c, F.mul(scale, ui)) for c, ui in zip(col, u)]
        cols.append(col)
    return Matrix.from_columns(F, cols, rows=n)


def witt_extend(n, field, w_cols, wprime_cols):
    """Extend an isometry between subspaces of H^{(+)n} to a global isometry.

    w_cols and wprime_cols list corresponding basis vectors; the map
    w_cols[i] -> wprime_cols[i] must be an isometry (checked).  Returns an
    invertible matrix g preserving the form with g w_i = w'_i, built from
    hyperbolic enlargement of the radical followed by reflections.
    """
    if field.char == 2:
        raise CharacteristicErrorFor2()
    V = hyperbolic_space(n, field)
    BV = gram_matrix(V)
    F = field
    W = [tuple(c) for c in w_cols]
    Wp = [tuple(c) for c in wprime_cols]
    if len(W) != len(Wp):
        raise DimensionError("subspace bases differ in length")
    k = len(W)
    if k:
        if Matrix.from_columns(F, W, rows=2 * n).rank() != k:
            raise DimensionError("left basis not independent")
        if Matrix.from_columns(F, Wp, rows=2 * n).rank() != k:
            raise DimensionError("right basis not independent")
    for i in range(k):
        for j in range(k):
            if _bil(BV, W[i], W[j]) != _bil(BV, Wp[i], Wp[j]):
                raise CertificateError("given map is not an isometry")
    W, Wp = _enlarge_radical(BV, W, Wp)
    g = _align_by_reflections(BV, W, Wp)
    for orig, target in zip(w_cols, wprime_cols):
        if g.apply(tuple(orig)) != tuple(target):
            raise CertificateError("Witt extension misses a basis vector")
    if not _is_isometry(BV, g):
        raise CertificateError("Witt extension does not preserve the form")
    return g


def _is_isometry(BV, g):
    return g.transpose().mul(BV).mul(g) == BV and g.inverse() is not None


def _enlarge_radical(BV, W, Wp):
    """Pair away the radical of the restricted form, on both sides at once."""
    F = BV.field
    k = len(W)
    if k == 0:
        return W, Wp
    gram = Matrix(F, [[_bil(BV, a, b) for b in W] for a in W])
    radker = kernel_basis(gram)
    if not radker:
        return W, Wp
    comp = column_space_complement(radker, F, k)
    basis = Matrix.from_columns(F, list(radker) + comp, rows=k)
    duals = basis.inverse()
    Wmat = Matrix.from_columns(F, W, rows=BV.rows)
    Wpmat = Matrix.from_columns(F, Wp, rows=BV.rows)
    pair_rows = Wmat.transpose().mul(BV)  # row i: B(w_i, -)
    pair_rows_p = Wpmat.transpose().mul(BV)
    us = [Wmat.apply(r) for r in radker]
    ups = [Wpmat.apply(r) for r in radker]
    vs, vps = [], []
    half = F.inv(F.from_int(2))
    for m in range(len(radker)):
        s = duals.data[m]
        v = solve_linear(pair_rows, s)
        vp = solve_linear(pair_rows_p, s)
        if v is None or vp is None:
            raise CertificateError("radical pairing system inconsistent")
        v, vp = list(v), list(vp)
        for l in range(m):
            want = _bil(BV, vs[l], v)
            have = _bil(BV, vps[l], vp)
            c = F.sub(want, have)
            vp = [F.add(x, F.mul(c, u)) for x, u in zip(vp, ups[l])]
        t = F.mul(half, F.sub(_bil(BV, v, v), _bil(BV, vp, vp)))
        vp = [F.add(x, F.mul(t, u)) for x, u in zip(vp, ups[m])]
        vs.append(tuple(v))
        vps.append(tuple(vp))
    W2 = W + vs
    Wp2 = Wp + vps
    for i in range(len(W2)):
        for j in range(len(W2)):
            if _bil(BV, W2[i], W2[j]) != _bil(BV, Wp2[i], Wp2[j]):
                raise CertificateError("radical enlargement broke the isometry")
    gram2 = Matrix(F, [[_bil(BV, a, b) for b in W2] for a in W2])
    if kernel_basis(gram2):
        raise CertificateError("radical enlargement left a degenerate form")
    return W2, Wp2


def _orthogonalize(BV, W):
    """Coefficient matrix S with anisotropic pairwise-orthogonal W*S columns."""
    F = BV.field
    k = len(W)
    Wmat = Matrix.from_columns(F, W, rows=BV.rows)
    gram = Matrix(F, [[_bil(BV, a, b) for b in W] for a in W])

    def q_of(coeffs):
        total = F.zero()
        for i, a in enumerate(coeffs):
            if F.is_zero(a):
                continue
            for j, b in enumerate(coeffs):
                if not F.is_zero(b):
                    total = F.add(total, F.mul(F.mul(a, b), gram.data[i][j]))
        return total

    def pair_of(x, y):
        total = F.zero()
        for i, a in enumerate(x):
            if F.is_zero(a):
                continue
            for j, b in enumerate(y):
                if not F.is_zero(b):
                    total = F.add(total, F.mul(F.mul(a, b), gram.data[i][j]))
        return total

    remaining = [
        tuple(F.one() if i == j else F.zero() for i in range(k)) for j in range(k)
    ]
    chosen = []
    while remaining:
        pick = None
        for idx, r in enumerate(remaining):
            if not F.is_zero(q_of(r)):
                pick = idx
                break
        if pick is None:
            found = False
            for a in range(len(remaining)):
                for b in range(a + 1, len(remaining)):
                    if not F.is_zero(pair_of(remaining[a], remaining[b])):
                        remaining[a] = tuple(
                            F.add(x, y) for x, y in zip(remaining[a], remaining[b])
                        )
                        pick = a
                        found = True
                        break
                if found:
                    break
            if pick is None:
                raise CertificateError("no anisotropic vector in a nondegenerate space")
        o = remaining.pop(pick)
        qo = q_of(o)
        remaining = [
            tuple(
                F.sub(x, F.mul(F.div(pair_of(r, o), qo), y))
                for x, y in zip(r, o)
            )
            for r in remaining
        ]
        chosen.append(o)
    return [tuple(c) for c in chosen]


def _align_by_reflections(BV, W, Wp):
    F = BV.field
    dim = BV.rows
    g = Matrix.identity(F, dim)
    if not W:
        return g
    coeffs = _orthogonalize(BV, W)
    Wmat = Matrix.from_columns(F, W, rows=dim)
    Wpmat = Matrix.from_columns(F, Wp, rows=dim)
    for s in coeffs:
        o = Wmat.apply(s)
        op = Wpmat.apply(s)
        oh = g.apply(o)
        u = tuple(F.sub(a, b) for a, b in zip(oh, op))
        if not F.is_zero(_bil(BV, u, u)):
            g = _reflection(BV, u).mul(g)
        else:
            plus = tuple(F.add(a, b) for a, b in zip(oh, op))
            g = _reflection(BV, op).mul(_reflection(BV, plus)).mul(g)
    return g


# --------------------------------------------------------------------------
# hyperbolic tower instance (explicit model, Witt-powered resolution)
# --------------------------------------------------------------------------


@dataclass
class HyperbolicRelExt:
    base: LambdaSpace
    bound: int
    target: LambdaSpace
    inclusion: LinearEmbedding


class HyperbolicInstance(LambdaInstance):
    """Quadratic instance whose levels are explicit hyperbolic sums.

    Universality and relative extension come from Witt theory instead of the
    generic carrier construction: H^{(+)d} is d-universal, and extensions of
    H^{(+)N} split off an orthogonal complement that Witt-embeds into fresh
    hyperbolic blocks.
    """

    def __init__(self, field):
        if field.char == 2:
            raise CharacteristicErrorFor2()
        super().__init__(QUADRATIC, field)

    def universal(self, bound):
        return hyperbolic_space(bound, self.field)

    def relative_extension(self, obj, bound):
        if obj.dim % 2 or obj != hyperbolic_space(obj.dim // 2, self.field):
            raise DimensionError("hyperbolic levels required")
        N = obj.dim // 2
        target = hyperbolic_space(N + bound, self.field)
        F = self.field
        cols = []
        for j in range(obj.dim):
            col = [F.zero()] * target.dim
            col[j] = F.one()
            cols.append(col)
        incl = LinearEmbedding(obj, target, Matrix.from_columns(F, cols, rows=target.dim))
        return HyperbolicRelExt(obj, bound, target, incl)

    def embed_over_base(self, ext, relext):
        from .shifting import _normalized_extension

        X = relext.base
        if ext.source != X:
            raise DimensionError("extension is not over the relative base")
        F = self.field
        Y = ext.target
        c = Y.dim - X.dim
        if c > relext.bound:
            raise CapacityError(f"extension adds {c} dimensions, bound {relext.bound}")
        _, Binv, eta = _normalized_extension(ext)
        n2 = X.dim
        G = Matrix(
            F,
            [
                [eta[0].entries.get((i, j), F.zero()) for j in range(n2 + c)]
                for i in range(n2 + c)
            ],
        )
        GH = gram_matrix(X)
        xs = []
        for t in range(c):
            rhs = tuple(G.data[i][n2 + t] for i in range(n2))
            x = solve_linear(GH, rhs)
            if x is None:
                raise CertificateError("hyperbolic block is degenerate")
            xs.append(x)
        # orthocomplement Gram
        def k_vec(t):
            v = [F.zero()] * (n2 + c)
            v[n2 + t] = F.one()
            for i in range(n2):
                v[i] = F.neg(xs[t][i])
            return tuple(v)

        kvecs = [k_vec(t) for t in range(c)]
        gramK = [
            [eta[0].evaluate([kvecs[s], kvecs[t]]) for t in range(c)]
            for s in range(c)
        ]
        entries = {}
        for s in range(c):
            for t in range(c):
                if not F.is_zero(gramK[s][t]):
                    entries[(s, t)] = gramK[s][t]
        K = LambdaSpace(
            F,
            c,
            QUADRATIC,
            [LambdaForm(Partition((2,)), MultiForm(F, c, 2, entries))],
        )
        phi = witt_embed_quadratic(K)  # K -> H^{(+)c}
        total = relext.target.dim
        zero = F.zero()
        cols = []
        for a in range(n2):
            col = [zero] * total
            col[a] = F.one()
            cols.append(col)
        for t in range(c):
            col = [zero] * total
            for i in range(n2):
                col[i] = xs[t][i]
            for r in range(2 * c):
                col[n2 + r] = phi.matrix.data[r][t]
            cols.append(col)
        M = Matrix.from_columns(F, cols, rows=total).mul(Binv)
        result = LinearEmbedding(Y, relext.target, M)
        if M.mul(ext.matrix) != relext.inclusion.matrix:
            raise CertificateError("hyperbolic embedding does not restrict to the base")
        return result
