"""Schedule-driven towers over an abstract embedding category.

The engine never inspects object internals: an instance supplies universal
objects, relative universal extensions, amalgamation, and morphism algebra.
Towers are finite chains with a request log; served f-injectivity requests
are resolved by amalgamating into an extension of the current level and
consuming scheduled capacity, splitting across levels when one step's bound
is too small.  Lazy towers append exactly-sized levels on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

from .errors import BudgetError, CapacityError, CertificateError
from .forms import (
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    identity_embedding,
    is_embedding,
)
from .linalg import Matrix
from .partitions import PartitionTuple
from .shifting import amalgamate, embed_over_base, relative_universal_extension
from .universal import universal_lambda_space


class AmalgamationInstance:
    """Interface the engine builds towers over; all morphisms carry certificates."""

    def initial(self):
        raise NotImplementedError

    def size(self, obj):
        raise NotImplementedError

    def objects_equal(self, a, b):
        raise NotImplementedError

    def universal(self, bound):
        raise NotImplementedError

    def relative_extension(self, obj, bound):
        """Handle with .base, .bound, .target, .inclusion."""
        raise NotImplementedError

    def embed_over_base(self, ext, relext):
        raise NotImplementedError

    def amalgamate(self, f, g):
        """f: X->Y, g: X->Z; returns (W, y: Y->W, z: Z->W), y o f = z o g."""
        raise NotImplementedError

    def split_extension(self, incl, k):
        """Factor incl: A -> Z through a sub-extension of size(A)+k.

        Returns (mid, a: A->mid, m: mid->Z) with m o a = incl.
        """
        raise NotImplementedError

    def compose(self, f, g):
        raise NotImplementedError

    def identity(self, obj):
        raise NotImplementedError

    def from_initial(self, obj):
        raise NotImplementedError

    def invert_iso(self, m):
        """Inverse of a bijective embedding."""
        raise NotImplementedError

    def morphism_source(self, m):
        raise NotImplementedError

    def morphism_target(self, m):
        raise NotImplementedError

    def morphisms_equal(self, a, b):
        raise NotImplementedError

    def check_embedding(self, m):
        raise NotImplementedError


@dataclass
class ServedRequest:
    base_level: int
    alpha: object  # X -> levels[base_level]
    iota: object  # X -> Y
    beta: object  # Y -> levels[target_level]
    target_level: int


@dataclass
class Tower:
    instance: AmalgamationInstance
    levels: list
    schedule: list
    relexts: list  # relexts[j] built level j+1 over level j
    lazy: bool = False
    log: list = dataclass_field(default_factory=list)
    witness_cache: dict = dataclass_field(default_factory=dict)

    @property
    def depth(self):
        return len(self.levels)

    def transition(self, i, j):
        """Composite embedding levels[i] -> levels[j]."""
        if i == j:
            return self.instance.identity(self.levels[i])
        morph = self.relexts[i].inclusion
        for k in range(i + 1, j):
            morph = self.instance.compose(self.relexts[k].inclusion, morph)
        return morph

    def _ensure_level(self, j, needed):
        while j >= len(self.levels):
            if not self.lazy:
                raise CapacityError(
                    f"tower depth {len(self.levels)} exhausted; need level {j + 1}"
                )
            bound = max(needed, 1)
            rel = self.instance.relative_extension(self.levels[-1], bound)
            self.relexts.append(rel)
            self.levels.append(rel.target)
            self.schedule.append(bound)

    def extend_embedding(self, base_level, alpha, iota, log=True):
        """Resolve an f-injectivity request against the tower.

        alpha : X -> levels[base_level], iota : X -> Y.  Returns
        (beta : Y -> levels[N], N) with beta o iota = transition o alpha,
        verified exactly; the request is appended to the log.
        """
        inst = self.instance
        am = inst.amalgamate(iota, alpha)
        carried = am.leg_left  # Y -> Z
        current = am.leg_right  # levels[j] -> Z
        Z = am.space
        j = base_level
        while True:
            c = inst.size(Z) - inst.size(self.levels[j])
            if c == 0:
                # the amalgam added nothing: fold back through the isomorphism
                beta = inst.compose(inst.invert_iso(current), carried)
                break
            self._ensure_level(j + 1, c)
            cap = self.schedule[j + 1]
            rel = self.relexts[j]
            if c <= cap:
                beta_z = inst.embed_over_base(current, rel)
                beta = inst.compose(beta_z, carried)
                j += 1
                break
            mid, a_mid, m_mid = inst.split_extension(current, cap)
            beta_mid = inst.embed_over_base(a_mid, rel)
            am2 = inst.amalgamate(m_mid, beta_mid)
            carried = inst.compose(am2.leg_left, carried)
            current = am2.leg_right
            Z = am2.space
            j += 1
        lhs = inst.compose(beta, iota)
        rhs = inst.compose(self.transition(base_level, j), alpha)
        if not inst.morphisms_equal(lhs, rhs):
            raise CertificateError("extension triangle does not commute")
        if log:
            self.log.append(ServedRequest(base_level, alpha, iota, beta, j))
        return beta, j

    def replay(self):
        """Re-verify every logged request against the (frozen) tower."""
        inst = self.instance
        for req in self.log:
            if not inst.check_embedding(req.beta):
                raise CertificateError("logged resolution is not an embedding")
            lhs = inst.compose(req.beta, req.iota)
            rhs = inst.compose(
                self.transition(req.base_level, req.target_level), req.alpha
            )
            if not inst.morphisms_equal(lhs, rhs):
                raise CertificateError("logged triangle no longer commutes")
        return len(self.log)

    def cumulative_capacity(self, j):
        return sum(self.schedule[: j + 1])


def build_tower(instance, depth, schedule, lazy=False):
    """Static tower: level 1 universal, each next level relatively universal."""
    if len(schedule) < depth:
        raise ValueError("schedule shorter than depth")
    if any(u <= 0 for u in schedule[:depth]):
        raise ValueError("schedule must be positive")
    levels = [instance.universal(schedule[0])]
    relexts = []
    for j in range(1, depth):
        rel = instance.relative_extension(levels[-1], schedule[j])
        relexts.append(rel)
        levels.append(rel.target)
    return Tower(instance, levels, list(schedule[:depth]), relexts, lazy=lazy)


@dataclass
class BackForthSeed:
    source_obj: object
    emb_a: object  # source_obj -> towerA.levels[level_a]
    level_a: int
    emb_b: object  # gamma-image embedding: source_obj -> towerB.levels[level_b]
    level_b: int


def empty_seed(tower_a, tower_b):
    inst = tower_a.instance
    X = inst.initial()
    return BackForthSeed(
        X,
        inst.from_initial(tower_a.levels[0]),
        0,
        inst.from_initial(tower_b.levels[0]),
        0,
    )


@dataclass
class BackAndForthResult:
    forward: list  # (morphism levels_a[i] -> levels_b[j], i, j)
    backward: list


def back_and_forth(tower_a, tower_b, seed, budget):
    """Alternating extension requests from a seed isomorphism of subobjects.

    Produces embeddings of tower levels into the opposite tower whose
    composites agree with the transitions (each alternation verifies its
    triangle).  The budget bounds the number of alternations.
    """
    if budget < 1:
        raise BudgetError("budget must allow at least one alternation")
    inst = tower_a.instance
    forward = []
    backward = []
    # first alternation: extend the seed over tower B
    phi, nb = tower_b.extend_embedding(seed.level_b, seed.emb_b, seed.emb_a)
    forward.append((phi, seed.level_a, nb))
    cur = phi
    cur_src_level, cur_dst_level = seed.level_a, nb
    direction = "back"
    for _ in range(budget - 1):
        dst_tower = tower_a if direction == "back" else tower_b
        base_obj_level = cur_src_level
        alpha = dst_tower.instance.identity(dst_tower.levels[base_obj_level])
        try:
            nxt, nn = dst_tower.extend_embedding(base_obj_level, alpha, cur)
        except CapacityError as exc:
            raise BudgetError(f"alternation blocked: {exc}") from exc
        if direction == "back":
            backward.append((nxt, cur_dst_level, nn))
        else:
            forward.append((nxt, cur_dst_level, nn))
        cur_src_level, cur_dst_level = cur_dst_level, nn
        cur = nxt
        direction = "forth" if direction == "back" else "back"
    return BackAndForthResult(forward, backward)


@dataclass
class JepChain:
    levels: list
    transitions: list  # transitions[i]: levels[i] -> levels[i+1]
    member_embeddings: list  # objects[i] -> levels[i]

    def embedding_into_top(self, i, instance):
        morph = self.member_embeddings[i]
        for t in self.transitions[i:]:
            morph = instance.compose(t, morph)
        return morph


def jep_chain(objects, instance):
    """Universal-only tower by iterated joint embedding (no homogeneity)."""
    if not objects:
        raise ValueError("need at least one object")
    levels = [objects[0]]
    transitions = []
    members = [instance.identity(objects[0])]
    for obj in objects[1:]:
        am = instance.amalgamate(
            instance.from_initial(levels[-1]), instance.from_initial(obj)
        )
        transitions.append(am.leg_left)
        members.append(am.leg_right)
        levels.append(am.space)
    return JepChain(levels, transitions, members)


# --------------------------------------------------------------------------
# lambda-space instance
# --------------------------------------------------------------------------


class LambdaInstance(AmalgamationInstance):
    """Finite lambda-spaces over a fixed field with certified embeddings."""

    def __init__(self, tup, field):
        self.tuple = tup if isinstance(tup, PartitionTuple) else PartitionTuple(tup)
        self.field = field
        field.check_partition_size(self.tuple.max_entry_size())

    def initial(self):
        forms = [
            MultiForm.zero(self.field, 0, lam.size) for lam in self.tuple
        ]
        return LambdaSpace.from_raw_forms(
            self.field, 0, self.tuple, forms, project=False
        )

    def size(self, obj):
        return obj.dim

    def objects_equal(self, a, b):
        return a == b

    def universal(self, bound):
        return universal_lambda_space(self.tuple, bound, self.field).space

    def relative_extension(self, obj, bound):
        return relative_universal_extension(obj, bound)

    def embed_over_base(self, ext, relext):
        return embed_over_base(ext, relext)

    def amalgamate(self, f, g):
        return amalgamate(f, g)

    def split_extension(self, incl, k):
        from .linalg import column_space_complement

        A = incl.source
        Z = incl.target
        F = self.field
        comp = column_space_complement(incl.matrix.columns(), F, Z.dim)
        cols = incl.matrix.columns() + comp[:k]
        Bmid = Matrix.from_columns(F, cols, rows=Z.dim)
        mid_forms = [
            manif.canonical.pullback(Bmid) for manif in Z.forms
        ]
        mid = LambdaSpace.from_raw_forms(
            F, len(cols), Z.tuple, mid_forms, project=False
        )
        zero, one = F.zero(), F.one()
        a_rows = [
            [one if j == r else zero for j in range(A.dim)]
            for r in range(len(cols))
        ]
        a = LinearEmbedding(A, mid, Matrix(F, a_rows))
        m = LinearEmbedding(mid, Z, Bmid)
        return mid, a, m

    def compose(self, f, g):
        return f.compose(g)

    def identity(self, obj):
        return identity_embedding(obj)

    def from_initial(self, obj):
        init = self.initial()
        return LinearEmbedding(init, obj, Matrix.zeros(self.field, obj.dim, 0))

    def invert_iso(self, m):
        inv = m.matrix.inverse()
        if inv is None:
            raise CertificateError("morphism is not invertible")
        return LinearEmbedding(m.target, m.source, inv)

    def morphism_source(self, m):
        return m.source

    def morphism_target(self, m):
        return m.target

    def morphisms_equal(self, a, b):
        return (
            a.source == b.source and a.target == b.target and a.matrix == b.matrix
        )

    def check_embedding(self, m):
        return is_embedding(m.matrix, m.source, m.target).ok
