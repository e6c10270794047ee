"""Heavier cross-validation runs: exhaustive sweeps off the acceptance path.

These target the constructions whose correctness argument is subtle enough
to deserve brute force: relative extensions for non-symmetric shapes and
multi-pin bases, the multi-level split resolution inside towers, radical
handling in Witt extension, and deeper back-and-forth alternation.
"""

import itertools
import random
from fractions import Fraction

import pytest

from tensorspaces.engine import (
    LambdaInstance,
    back_and_forth,
    build_tower,
    empty_seed,
)
from tensorspaces.errors import CertificateError
from tensorspaces.fields import QQ, PrimeField
from tensorspaces.forms import (
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    enumerate_lambda_structures,
    fixed_form_basis,
    random_lambda_space,
)
from tensorspaces.homogeneity import (
    HyperbolicInstance,
    gram_matrix,
    hyperbolic_space,
    orbit_test,
    witt_extend,
)
from tensorspaces.linalg import Matrix
from tensorspaces.partitions import Partition, PartitionTuple
from tensorspaces.shifting import embed_over_base, relative_universal_extension

F3, F5 = PrimeField(3), PrimeField(5)
T2 = PartitionTuple([Partition((2,))])
T11 = PartitionTuple([Partition((1, 1))])
TMIX = PartitionTuple([Partition((2,)), Partition((1, 1))])


def _inclusion(field, big, small):
    return Matrix(
        field,
        [[field.one() if i == j else field.zero() for j in range(small)] for i in range(big)],
    )


def _extensions_over(base, dprime, field):
    """All structures on k^{n+d'} restricting to the base on the first block."""
    n = base.dim
    total = n + dprime
    incl = _inclusion(field, total, n)
    bases = [fixed_form_basis(field, total, lam) for lam in base.tuple]
    elems = list(field.elements())

    def per_entry(idx):
        lam = base.tuple[idx]
        target_block = base.forms[idx].canonical
        out = []
        for coeffs in itertools.product(elems, repeat=len(bases[idx])):
            acc = MultiForm.zero(field, total, lam.size)
            for c, bf in zip(coeffs, bases[idx]):
                if not field.is_zero(c):
                    acc = acc.add(bf.scale(c))
            if acc.pullback(incl) == target_block:
                out.append(acc)
        return out

    for combo in itertools.product(*[per_entry(i) for i in range(len(base.tuple))]):
        yield LambdaSpace(
            field,
            total,
            base.tuple,
            [
                type(base.forms[0])(lam, f)
                for lam, f in zip(base.tuple, combo)
            ],
        )


def test_relative_extension_antisymmetric_exhaustive():
    # [(1,1)] uses the per-pattern carrier path; base dim 2 over F_3, bound 1
    for base in enumerate_lambda_structures(T11, 2, F3):
        rel = relative_universal_extension(base, 1)
        incl = _inclusion(F3, 3, 2)
        count = 0
        for Y in _extensions_over(base, 1, F3):
            ext = LinearEmbedding(base, Y, incl)
            beta = embed_over_base(ext, rel)
            assert beta.matrix.mul(ext.matrix) == rel.inclusion.matrix
            count += 1
        assert count == 9  # one (1)-residual (2 free coeffs: pairing per pin)


def test_relative_extension_mixed_tuple_exhaustive():
    # [(2),(1,1)] mixes the class-reduced and per-pattern strategies
    rng = random.Random(200)
    seen = 0
    for base in enumerate_lambda_structures(TMIX, 1, F3):
        rel = relative_universal_extension(base, 1)
        incl = _inclusion(F3, 2, 1)
        for Y in _extensions_over(base, 1, F3):
            ext = LinearEmbedding(base, Y, incl)
            beta = embed_over_base(ext, rel)
            assert beta.matrix.mul(ext.matrix) == rel.inclusion.matrix
            seen += 1
    assert seen == 3 * 9 * 3  # 3 bases (0-form (1,1) on k^1), ext coeff space


def test_relative_extension_two_pin_quadratic_exhaustive():
    # base dim 2 over F_3 exercises multi-pin covector classes
    total = 0
    for base in enumerate_lambda_structures(T2, 2, F3):
        rel = relative_universal_extension(base, 1)
        incl = _inclusion(F3, 3, 2)
        for Y in _extensions_over(base, 1, F3):
            ext = LinearEmbedding(base, Y, incl)
            beta = embed_over_base(ext, rel)
            assert beta.matrix.mul(ext.matrix) == rel.inclusion.matrix
            total += 1
    assert total == 27 * 27


def test_relative_extension_cubic_lines_exhaustive_f5():
    for base in enumerate_lambda_structures(
        PartitionTuple([Partition((3,))]), 1, F5
    ):
        rel = relative_universal_extension(base, 1)
        incl = _inclusion(F5, 2, 1)
        count = 0
        for Y in _extensions_over(base, 1, F5):
            ext = LinearEmbedding(base, Y, incl)
            embed_over_base(ext, rel)
            count += 1
        assert count == 125


def test_tower_absorbs_all_dim3_quadratic_f3():
    # forces the split path: 3-dim requests against schedule (1, 2, 3)
    inst = LambdaInstance(T2, F3)
    tower = build_tower(inst, 3, [1, 2, 3])
    served = 0
    for s in enumerate_lambda_structures(T2, 3, F3):
        beta, n = tower.extend_embedding(
            0, inst.from_initial(tower.levels[0]), inst.from_initial(s), log=False
        )
        assert n == 2
        served += 1
    assert served == 3**6


def test_witt_extend_fully_isotropic_subspace():
    # 3-dimensional totally isotropic subspaces of H^4: radical enlargement
    # must pair away a 3-dimensional radical on both sides at once
    one, zero = QQ.one(), QQ.zero()

    def e(i, n=8):
        v = [zero] * n
        v[2 * i] = one
        return tuple(v)

    left = [e(0), e(1), e(2)]
    right = [e(1), e(2), e(3)]
    g = witt_extend(4, QQ, left, right)
    for a, b in zip(left, right):
        assert g.apply(a) == b
    BV = gram_matrix(hyperbolic_space(4, QQ))
    assert g.transpose().mul(BV).mul(g) == BV


def test_witt_extend_mixed_radical_rank():
    # span with 1-dim radical inside a nondegenerate part
    one, zero = QQ.one(), QQ.zero()
    f1 = (zero, one, zero, zero, zero, zero)
    e1 = (one, zero, zero, zero, zero, zero)
    h = tuple([one, one, zero, zero, zero, zero])  # q = 2
    e2 = (zero, zero, one, zero, zero, zero)
    left = [h, e2]
    hp = (zero, zero, zero, zero, one, one)  # q = 2 in block 3
    e3 = (one, zero, zero, zero, zero, zero)
    right = [hp, e3]
    g = witt_extend(3, QQ, left, right)
    for a, b in zip(left, right):
        assert g.apply(a) == b


def test_back_and_forth_deep_alternation_hyperbolic():
    # hyperbolic levels grow linearly, so deeper zigzags stay feasible
    ta = build_tower(HyperbolicInstance(QQ), 2, [1, 1], lazy=True)
    tb = build_tower(HyperbolicInstance(QQ), 2, [1, 1], lazy=True)
    res = back_and_forth(ta, tb, empty_seed(ta, tb), 4)
    assert len(res.forward) == 2 and len(res.backward) == 2
    # second forward leg still composes to a transition of tower A
    phi2, s2, d2 = res.forward[1]
    psi1, sb, db = res.backward[0]
    comp = phi2.matrix.mul(psi1.matrix)
    assert comp == tb.transition(sb, d2).matrix


def test_orbit_pairs_of_2tuples_sampled_f3():
    inst = LambdaInstance(T2, F3)
    tower = build_tower(inst, 3, [1, 2, 3], lazy=True)
    lvl = tower.levels[0]
    rng = random.Random(201)
    pairs_checked = 0
    vectors = [v for v in itertools.product(range(3), repeat=4) if any(v)]
    while pairs_checked < 10:
        v1, v2 = rng.sample(vectors, 2)
        if Matrix.from_columns(F3, [v1, v2], rows=4).rank() != 2:
            continue
        r = orbit_test(tower, 0, [v1, v2], 0, [v1, v2], 3)
        assert r.verdict == "equal-orbit"
        pairs_checked += 1


def test_decompose_exhaustive_f5_n3_d1():
    from tensorspaces.forms import decompose_form, reassemble

    for v in range(5):
        w = MultiForm(F5, 1, 3, {(0, 0, 0): v} if v else {})
        comps = decompose_form(w)
        assert reassemble(comps, F5, 1, 3) == w
        for (lam, T), comp in comps.items():
            if lam != Partition((3,)):
                assert comp.is_zero()  # one-dimensional: only symmetric part
