import random
from fractions import Fraction

import pytest

from tensorspaces.errors import DimensionError
from tensorspaces.fields import GF, QQ, PrimeField, field_embedding
from tensorspaces.forms import (
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    enumerate_lambda_structures,
    is_embedding,
    random_lambda_space,
    random_multiform,
)
from tensorspaces.linalg import Matrix
from tensorspaces.partitions import Partition, PartitionTuple
from tensorspaces.universal import (
    base_change,
    embed_finite_space,
    embed_into_universal_nform,
    pad_tuple,
    recognize_universal,
    universal_lambda_space,
    universal_nform,
    verify_nform_embedding,
)

F3, F5 = PrimeField(3), PrimeField(5)
F9 = GF(9)
T2 = PartitionTuple([Partition((2,))])
T3 = PartitionTuple([Partition((3,))])


def test_universal_nform_shape():
    u = universal_nform(2, 2, QQ)
    assert u.dim == 4
    assert u.form.entries == {(0, 1): QQ.one(), (2, 3): QQ.one()}
    u1 = universal_nform(1, 1, QQ)
    assert u1.form.entries == {(0,): QQ.one()}
    u3 = universal_nform(3, 1, QQ)
    assert u3.form.entries == {(0, 1, 2): QQ.one()}


def test_embed_d1_n2_table():
    # eta = c * y (x) y: iota(w) = c v11 + v12 + v22
    c = Fraction(7)
    eta = MultiForm(QQ, 1, 2, {(0, 0): c})
    u = universal_nform(2, 2, QQ)
    m = embed_into_universal_nform(eta, u)
    assert [row[0] for row in m.data] == [c, Fraction(1), Fraction(0), Fraction(1)]
    verify_nform_embedding(eta, u, m)


def test_embed_zero_form_still_injective():
    eta = MultiForm.zero(QQ, 1, 2)
    u = universal_nform(2, 2, QQ)
    m = embed_into_universal_nform(eta, u)
    verify_nform_embedding(eta, u, m)
    assert [row[0] for row in m.data] == [Fraction(0), Fraction(1), Fraction(0), Fraction(1)]


def test_embed_exhaustive_cubic_lines_f5():
    # every 1-dimensional cubic target over F_5
    u = universal_nform(3, 1 + 1, F5)
    for v in range(5):
        eta = MultiForm(F5, 1, 3, {(0, 0, 0): v} if v else {})
        m = embed_into_universal_nform(eta, u)
        verify_nform_embedding(eta, u, m)


def test_embed_random_targets():
    rng = random.Random(20)
    for field in (F3, F5, QQ):
        for n in (2, 3):
            for d in (1, 2):
                u = universal_nform(n, d**n + d, field)
                for _ in range(5):
                    eta = random_multiform(field, d, n, rng)
                    m = embed_into_universal_nform(eta, u)
                    verify_nform_embedding(eta, u, m)


def test_embed_monotone_block_inclusion():
    # universal_nform(n, m) includes into universal_nform(n, m+1) exactly
    for n in (1, 2, 3):
        um = universal_nform(n, 2, QQ)
        um1 = universal_nform(n, 3, QQ)
        rows = []
        zero, one = QQ.zero(), QQ.one()
        for r in range(um1.dim):
            rows.append([one if r == c else zero for c in range(um.dim)])
        incl = Matrix(QQ, rows)
        assert um1.form.pullback(incl) == um.form
        assert incl.is_injective()


def test_universal_lambda_space_examples():
    u = universal_lambda_space(PartitionTuple([Partition((1,))]), 1, QQ)
    assert u.dim == 2
    assert not u.space.forms[0].canonical.is_zero()
    u2 = universal_lambda_space(T2, 1, F3)
    assert u2.dim == 4
    u3 = universal_lambda_space(PartitionTuple([Partition((2,)), Partition((2,))]), 1, F3)
    assert u3.dim == 8
    assert u3.space.tuple == PartitionTuple([Partition((2,)), Partition((2,))])


def test_universal_lambda_rejects_impure():
    with pytest.raises(DimensionError):
        universal_lambda_space(PartitionTuple([Partition(), Partition((2,))]), 1, QQ)


def test_embed_finite_space_zero_dim():
    z = LambdaSpace.from_raw_forms(QQ, 0, T2, [MultiForm.zero(QQ, 0, 2)], project=False)
    u = universal_lambda_space(T2, 1, QQ)
    emb = embed_finite_space(z, u)
    assert emb.matrix.cols == 0


def test_embed_finite_space_exhaustive_f3_quadratic():
    u = universal_lambda_space(T2, 1, F3)
    count = 0
    for s in enumerate_lambda_structures(T2, 1, F3):
        embed_finite_space(s, u)
        count += 1
    assert count == 3


def test_embed_hyperbolic_plane():
    from tensorspaces.homogeneity import hyperbolic_space

    H = hyperbolic_space(1, QQ)
    u = universal_lambda_space(T2, 2, QQ)
    emb = embed_finite_space(H, u)
    assert emb.matrix.cols == 2


def test_embed_capacity_guard():
    rng = random.Random(21)
    w = random_lambda_space(T2, 2, QQ, rng)
    u = universal_lambda_space(T2, 1, QQ)
    with pytest.raises(DimensionError):
        embed_finite_space(w, u)


def test_embed_all_shapes_size_up_to_three():
    # every supported single-entry tuple with |shape| <= 3 over F_5, d <= 2
    from tensorspaces.partitions import partitions_up_to

    for lam in partitions_up_to(3):
        if lam.is_empty():
            continue
        tup = PartitionTuple([lam])
        univ = universal_lambda_space(tup, 2, F5)
        for d in (1, 2):
            count = 0
            for s in enumerate_lambda_structures(tup, d, F5):
                embed_finite_space(s, univ)
                count += 1
                if count >= 125:
                    break


def test_restriction_keeps_universality():
    # dropping tuple entries of a d-universal space keeps sub-tuple universality
    tup = PartitionTuple([Partition((2,)), Partition((2,))])
    u = universal_lambda_space(tup, 1, F3)
    from tensorspaces.forms import restrict_tuple

    restricted = restrict_tuple(u.space, [0])
    # every 1-dim [(2)]-space embeds into the restricted space via padding
    for s in enumerate_lambda_structures(T2, 1, F3):
        padded = pad_tuple(s, tup, [0])
        emb = embed_finite_space(padded, u)
        check = is_embedding(emb.matrix, s, restricted)
        assert check.ok


def test_recognize_universal():
    u = universal_lambda_space(T2, 2, F3)
    rec = recognize_universal(u.space)
    assert rec is not None and rec.d == 2
    # a perturbed space is not recognized
    rng = random.Random(22)
    other = random_lambda_space(T2, u.dim, F3, rng)
    assert recognize_universal(other) is None


def test_base_change_identity():
    rng = random.Random(23)
    s = random_lambda_space(T2, 2, F3, rng)
    assert base_change(s, F3, F3) == s


def test_base_change_evaluation_commutes():
    rng = random.Random(24)
    emb = field_embedding(F3, F9)
    s = random_lambda_space(T2, 2, F3, rng)
    s9 = base_change(s, F3, F9)
    for _ in range(10):
        vecs = [tuple(rng.randrange(3) for _ in range(2)) for _ in range(2)]
        val3 = s.forms[0].canonical.evaluate(vecs)
        vecs9 = [tuple(emb(x) for x in v) for v in vecs]
        assert s9.forms[0].canonical.evaluate(vecs9) == emb(val3)


def test_base_change_commutes_with_constructions():
    # the universal and relative-extension carriers have prime-field
    # coefficients, so transporting coefficients commutes with building
    from tensorspaces.shifting import relative_universal_extension

    u3 = universal_lambda_space(T2, 2, F3)
    u9 = universal_lambda_space(T2, 2, F9)
    assert base_change(u3.space, F3, F9) == u9.space
    rng = random.Random(25)
    X3 = random_lambda_space(T2, 2, F3, rng)
    X9 = base_change(X3, F3, F9)
    rel3 = relative_universal_extension(X3, 1)
    rel9 = relative_universal_extension(X9, 1)
    assert base_change(rel3.target, F3, F9) == rel9.target
    assert rel9.inclusion.matrix.data == tuple(
        tuple(F9.from_int(x) for x in row) for row in rel3.inclusion.matrix.data
    )


def test_base_change_universality_over_f9():
    u3 = universal_lambda_space(T2, 1, F3)
    u9 = base_change(u3.space, F3, F9)
    rec = recognize_universal(u9)
    assert rec is not None and rec.d == 1
    count = 0
    for s in enumerate_lambda_structures(T2, 1, F9):
        embed_finite_space(s, rec)
        count += 1
    assert count == 9
