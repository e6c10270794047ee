"""Acceptance suite: one test per criterion, exact (zero-tolerance) checks.

Each test prints a single PASS line when its criterion holds.  Positive
characteristic must exceed every partition size in play, so the cubic runs
use F_5 as the smallest admissible prime field (F_3 would make the Young
projector divide by 3! = 6, which vanishes).
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
from tensorspaces.fields import GF, QQ, PrimeField
from tensorspaces.forms import (
    LambdaSpace,
    LinearEmbedding,
    MultiForm,
    decompose_form,
    enumerate_lambda_structures,
    random_lambda_space,
    random_multiform,
    reassemble,
    young_projector_apply,
)
from tensorspaces.graphs import FiniteGraph, GraphEmbedding, GraphInstance
from tensorspaces.homogeneity import (
    HyperbolicInstance,
    classifying_map,
    orbit_test,
    span_embedding,
    witt_extend,
)
from tensorspaces.linalg import Matrix
from tensorspaces.partitions import (
    Partition,
    PartitionTuple,
    partitions_of,
    shift_tuple,
)
from tensorspaces.shifting import (
    PinnedBase,
    amalgamate,
    blocks_dimension_check,
    embed_over_base,
    pinned_span_space,
    relative_universal_extension,
    shift_structure,
    unshift,
)
from tensorspaces.universal import (
    base_change,
    embed_finite_space,
    embed_into_universal_nform,
    recognize_universal,
    universal_lambda_space,
    universal_nform,
    verify_nform_embedding,
)

F3, F5 = PrimeField(3), PrimeField(5)
F9 = GF(9)
T2 = PartitionTuple([Partition((2,))])
T3 = PartitionTuple([Partition((3,))])
T22 = PartitionTuple([Partition((2,)), Partition((2,))])


def _all_forms(field, dim, arity):
    keys = list(itertools.product(range(dim), repeat=arity))
    for values in itertools.product(range(field.order), repeat=len(keys)):
        yield MultiForm(
            field, dim, arity, {k: v for k, v in zip(keys, values) if v}
        )


def test_criterion_01_form_calculus_bijection():
    checked = 0
    # exhaustive over F_3 at n <= 2 (characteristic allows n! inversion)
    for n in (1, 2):
        for d in (1, 2):
            for w in _all_forms(F3, d, n):
                assert reassemble(decompose_form(w), F3, d, n) == w
                checked += 1
    # n = 3 needs p > 3: sample 1000 of the 5^8 forms over F_5
    rng = random.Random(100)
    for _ in range(1000):
        w = random_multiform(F5, 2, 3, rng)
        assert reassemble(decompose_form(w), F5, 2, 3) == w
        checked += 1
    # 200 random rational forms
    for _ in range(200):
        n = rng.choice([1, 2, 3])
        w = random_multiform(QQ, 2, n, rng)
        assert reassemble(decompose_form(w), QQ, 2, n) == w
        checked += 1
    # projector idempotency for every |lambda| <= 4
    idem = 0
    for n in range(1, 5):
        for lam in partitions_of(n):
            for field in (QQ, F5):
                w = random_multiform(field, 2, n, rng)
                p = young_projector_apply(w, lam)
                assert young_projector_apply(p, lam) == p
                idem += 1
    print(
        f"ACCEPTANCE 1 PASS: decompose/reassemble identity on {checked} forms, "
        f"projector idempotency on {idem} shape/field samples"
    )


def test_criterion_02_universal_nform_embeddings():
    rng = random.Random(101)
    certified = 0
    for field in (F3, F5):
        for n in (2, 3):
            for d in (1, 2):
                u = universal_nform(n, d**n + d, field)
                space_size = field.order ** (d**n)
                if space_size <= 5**4:
                    targets = _all_forms(field, d, n)
                else:
                    targets = (
                        random_multiform(field, d, n, rng) for _ in range(500)
                    )
                for eta in targets:
                    m = embed_into_universal_nform(eta, u)
                    verify_nform_embedding(eta, u, m)
                    certified += 1
    for n in (2, 3):
        for d in (1, 2):
            u = universal_nform(n, d**n + d, QQ)
            for _ in range(200):
                eta = random_multiform(QQ, d, n, rng)
                m = embed_into_universal_nform(eta, u)
                verify_nform_embedding(eta, u, m)
                certified += 1
    print(f"ACCEPTANCE 2 PASS: {certified} certified universal n-form embeddings")


def test_criterion_03_d_universality_assembled():
    rng = random.Random(102)
    certified = 0
    cases = [(T2, F3), (T3, F5), (T22, F3)]
    for tup, field in cases:
        for d in (1, 2):
            univ = universal_lambda_space(tup, 2, field)
            structures = list(enumerate_lambda_structures(tup, d, field))
            if len(structures) > 3**4:
                structures = rng.sample(structures, 200)
            for s in structures:
                embed_finite_space(s, univ)  # certificate-validating
                certified += 1
    print(
        f"ACCEPTANCE 3 PASS: {certified} certified embeddings into assembled "
        f"2-universal spaces for [(2)]@F3, [(3)]@F5, [(2),(2)]@F3"
    )


def test_criterion_04_shift_consistency():
    rng = random.Random(103)
    cases = [(T2, F3), (T2, QQ), (T3, F5), (T3, QQ), (T22, F3)]
    roundtrips = 0
    while roundtrips < 500:
        tup, field = cases[roundtrips % len(cases)]
        dim = rng.randint(1, 3)
        npins = rng.randint(0, dim)
        v = random_lambda_space(tup, dim, field, rng)
        basis = [
            tuple(field.one() if i == j else field.zero() for i in range(dim))
            for j in range(dim)
        ]
        pb = PinnedBase(v, basis[:npins], basis[npins:])
        bs = shift_structure(pb)
        base, _ = pinned_span_space(pb)
        rebuilt, _ = unshift(base, bs)
        assert rebuilt == v  # standard-basis pinning: literal equality
        roundtrips += 1
    # dimension bookkeeping against the shift tuple
    shapes = [lam for n in (1, 2, 3) for lam in partitions_of(n)]
    tuples = [PartitionTuple([lam]) for lam in shapes]
    tuples += [T22, PartitionTuple([Partition((2,)), Partition((1, 1))])]
    checks = 0
    for tup in tuples:
        for n in (0, 1, 2):
            for dprime in (0, 1, 2, 3):
                assert blocks_dimension_check(tup, n, dprime), (tup, n, dprime)
                checks += 1
    # the displayed shift of a single quadratic entry
    for n in range(1, 5):
        full, _ = shift_tuple(T2, n)
        assert full[Partition()] == n * (n + 1) // 2
        assert full[Partition((1,))] == n
        assert full[Partition((2,))] == 1
    print(
        f"ACCEPTANCE 4 PASS: 500 shift/unshift roundtrips exact, "
        f"{checks} block-dimension checks match the shift tuple"
    )


def test_criterion_05_relative_universality_and_amalgamation():
    # every 2-dim extension of every 1-dim quadratic base over F_3 embeds
    embedded = 0
    for base in enumerate_lambda_structures(T2, 1, F3):
        rel = relative_universal_extension(base, 1)
        cval = base.forms[0].canonical.entries.get((0, 0), 0)
        for b in range(3):
            for a in range(3):
                entries = {}
                if cval:
                    entries[(0, 0)] = cval
                if b:
                    entries[(0, 1)] = b
                    entries[(1, 0)] = b
                if a:
                    entries[(1, 1)] = a
                Y = LambdaSpace.from_raw_forms(
                    F3, 2, T2, [MultiForm(F3, 2, 2, entries)], project=False
                )
                ext = LinearEmbedding(base, Y, Matrix(F3, [[1], [0]]))
                beta = embed_over_base(ext, rel)
                assert beta.matrix.mul(ext.matrix) == rel.inclusion.matrix
                embedded += 1
    assert embedded == 27
    # 200 random amalgamation squares commute with exact pullbacks
    rng = random.Random(104)
    squares = 0
    tuples = [T2, T3, T22]
    while squares < 200:
        tup = tuples[squares % len(tuples)]
        field = F5 if tup is T3 else F3
        dim_x = rng.randint(0, 2)
        y = _random_extension_of(None, tup, field, dim_x, rng.randint(0, 2), rng)
        x = _restrict_to_first(y, dim_x)
        z = _random_extension_of(x, tup, field, dim_x, rng.randint(0, 2), rng)
        f = _inclusion_embedding(x, y)
        g = _inclusion_embedding(x, z)
        am = amalgamate(f, g)
        assert am.leg_left.matrix.mul(f.matrix) == am.leg_right.matrix.mul(g.matrix)
        squares += 1
    print(
        "ACCEPTANCE 5 PASS: 27/27 bounded extensions embed over their base; "
        "200 amalgamation squares commute exactly"
    )


def _random_extension_of(x, tup, field, dim_x, extra, rng):
    dim = dim_x + extra
    s = random_lambda_space(tup, dim, field, rng)
    if x is None or dim_x == 0:
        return s
    # patch the leading block to agree with x
    incl = Matrix(
        field,
        [[field.one() if i == j else field.zero() for j in range(dim_x)] for i in range(dim)],
    )
    patched = []
    for lam, sf, xf in zip(tup, s.forms, x.forms):
        res = sf.canonical.pullback(incl)
        diff = xf.canonical.sub(res)
        pad = MultiForm(field, dim, lam.size, dict(diff.entries))
        patched.append(young_projector_apply(sf.canonical.add(pad), lam))
    return LambdaSpace.from_raw_forms(field, dim, tup, patched, project=False)


def _restrict_to_first(space, k):
    field = space.field
    incl = Matrix(
        field,
        [[field.one() if i == j else field.zero() for j in range(k)] for i in range(space.dim)],
    )
    forms = [f.canonical.pullback(incl) for f in space.forms]
    return LambdaSpace.from_raw_forms(field, k, space.tuple, forms, project=False)


def _inclusion_embedding(x, y):
    field = x.field
    m = Matrix(
        field,
        [[field.one() if i == j else field.zero() for j in range(x.dim)] for i in range(y.dim)],
    )
    return LinearEmbedding(x, y, m)


def _pi_type_lines(level, field):
    """One vector per classifying-point value among the lines of a level."""
    reps = {}
    form = level.forms[0].canonical
    arity = form.arity
    for v in itertools.product(range(field.order), repeat=level.dim):
        if not any(v):
            continue
        vec = tuple(field.from_int(c) if isinstance(c, int) else c for c in v)
        val = form.evaluate([vec] * arity)
        if val not in reps:
            reps[val] = vec
    return reps


def _exhaustive_line_requests(tower, inst, field):
    """Serve every one-dimensional extension request over a finite field."""
    tup = inst.tuple
    arity = tup[0].size
    served = 0
    # extensions of the zero base: every 1-dim structure
    for s in enumerate_lambda_structures(tup, 1, field):
        tower.extend_embedding(
            0, inst.from_initial(tower.levels[0]), inst.from_initial(s)
        )
        served += 1
    # extensions of each line type sitting in level 1
    reps = _pi_type_lines(tower.levels[0], field)
    for val, vec in sorted(reps.items()):
        alpha = span_embedding(tower.levels[0], [vec])
        X = alpha.source
        for ext_space in _line_extensions(X, tup, field):
            iota = LinearEmbedding(
                X, ext_space, Matrix(field, [[field.one()], [field.zero()]])
            )
            tower.extend_embedding(0, alpha, iota)
            served += 1
    return served


def _line_extensions(X, tup, field):
    """All structures on k^2 extending the 1-dim structure X."""
    arity = tup[0].size
    base_entries = X.forms[0].canonical.entries
    free_keys = sorted(
        {tuple(sorted(k)) for k in itertools.product(range(2), repeat=arity)}
        - {(0,) * arity}
    )
    for values in itertools.product(range(field.order), repeat=len(free_keys)):
        entries = dict(base_entries)
        for key_class, v in zip(free_keys, values):
            if not v:
                continue
            val = field.from_int(v)
            for key in set(itertools.permutations(key_class)):
                entries[key] = val
        raw = MultiForm(field, 2, arity, entries)
        projected = young_projector_apply(raw, tup[0])
        if projected.pullback(Matrix(field, [[field.one()], [field.zero()]])) != X.forms[0].canonical:
            continue
        yield LambdaSpace.from_raw_forms(field, 2, tup, [projected], project=False)


@pytest.mark.parametrize(
    "tup,finite_field",
    [(T2, F3), (T3, F5)],
    ids=["quadratic", "cubic"],
)
def test_criterion_06_tower_f_injectivity(tup, finite_field):
    rng = random.Random(105)
    # finite-field tower: exhaustive one-dimensional extension requests
    inst = LambdaInstance(tup, finite_field)
    tower = build_tower(inst, 3, [1, 2, 3])
    served = _exhaustive_line_requests(tower, inst, finite_field)
    assert tower.replay() == served
    # rational tower: sampled requests
    instq = LambdaInstance(tup, QQ)
    towerq = build_tower(instq, 3, [1, 2, 3])
    for _ in range(10):
        s = random_lambda_space(tup, 1, QQ, rng)
        towerq.extend_embedding(
            0, instq.from_initial(towerq.levels[0]), instq.from_initial(s)
        )
    assert towerq.replay() == 10
    print(
        f"ACCEPTANCE 6 PASS ({tup.format()}): {served} exhaustive requests over "
        f"{finite_field!r} replay; 10 sampled rational requests replay; "
        f"tower dims {[l.dim for l in tower.levels]}"
    )


def test_criterion_07_uniqueness_shadow():
    rng = random.Random(106)
    instq = LambdaInstance(T2, QQ)
    ta = build_tower(instq, 3, [1, 2, 3], lazy=True)
    tb = build_tower(instq, 3, [1, 2, 3], lazy=True)
    r1 = back_and_forth(ta, tb, empty_seed(ta, tb), 2)
    r2 = back_and_forth(tb, ta, empty_seed(tb, ta), 2)
    assert r1.forward and r1.backward and r2.forward and r2.backward
    # composite of each pair agrees with a transition (verified inside), and
    # each tower's level 2 is certified-embedded into the other
    psi1, src1, dst1 = r1.backward[0]
    assert src1 >= 1  # covers at least tower B's level 2
    # built tower vs the explicit hyperbolic tower
    th = build_tower(HyperbolicInstance(QQ), 3, [1, 2, 3], lazy=True)
    r3 = back_and_forth(ta, th, empty_seed(ta, th), 2)
    r4 = back_and_forth(th, ta, empty_seed(th, ta), 2)
    assert r3.forward and r3.backward and r4.forward and r4.backward
    # Witt agreement on orbit queries in the hyperbolic tower
    agree = 0
    level = th.levels[1]  # H^(+)3 after lazy growth kept schedule; dim 6
    n_half = level.dim // 2
    form = level.forms[0].canonical
    queries = 0
    while queries < 100:
        v = tuple(Fraction(rng.randint(-2, 2)) for _ in range(level.dim))
        w = tuple(Fraction(rng.randint(-2, 2)) for _ in range(level.dim))
        if not any(v) or not any(w):
            continue
        queries += 1
        result = orbit_test(th, 1, [v], 1, [w], 4)
        witt_ok = True
        try:
            witt_extend(n_half, QQ, [v], [w])
        except CertificateError:
            witt_ok = False
        if result.verdict == "equal-orbit":
            assert witt_ok
        elif result.verdict == "distinct-orbits":
            assert not witt_ok
        else:
            raise AssertionError("orbit query inconclusive")
        agree += 1
    # exhaustive agreement over F_3 in H
    th3 = build_tower(HyperbolicInstance(F3), 3, [1, 2, 3], lazy=True)
    H = th3.levels[0]
    vectors = [v for v in itertools.product(range(3), repeat=2) if any(v)]
    exhaustive = 0
    for v in vectors:
        for w in vectors:
            result = orbit_test(th3, 0, [v], 0, [w], 4)
            witt_ok = True
            try:
                witt_extend(1, F3, [v], [w])
            except CertificateError:
                witt_ok = False
            assert (result.verdict == "equal-orbit") == witt_ok
            exhaustive += 1
    print(
        f"ACCEPTANCE 7 PASS: mutual tower embeddings certified both ways "
        f"(generic/generic and generic/hyperbolic); Witt agreement on "
        f"{agree} rational and {exhaustive} exhaustive F3 orbit queries"
    )


def test_criterion_08_classifying_map():
    inst = LambdaInstance(T2, F3)
    tower = build_tower(inst, 3, [1, 2, 3])
    # surjectivity: all 3 points of the 1-dimensional type space hit in level 2
    hit = {}
    for s in enumerate_lambda_structures(T2, 1, F3):
        beta, n = tower.extend_embedding(
            0, inst.from_initial(tower.levels[0]), inst.from_initial(s)
        )
        col = beta.matrix.column(0)
        target_level = 1  # level index of Omega_2
        eps = tower.transition(n, target_level) if n < target_level else None
        vec = col if n >= target_level else eps.matrix.apply(col)
        point = classifying_map(tower.levels[max(n, target_level)], [vec])
        val = point.forms[0].entries.get((0, 0), 0)
        hit[val] = True
    assert set(hit) == {0, 1, 2}
    # completeness: every pi-equal pair of lines in level 1 connects in budget 3
    lvl = tower.levels[0]
    form = lvl.forms[0].canonical
    classes = {}
    for v in itertools.product(range(3), repeat=lvl.dim):
        if any(v):
            classes.setdefault(form.evaluate([v, v]), []).append(v)
    assert sorted(len(c) for c in classes.values()) == [24, 24, 32]
    pairs = 0
    for cls in classes.values():
        for i in range(len(cls)):
            for j in range(i, len(cls)):
                r = orbit_test(tower, 0, [cls[i]], 0, [cls[j]], 3)
                assert r.verdict == "equal-orbit"
                pairs += 1
    # soundness: every logged fragment preserves pi on its domain lines
    checked = 0
    for req in tower.log[:200]:
        Y = req.iota.target
        target = tower.levels[req.target_level]
        for idx in range(Y.dim):
            e = tuple(
                Y.field.one() if i == idx else Y.field.zero() for i in range(Y.dim)
            )
            p1 = classifying_map(Y, [e])
            p2 = classifying_map(target, [req.beta.matrix.apply(e)])
            assert p1 == p2
            checked += 1
    print(
        f"ACCEPTANCE 8 PASS: type space surjectivity 3/3 in level 2; "
        f"{pairs} pi-equal line pairs connected within budget 3; "
        f"pi preserved on {checked} logged-fragment lines"
    )


def test_criterion_09_base_change():
    u3 = universal_lambda_space(T2, 1, F3)
    moved = base_change(u3.space, F3, F9)
    rec = recognize_universal(moved)
    assert rec is not None and rec.d == 1
    count = 0
    for s in enumerate_lambda_structures(T2, 1, F9):
        embed_finite_space(s, rec)
        count += 1
    assert count == 9
    print(
        "ACCEPTANCE 9 PASS: base-changed universal quadratic space absorbs "
        "all 9 one-dimensional structures over F9 with certificates"
    )


def test_criterion_10_engine_genericity_graphs():
    gi = GraphInstance()
    t = build_tower(gi, 3, [1, 1, 1])
    lvl = t.levels[1]
    served = 0
    for size in range(lvl.n + 1):
        for sub in itertools.combinations(range(lvl.n), size):
            X = lvl.induced(sub)
            alpha = GraphEmbedding(X, lvl, sub)
            for bits in itertools.product((0, 1), repeat=size):
                edges = set(X.edges) | {(i, size) for i in range(size) if bits[i]}
                Y = FiniteGraph(size + 1, edges)
                iota = GraphEmbedding(X, Y, tuple(range(size)))
                beta, n = t.extend_embedding(1, alpha, iota)
                new_vertex = beta.mapping[size]
                for i in range(size):
                    assert bool(bits[i]) == t.levels[n].has_edge(
                        beta.mapping[i], new_vertex
                    )
                served += 1
    assert t.replay() == served
    print(
        f"ACCEPTANCE 10 PASS: graph fixture tower (sizes "
        f"{[l.n for l in t.levels]}) served {served} one-point extensions "
        f"through the generic engine, all replayed"
    )
