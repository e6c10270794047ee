"""tsf: command-line surface over the library.

Exit status contract: 0 success or verdict reached, 1 invalid input,
2 capacity/budget exhausted (inconclusive).  Errors print a single
machine-parsable line on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import (
    BudgetError,
    CapacityError,
    CertificateError,
    DimensionError,
    FieldError,
    FormatError,
    TensorSpaceError,
)
from . import fileio
from .engine import LambdaInstance, build_tower
from .forms import (
    LinearEmbedding,
    count_lambda_structures,
    enumerate_lambda_structures,
    is_embedding,
)
from .homogeneity import (
    classifying_map,
    hyperbolic_space,
    oligomorphic_witness,
    orbit_test,
    witt_embed_quadratic,
    witt_extend,
)
from .partitions import PartitionTuple
from .universal import embed_finite_space, recognize_universal, universal_lambda_space


def _parse_vectors(text, field, dim):
    vectors = []
    for chunk in text.split(";"):
        coords = [field.parse_scalar(t.strip()) for t in chunk.split(",")]
        if len(coords) != dim:
            raise FormatError(
                f"vector {chunk!r} has {len(coords)} coordinates, expected {dim}"
            )
        vectors.append(tuple(coords))
    return vectors


def cmd_universal(args):
    field = fileio.parse_field_name(args.field)
    tup = PartitionTuple.parse(args.tuple)
    univ = universal_lambda_space(tup, args.d, field)
    fileio.check_dim_cap(univ.dim)
    fileio.save_space(univ.space, args.output)
    print(f"universal: wrote {args.output} (dim {univ.dim}, {args.d}-universal)")
    if args.verify_exhaustive:
        if not field.is_finite:
            raise FormatError("--verify-exhaustive requires a finite field")
        total = count_lambda_structures(tup, args.d, field)
        checked = 0
        for i, space in enumerate(enumerate_lambda_structures(tup, args.d, field)):
            if i % args.shards != args.shard_index:
                continue
            embed_finite_space(space, univ)  # raises on certificate failure
            checked += 1
        print(
            f"verify-exhaustive: {checked} of {total} structures embedded "
            f"(shard {args.shard_index}/{args.shards})"
        )
    return 0


def cmd_embed(args):
    src, _ = fileio.load_space(args.source)
    dst, _ = fileio.load_space(args.target)
    univ = recognize_universal(dst)
    if univ is None:
        raise FormatError(
            "target is not a canonical universal space file (produce it with "
            "'tsf universal')"
        )
    emb = embed_finite_space(src, univ)
    fileio.save_matrix(emb.matrix, args.output)
    check = is_embedding(emb.matrix, src, dst)
    print(f"embed: wrote {args.output}")
    print(f"certificate: injective={check.injective} pullback-exact={check.ok}")
    return 0


def cmd_shift(args):
    from .shifting import PinnedBase, shift_structure

    space, _ = fileio.load_space(args.space)
    F = space.field
    pin_idx = [int(t) - 1 for t in args.pins.split(",")]
    if any(not 0 <= i < space.dim for i in pin_idx):
        raise FormatError("pin index out of range")
    if len(set(pin_idx)) != len(pin_idx):
        raise FormatError("pin indices must be distinct")
    pins = [
        tuple(F.one() if i == j else F.zero() for i in range(space.dim))
        for j in pin_idx
    ]
    rest = [
        tuple(F.one() if i == j else F.zero() for i in range(space.dim))
        for j in range(space.dim)
        if j not in set(pin_idx)
    ]
    blocks = shift_structure(PinnedBase(space, pins, rest))
    fileio.save_blocks(blocks, args.output)
    print(f"shift: wrote {args.output} (base {blocks.base_dim}, free {blocks.free_dim})")
    return 0


def cmd_unshift(args):
    from .shifting import unshift

    base, _ = fileio.load_space(args.base)
    blocks = fileio.load_blocks(args.blocks)
    space, incl = unshift(base, blocks)
    fileio.check_dim_cap(space.dim)
    fileio.save_space(space, args.output)
    check = is_embedding(incl.matrix, base, space)
    print(f"unshift: wrote {args.output} (dim {space.dim})")
    print(f"certificate: base inclusion injective={check.injective} pullback-exact={check.ok}")
    return 0


def cmd_amalgamate(args):
    from .shifting import amalgamate

    X, _ = fileio.load_space(args.base)
    Y, _ = fileio.load_space(args.left)
    Z, _ = fileio.load_space(args.right)
    f = LinearEmbedding(X, Y, fileio.load_matrix(args.map_left))
    g = LinearEmbedding(X, Z, fileio.load_matrix(args.map_right))
    am = amalgamate(f, g)
    fileio.check_dim_cap(am.space.dim)
    prefix = args.output_prefix
    fileio.save_space(am.space, prefix + "_W.sp")
    fileio.save_matrix(am.leg_left.matrix, prefix + "_legY.mtx")
    fileio.save_matrix(am.leg_right.matrix, prefix + "_legZ.mtx")
    print(f"amalgamate: wrote {prefix}_W.sp (dim {am.space.dim})")
    cy = is_embedding(am.leg_left.matrix, Y, am.space)
    cz = is_embedding(am.leg_right.matrix, Z, am.space)
    square = am.leg_left.matrix.mul(f.matrix) == am.leg_right.matrix.mul(g.matrix)
    print(
        f"certificate: legs pullback-exact={cy.ok and cz.ok} square-commutes={square}"
    )
    return 0


def cmd_tower_build(args):
    field = fileio.parse_field_name(args.field)
    tup = PartitionTuple.parse(args.tuple)
    schedule = [int(t) for t in args.schedule.split(",")]
    inst = LambdaInstance(tup, field)
    tower = build_tower(inst, args.depth, schedule, lazy=args.lazy)
    for level in tower.levels:
        fileio.check_dim_cap(level.dim)
    fileio.save_tower(tower, args.directory)
    dims = ",".join(str(x.dim) for x in tower.levels)
    print(f"tower build: wrote {args.directory} (level dims {dims})")
    return 0


def cmd_tower_extend(args):
    tower = fileio.load_tower(args.directory)
    X, _ = fileio.load_space(args.base_space)
    Y, _ = fileio.load_space(args.ext_space)
    alpha = LinearEmbedding(
        X, tower.levels[args.level], fileio.load_matrix(args.alpha)
    )
    iota = LinearEmbedding(X, Y, fileio.load_matrix(args.iota))
    beta, n = tower.extend_embedding(args.level, alpha, iota)
    fileio.save_tower(tower, args.directory)
    out = args.output or os.path.join(args.directory, "last_beta.mtx")
    fileio.save_matrix(beta.matrix, out)
    check = is_embedding(beta.matrix, Y, tower.levels[n])
    triangle = beta.matrix.mul(iota.matrix) == tower.transition(
        args.level, n
    ).matrix.mul(alpha.matrix)
    print(f"tower extend: resolved into level {n + 1}; wrote {out}")
    print(
        f"certificate: pullback-exact={check.ok} triangle-commutes={triangle}"
    )
    return 0


def cmd_tower_replay(args):
    tower = fileio.load_tower(args.directory)
    count = tower.replay()
    print(f"tower replay: {count} logged requests verified")
    return 0


def cmd_pi(args):
    space, _ = fileio.load_space(args.space)
    vectors = _parse_vectors(args.tuple, space.field, space.dim)
    point = classifying_map(space, vectors)
    text = fileio.dump_point(point, space.field)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"pi: wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_orbit(args):
    tower = fileio.load_tower(args.directory)
    F = tower.instance.field
    lv, lw = args.level_v, args.level_w
    vs = _parse_vectors(args.v, F, tower.levels[lv].dim)
    ws = _parse_vectors(args.w, F, tower.levels[lw].dim)
    result = orbit_test(tower, lv, vs, lw, ws, args.budget)
    if result.verdict == "distinct-orbits":
        idx, key = result.witness
        pretty = "(" + ",".join(str(i + 1) for i in key) + ")"
        print(f"distinct-orbits: entry (form {idx}, {pretty})")
        return 0
    if result.verdict == "equal-orbit":
        frag = result.fragment
        fileio.save_tower(tower, args.directory)
        print(
            f"equal-orbit: fragment levels {frag.src_fwd + 1}->{frag.dst_fwd + 1} "
            f"and {frag.src_bwd + 1}->{frag.dst_bwd + 1}"
        )
        return 0
    print(f"inconclusive: {result.detail}")
    return 2


def cmd_witness(args):
    tower = fileio.load_tower(args.directory)
    F = tower.instance.field
    vectors = _parse_vectors(args.vectors, F, tower.levels[args.level].dim)
    wit = oligomorphic_witness(tower, args.level, vectors, args.bound)
    fileio.save_tower(tower, args.directory)
    print(
        f"witness: absorber at level {wit.absorber_level + 1}, fragment "
        f"{wit.src_level + 1}->{wit.dst_level + 1} certified"
    )
    return 0


def cmd_witt_embed(args):
    space, _ = fileio.load_space(args.space)
    emb = witt_embed_quadratic(space)
    fileio.save_matrix(emb.matrix, args.output)
    check = is_embedding(emb.matrix, space, emb.target)
    print(f"witt embed: wrote {args.output} (into H^{space.dim})")
    print(f"certificate: injective={check.injective} pullback-exact={check.ok}")
    return 0


def cmd_witt_extend(args):
    field = fileio.parse_field_name(args.field)
    W = fileio.load_matrix(args.left)
    Wp = fileio.load_matrix(args.right)
    if W.rows != 2 * args.n or Wp.rows != 2 * args.n or W.cols != Wp.cols:
        raise FormatError("subspace matrices must be 2n x k with equal k")
    g = witt_extend(args.n, field, W.columns(), Wp.columns())
    fileio.save_matrix(g, args.output)
    H = hyperbolic_space(args.n, field)
    check = is_embedding(g, H, H)
    print(f"witt extend: wrote {args.output} (isometry of H^{args.n})")
    print(
        f"certificate: invertible={g.inverse() is not None} "
        f"form-preserving={check.ok}"
    )
    return 0


def cmd_check(args):
    space, projected = fileio.load_space(args.space)
    roundtrip = fileio.dump_space(space)
    reparsed, _ = fileio.parse_space(roundtrip)
    if reparsed != space:
        raise CertificateError("canonical round-trip mismatch")
    note = f"; loader projected forms {projected}" if projected else ""
    print(f"check: {args.space} valid (dim {space.dim}, tuple {space.tuple.format()}){note}")
    if args.embedding:
        if not args.into:
            raise FormatError("--embedding requires --into TARGET.sp")
        target, _ = fileio.load_space(args.into)
        matrix = fileio.load_matrix(args.embedding)
        result = is_embedding(matrix, space, target)
        if not result.ok:
            raise CertificateError(f"embedding certificate failed: {result.reason}")
        print(f"check: embedding certificate re-verified ({args.embedding})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tsf", description="exact tensor-space computations"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("universal", help="write a d-universal space file")
    p.add_argument("tuple")
    p.add_argument("d", type=int)
    p.add_argument("--field", default="Q")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--verify-exhaustive", action="store_true")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--shard-index", type=int, default=0)
    p.set_defaults(func=cmd_universal)

    p = sub.add_parser("embed", help="embed a space into a universal space file")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("shift", help="block structure of a pinned space")
    p.add_argument("space")
    p.add_argument("--pins", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("unshift", help="reassemble an ambient space from blocks")
    p.add_argument("base")
    p.add_argument("blocks")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_unshift)

    p = sub.add_parser("amalgamate", help="amalgamate two extensions of a base")
    p.add_argument("base")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--map-left", required=True)
    p.add_argument("--map-right", required=True)
    p.add_argument("-o", "--output-prefix", required=True)
    p.set_defaults(func=cmd_amalgamate)

    tower = sub.add_parser("tower", help="tower operations")
    tsub = tower.add_subparsers(dest="tower_command", required=True)

    p = tsub.add_parser("build")
    p.add_argument("tuple")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--field", default="Q")
    p.add_argument("--lazy", action="store_true")
    p.add_argument("-o", "--directory", required=True)
    p.set_defaults(func=cmd_tower_build)

    p = tsub.add_parser("extend")
    p.add_argument("directory")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--base-space", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--ext-space", required=True)
    p.add_argument("--iota", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tower_extend)

    p = tsub.add_parser("replay")
    p.add_argument("directory")
    p.set_defaults(func=cmd_tower_replay)

    p = sub.add_parser("pi", help="classifying map of a tuple")
    p.add_argument("space")
    p.add_argument("--tuple", required=True, dest="tuple")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pi)

    p = sub.add_parser("orbit", help="orbit test for two tuples in a tower")
    p.add_argument("directory")
    p.add_argument("--level-v", type=int, default=0)
    p.add_argument("--v", required=True)
    p.add_argument("--level-w", type=int, default=0)
    p.add_argument("--w", required=True)
    p.add_argument("--budget", type=int, default=2)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("witness", help="oligomorphic witness for a subspace")
    p.add_argument("directory")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_witness)

    witt = sub.add_parser("witt", help="quadratic Witt oracle")
    wsub = witt.add_subparsers(dest="witt_command", required=True)

    p = wsub.add_parser("embed")
    p.add_argument("space")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_witt_embed)

    p = wsub.add_parser("extend")
    p.add_argument("n", type=int)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--field", default="Q")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_witt_extend)

    p = sub.add_parser("check", help="validate a space file; optionally an embedding")
    p.add_argument("space")
    p.add_argument("--embedding", help="matrix file to re-verify as a certificate")
    p.add_argument("--into", help="target space of the embedding")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, BudgetError) as exc:
        print(f"error: capacity-exhausted: {exc}", file=sys.stderr)
        return 2
    except (
        FormatError,
        FieldError,
        DimensionError,
        CertificateError,
        TensorSpaceError,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
