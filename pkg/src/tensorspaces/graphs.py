"""Finite-graph fixture for the engine: induced embeddings, disjoint amalgams.

A deliberately different category exercising the exact same tower code
paths: universal objects are disjoint unions of all labeled graphs on a
vertex bound, relative extensions attach one fresh copy per extension
pattern with no cross edges, amalgamation is disjoint union over the base.
Absorbing every one-point extension is the Rado pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .engine import AmalgamationInstance
from .errors import CapacityError, CertificateError, DimensionError
from .shifting import Amalgam


@dataclass(frozen=True)
class FiniteGraph:
    n: int
    edges: frozenset  # of 2-tuples (i, j), i < j

    def __init__(self, n, edges=()):
        norm = set()
        for e in edges:
            i, j = sorted(e)
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise DimensionError(f"bad edge {e}")
            norm.add((i, j))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))

    def has_edge(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def induced(self, vertices):
        vertices = list(vertices)
        idx = {v: k for k, v in enumerate(vertices)}
        edges = {
            (idx[i], idx[j])
            for (i, j) in self.edges
            if i in idx and j in idx
        }
        return FiniteGraph(len(vertices), edges)


@dataclass(frozen=True)
class GraphEmbedding:
    """Injective vertex map preserving adjacency and non-adjacency."""

    source: FiniteGraph
    target: FiniteGraph
    mapping: tuple

    def __init__(self, source, target, mapping):
        mapping = tuple(mapping)
        if len(mapping) != source.n:
            raise DimensionError("mapping length mismatch")
        if len(set(mapping)) != len(mapping):
            raise CertificateError("graph embedding not injective")
        if any(not 0 <= v < target.n for v in mapping):
            raise DimensionError("mapping out of range")
        for i in range(source.n):
            for j in range(i + 1, source.n):
                if source.has_edge(i, j) != target.has_edge(mapping[i], mapping[j]):
                    raise CertificateError("graph embedding not induced")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "mapping", mapping)

    def compose(self, other):
        if other.target != self.source:
            raise DimensionError("composition endpoints do not match")
        return GraphEmbedding(
            other.source, self.target, tuple(self.mapping[v] for v in other.mapping)
        )


def all_labeled_graphs(n):
    pairs = list(combinations(range(n), 2))
    out = []
    for bits in product((0, 1), repeat=len(pairs)):
        out.append(FiniteGraph(n, {p for p, b in zip(pairs, bits) if b}))
    return out


def _extension_patterns(base_n, c):
    """All ways to attach c new vertices: (new-new edges, adjacency to base)."""
    newpairs = list(combinations(range(c), 2))
    patterns = []
    for bits in product((0, 1), repeat=len(newpairs)):
        inner = frozenset(p for p, b in zip(newpairs, bits) if b)
        for adj in product(*[product((0, 1), repeat=base_n) for _ in range(c)]):
            patterns.append((inner, tuple(tuple(a) for a in adj)))
    return patterns


def _extension_pattern_of(ext):
    """Pattern of an extension morphism: base -> Y, complement in vertex order."""
    Y = ext.target
    image = set(ext.mapping)
    new = [v for v in range(Y.n) if v not in image]
    c = len(new)
    inner = frozenset(
        (a, b)
        for a, b in combinations(range(c), 2)
        if Y.has_edge(new[a], new[b])
    )
    adj = tuple(
        tuple(1 if Y.has_edge(new[t], ext.mapping[i]) else 0 for i in range(ext.source.n))
        for t in range(c)
    )
    return new, inner, adj


@dataclass
class GraphRelativeExtension:
    base: FiniteGraph
    bound: int
    target: FiniteGraph
    inclusion: GraphEmbedding
    copy_offsets: dict  # (c, inner, adj) -> first vertex of that copy


class GraphInstance(AmalgamationInstance):
    """Induced-subgraph embedding category; amalgams add no cross edges."""

    def initial(self):
        return FiniteGraph(0)

    def size(self, obj):
        return obj.n

    def objects_equal(self, a, b):
        return a == b

    def universal(self, bound):
        graphs = all_labeled_graphs(bound)
        total = 0
        edges = set()
        for g in graphs:
            for i, j in g.edges:
                edges.add((total + i, total + j))
            total += g.n
        return FiniteGraph(total, edges)

    def relative_extension(self, obj, bound):
        n = obj.n
        edges = set(obj.edges)
        offsets = {}
        total = n
        for c in range(1, bound + 1):
            for inner, adj in _extension_patterns(n, c):
                offsets[(c, inner, adj)] = total
                for a, b in inner:
                    edges.add((total + a, total + b))
                for t in range(c):
                    for i in range(n):
                        if adj[t][i]:
                            edges.add(tuple(sorted((total + t, i))))
                total += c
        target = FiniteGraph(total, edges)
        incl = GraphEmbedding(obj, target, tuple(range(n)))
        return GraphRelativeExtension(obj, bound, target, incl, offsets)

    def embed_over_base(self, ext, relext):
        if ext.source != relext.base:
            raise DimensionError("extension is not over the relative base")
        new, inner, adj = _extension_pattern_of(ext)
        c = len(new)
        if c > relext.bound:
            raise CapacityError(f"extension adds {c} vertices, bound {relext.bound}")
        if c == 0:
            mapping = [0] * ext.target.n
            for i, v in enumerate(ext.mapping):
                mapping[v] = relext.inclusion.mapping[i]
            return GraphEmbedding(ext.target, relext.target, mapping)
        # the base image must be the standard one for copy lookup
        base_map = tuple(ext.mapping)
        adj_std = adj
        key = (c, inner, adj_std)
        if key not in relext.copy_offsets:
            raise CertificateError("extension pattern missing from the carrier")
        off = relext.copy_offsets[key]
        mapping = [0] * ext.target.n
        for i, v in enumerate(base_map):
            mapping[v] = i
        for t, v in enumerate(new):
            mapping[v] = off + t
        return GraphEmbedding(ext.target, relext.target, mapping)

    def amalgamate(self, f, g):
        X = f.source
        if g.source != X:
            raise DimensionError("no common source")
        newY = [v for v in range(f.target.n) if v not in set(f.mapping)]
        newZ = [v for v in range(g.target.n) if v not in set(g.mapping)]
        n = X.n
        total = n + len(newY) + len(newZ)
        posY = {v: n + i for i, v in enumerate(newY)}
        posZ = {v: n + len(newY) + i for i, v in enumerate(newZ)}
        mapY = [0] * f.target.n
        for i, v in enumerate(f.mapping):
            mapY[v] = i
        for v in newY:
            mapY[v] = posY[v]
        mapZ = [0] * g.target.n
        for i, v in enumerate(g.mapping):
            mapZ[v] = i
        for v in newZ:
            mapZ[v] = posZ[v]
        edges = set()
        for a, b in f.target.edges:
            edges.add(tuple(sorted((mapY[a], mapY[b]))))
        for a, b in g.target.edges:
            edges.add(tuple(sorted((mapZ[a], mapZ[b]))))
        W = FiniteGraph(total, edges)
        y = GraphEmbedding(f.target, W, mapY)
        z = GraphEmbedding(g.target, W, mapZ)
        if y.compose(f).mapping != z.compose(g).mapping:
            raise CertificateError("amalgamation square does not commute")
        return Amalgam(W, y, z)

    def split_extension(self, incl, k):
        A, Z = incl.source, incl.target
        image = set(incl.mapping)
        extra = [v for v in range(Z.n) if v not in image][:k]
        vertices = list(incl.mapping) + extra
        mid = Z.induced(vertices)
        a = GraphEmbedding(A, mid, tuple(range(A.n)))
        m = GraphEmbedding(mid, Z, tuple(vertices))
        return mid, a, m

    def compose(self, f, g):
        return f.compose(g)

    def identity(self, obj):
        return GraphEmbedding(obj, obj, tuple(range(obj.n)))

    def from_initial(self, obj):
        return GraphEmbedding(FiniteGraph(0), obj, ())

    def invert_iso(self, m):
        if m.source.n != m.target.n:
            raise CertificateError("not an isomorphism")
        inv = [0] * m.source.n
        for i, v in enumerate(m.mapping):
            inv[v] = i
        return GraphEmbedding(m.target, m.source, inv)

    def morphism_source(self, m):
        return m.source

    def morphism_target(self, m):
        return m.target

    def morphisms_equal(self, a, b):
        return (
            a.source == b.source
            and a.target == b.target
            and a.mapping == b.mapping
        )

    def check_embedding(self, m):
        try:
            GraphEmbedding(m.source, m.target, m.mapping)
        except (CertificateError, DimensionError):
            return False
        return True
