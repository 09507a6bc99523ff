"""
Decorated marked trees: stability, canonical keys, enumeration and edge contraction.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import networkx as nx
from networkx.utils import UnionFind
from sympy.utilities.iterables import multiset_permutations

from .nodalcoh import DegreeTree
from .toricfan import CurveClass, effective_decompositions

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    MAPS = "maps"
    QUASIMAPS = "quasimaps"


@dataclass(frozen=True)
class DecoratedTree:
    """
    A tree with a curve class on every vertex and n labelled marks.

    :param classes: The class of each vertex.
    :param edges: Vertex index pairs.
    :param marks: marks[i] is the vertex carrying mark i + 1.
    :param beta: If given, the vertex classes must sum to it.
    """
    classes: tuple
    edges: tuple = ()
    marks: tuple = ()
    beta: CurveClass = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "edges", tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges))
        object.__setattr__(self, "marks", tuple(int(v) for v in self.marks))
        if not self.classes:
            raise ValueError("a decorated tree needs at least one vertex")
        if len({len(c) for c in self.classes}) != 1:
            raise ValueError("vertex classes have different lengths")
        size = len(self.classes)
        if any(not 0 <= v < size for v in self.marks):
            raise ValueError("a mark sits on a missing vertex")
        graph = nx.Graph()
        graph.add_nodes_from(range(size))
        graph.add_edges_from(self.edges)
        if len(graph) != size or len(self.edges) != size - 1 or not nx.is_tree(graph):
            raise ValueError("edges do not form a tree on the vertices")
        if self.beta is not None and self.class_sum != self.beta:
            raise ValueError(f"vertex classes sum to {self.class_sum.coords}, expected {self.beta.coords}")

    @property
    def n(self):
        return len(self.marks)

    @property
    def num_vertices(self):
        return len(self.classes)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def class_sum(self):
        total = self.classes[0]
        for cls in self.classes[1:]:
            total = total + cls
        return total

    @cached_property
    def valence(self):
        counts = [0] * self.num_vertices
        for a, b in self.edges:
            counts[a] += 1
            counts[b] += 1
        return tuple(counts)

    @cached_property
    def marks_at(self):
        """
        Sorted 1-based mark indices per vertex.
        """
        placed = [[] for _ in range(self.num_vertices)]
        for index, vertex in enumerate(self.marks, start=1):
            placed[vertex].append(index)
        return tuple(tuple(m) for m in placed)

    @cached_property
    def adjacency(self):
        adj = [[] for _ in range(self.num_vertices)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(a) for a in adj)

    def degree_tree(self, degrees):
        return DegreeTree(tuple(degrees), self.edges)

    def to_dict(self):
        return {
            "classes": [list(c.coords) for c in self.classes],
            "edges": [list(e) for e in self.edges],
            "marks": list(self.marks),
        }

    @classmethod
    def from_dict(cls, data, beta=None):
        classes = tuple(CurveClass(tuple(c)) for c in data["classes"])
        return cls(classes, tuple(tuple(e) for e in data["edges"]), tuple(data.get("marks", ())), beta)


def _deficit(is_zero, valence, mode, single):
    """
    Marks a vertex still needs to be stable.
    """
    need = 3 if is_zero else 2 if mode == Mode.QUASIMAPS and not single else 0
    return max(0, need - valence)


def _stable(classes, valence, mark_counts, mode):
    single = len(classes) == 1
    return all(
        marks >= _deficit(cls.is_zero, val, mode, single)
        for cls, val, marks in zip(classes, valence, mark_counts)
    )


def is_stable(t, mode):
    """
    Maps: every class-0 vertex has marks + valence >= 3. Quasimaps also need
    marks + valence >= 2 at every vertex of a tree with an edge.
    """
    return _stable(t.classes, t.valence, [len(m) for m in t.marks_at], Mode(mode))


def _label(cls, marks):
    return "[" + ",".join(str(x) for x in cls.coords) + "|" + ",".join(str(m) for m in marks) + "]"


def _encode(adjacency, labels, root):
    def rooted(v, parent):
        children = sorted(rooted(w, v) for w in adjacency[v] if w != parent)
        return "(" + labels[v] + "".join(children) + ")"

    return rooted(root, None)


def _canonical(adjacency, labels, centers):
    return min(_encode(adjacency, labels, c) for c in centers)


def _centers(t):
    if t.num_vertices == 1:
        return [0]
    graph = nx.Graph(t.edges)
    return nx.center(graph)


def canonical_form(t):
    """
    AHU encoding rooted at the center (the smaller one when there are two).
    Vertex labels carry the class coordinates and the exact mark indices.
    """
    labels = [_label(c, m) for c, m in zip(t.classes, t.marks_at)]
    return _canonical(t.adjacency, labels, _centers(t))


@lru_cache(maxsize=None)
def _shapes(size):
    """
    (adjacency, edges, centers) of every unlabelled tree on size vertices.
    """
    if size == 1:
        return (((),), (), (0,)),
    shapes = []
    for shape in nx.nonisomorphic_trees(size):
        adjacency = tuple(tuple(sorted(shape[v])) for v in range(size))
        edges = tuple(sorted(tuple(sorted(e)) for e in shape.edges()))
        shapes.append((adjacency, edges, tuple(nx.center(shape))))
    return tuple(shapes)


def _place_marks(adjacency, classes, deficit, n):
    """
    Yields per-vertex mark lists meeting every deficit, one per orbit under
    the automorphisms of the labelled tree.

    Mark k goes to one vertex per orbit of the stabiliser of marks 1..k-1;
    in a tree two vertices share an orbit exactly when the tree rooted at
    each has the same encoding.
    """
    marks_at = [[] for _ in classes]

    def place(mark):
        missing = sum(max(0, d - len(m)) for d, m in zip(deficit, marks_at))
        if missing > n - mark + 1:
            return
        if mark > n:
            yield tuple(tuple(m) for m in marks_at)
            return
        labels = [_label(c, m) for c, m in zip(classes, marks_at)]
        orbits = set()
        for v in range(len(classes)):
            orbit = _encode(adjacency, labels, v)
            if orbit in orbits:
                continue
            orbits.add(orbit)
            marks_at[v].append(mark)
            yield from place(mark + 1)
            marks_at[v].pop()

    yield from place(1)


def _trees_for_parts(parts, n, mode, beta):
    nonzero = len(parts)
    zero = CurveClass.zero(len(parts[0]))
    max_zero = max(0, nonzero + n - 2)
    distinct = sorted(set(parts))
    indices = [distinct.index(p) for p in parts]
    found = {}
    for zeros in range(max_zero + 1):
        size = nonzero + zeros
        single = size == 1
        for adjacency, edges, centers in _shapes(size):
            valence = [len(a) for a in adjacency]
            plain = [_deficit(False, val, mode, single) for val in valence]
            extra = [_deficit(True, val, mode, single) - p for val, p in zip(valence, plain)]
            if sum(plain) > n:
                continue
            slots = [v for v in range(size) if sum(plain) + extra[v] <= n]
            seen = set()
            for zero_slots in itertools.combinations(slots, zeros):
                if sum(plain) + sum(extra[v] for v in zero_slots) > n:
                    continue
                free = [v for v in range(size) if v not in zero_slots]
                deficit = [plain[v] + (extra[v] if v in zero_slots else 0) for v in range(size)]
                for perm in multiset_permutations(indices):
                    classes = [zero] * size
                    for v, i in zip(free, perm):
                        classes[v] = distinct[i]
                    base = _canonical(adjacency, [_label(c, ()) for c in classes], centers)
                    if base in seen:
                        continue
                    seen.add(base)
                    for marks_at in _place_marks(adjacency, classes, deficit, n):
                        key = _canonical(adjacency, [_label(c, m) for c, m in zip(classes, marks_at)], centers)
                        placement = [0] * n
                        for v, marks in enumerate(marks_at):
                            for mark in marks:
                                placement[mark - 1] = v
                        found[key] = DecoratedTree(tuple(classes), edges, tuple(placement), beta)
    return found


def enumerate_trees(beta, n, class_set, mode, max_parts=None, within=None):
    """
    Every stable decorated n-marked tree, up to isomorphism, whose nonzero
    vertex classes come from class_set and sum to beta.

    Zero-class vertices are attached up to #zero <= #nonzero + n - 2, which
    follows from summing valence - 2 over a tree.

    :param max_parts: Bound on the number of nonzero vertices.
    :param within: Remainder predicate forwarded to effective_decompositions.
    :return: A list of DecoratedTree ordered by canonical key.
    """
    mode = Mode(mode)
    found = {}
    for parts in effective_decompositions(beta, class_set, max_parts=max_parts, within=within):
        trees = _trees_for_parts(parts, n, mode, beta)
        logger.debug("%d trees for parts %s", len(trees), [p.coords for p in parts])
        found.update(trees)
    for tree in found.values():
        zeros = sum(1 for c in tree.classes if c.is_zero)
        nonzero = tree.num_vertices - zeros
        if tree.num_vertices > 1 and zeros > nonzero + n - 2:
            raise AssertionError(f"zero-vertex bound violated by {tree}")
    return [found[key] for key in sorted(found)]


def contract(t, edge_subset):
    """
    Contracts a set of edges in one pass: merged vertices add their classes
    and collect their marks.
    """
    uf = UnionFind(range(t.num_vertices))
    for a, b in edge_subset:
        uf.union(a, b)
    roots = sorted({uf[v] for v in range(t.num_vertices)}, key=lambda r: min(v for v in range(t.num_vertices) if uf[v] == r))
    index = {root: i for i, root in enumerate(roots)}
    classes = [None] * len(roots)
    for v, cls in enumerate(t.classes):
        i = index[uf[v]]
        classes[i] = cls if classes[i] is None else classes[i] + cls
    contracted = set(map(tuple, map(sorted, edge_subset)))
    edges = tuple((index[uf[a]], index[uf[b]]) for a, b in t.edges if (a, b) not in contracted)
    marks = tuple(index[uf[v]] for v in t.marks)
    return DecoratedTree(tuple(classes), edges, marks, t.beta)


def contraction_closure(t):
    """
    One representative per isomorphism class of contractions of t over every
    edge subset, t itself and the one-vertex tree included.
    """
    found = {}
    for size in range(t.num_edges + 1):
        for subset in itertools.combinations(t.edges, size):
            merged = contract(t, subset)
            found.setdefault(canonical_form(merged), merged)
    return [found[key] for key in sorted(found)]


def contraction_poset(trees):
    """
    Single-edge contraction arrows (source key, target key) among the given trees.
    """
    keys = {canonical_form(t): t for t in trees}
    arrows = set()
    for key, tree in keys.items():
        for edge in tree.edges:
            target = canonical_form(contract(tree, [edge]))
            if target in keys:
                arrows.add((key, target))
    return sorted(arrows)
