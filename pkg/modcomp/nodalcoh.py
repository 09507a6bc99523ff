"""
h^0 and h^1 of a line bundle on a genus-0 nodal curve, read off its dual tree.

Each component C_v is a P^1 carrying O(d_v). A global section is a tuple of
polynomials f_v of degree <= d_v (none when d_v < 0) agreeing at every node,
so h^0 is the kernel dimension of the node evaluation matrix.
"""
import logging
import random
from dataclasses import dataclass

import networkx as nx

from .linalg import MERSENNE_61, bareiss_rank, modular_rank

logger = logging.getLogger(__name__)


class CohomologyError(ArithmeticError):
    """
    Raised when h^1 would come out negative.
    """


@dataclass(frozen=True)
class DegreeTree:
    """
    A tree of P^1s with one line-bundle degree per vertex.

    :param degrees: d_v for v = 0..len-1.
    :param edges: Vertex pairs; their order fixes the incidence order at each vertex.
    """
    degrees: tuple
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if not self.degrees:
            raise ValueError("a degree tree needs at least one vertex")
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.degrees)))
        for a, b in self.edges:
            if not (0 <= a < len(self.degrees) and 0 <= b < len(self.degrees)):
                raise ValueError(f"edge ({a}, {b}) references a missing vertex")
            graph.add_edge(a, b)
        if len(self.edges) != len(self.degrees) - 1 or not nx.is_tree(graph):
            raise ValueError("edges do not form a tree")


@dataclass(frozen=True)
class CohomologyResult:
    h0: int
    h1: int


def _node_coordinates(t):
    """
    Assigns each edge end a coordinate: the i-th edge at v meets C_v at x = i.
    """
    seen = [0] * len(t.degrees)
    ends = []
    for a, b in t.edges:
        seen[a] += 1
        seen[b] += 1
        ends.append((seen[a], seen[b]))
    return ends


def evaluation_matrix(t, coordinates=None, modulus=None):
    """
    Rows f_v(x_v) - f_w(x_w) = 0, one per edge, over monomial columns.

    :param t: The degree tree.
    :param coordinates: Per-edge node coordinates; defaults to the incidence order.
    :param modulus: Reduce entries modulo this prime if given.
    :return: (rows, number of columns).
    """
    offsets = []
    columns = 0
    for d in t.degrees:
        offsets.append(columns)
        columns += max(d + 1, 0)
    coordinates = coordinates or _node_coordinates(t)
    rows = []
    for (a, b), (xa, xb) in zip(t.edges, coordinates):
        row = [0] * columns
        for vertex, x, sign in ((a, xa, 1), (b, xb, -1)):
            power = 1
            for k in range(t.degrees[vertex] + 1):
                row[offsets[vertex] + k] += sign * power
                power = power * x if modulus is None else power * x % modulus
        rows.append(row)
    return rows, columns


def h0_tree(t):
    """
    h^0(C, L) for any curve and bundle in the stratum of t.
    """
    rows, columns = evaluation_matrix(t)
    return columns - bareiss_rank(rows) if rows else columns


def h1_tree(t):
    """
    h^1(C, L) = h^0 - (sum of degrees) - 1.

    :raises CohomologyError: If the result is negative.
    """
    return cohomology(t).h1


def cohomology(t, prime_check=False):
    """
    Both cohomology dimensions, with the Euler identity enforced.

    :param prime_check: Also recompute h^0 over a prime field and compare.
    """
    h0 = h0_tree(t)
    h1 = h0 - sum(t.degrees) - 1
    if h1 < 0:
        raise CohomologyError(f"negative h1 ({h1}) for degrees {t.degrees}")
    if prime_check:
        oracle = h0_tree_modp(t, seed=len(t.degrees))
        if oracle != h0:
            raise CohomologyError(f"prime-field h0 {oracle} disagrees with exact h0 {h0} for {t}")
    return CohomologyResult(h0, h1)


def h0_tree_modp(t, seed=0, prime=MERSENNE_61):
    """
    h^0 with random distinct node coordinates over GF(prime).

    Used to cross-check that the deterministic coordinates are as good as
    generic ones.
    """
    rng = random.Random(seed)
    valence = [0] * len(t.degrees)
    for a, b in t.edges:
        valence[a] += 1
        valence[b] += 1
    points = [rng.sample(range(1, prime), v) if v else [] for v in valence]
    cursor = [0] * len(t.degrees)
    coordinates = []
    for a, b in t.edges:
        coordinates.append((points[a][cursor[a]], points[b][cursor[b]]))
        cursor[a] += 1
        cursor[b] += 1
    rows, columns = evaluation_matrix(t, coordinates, modulus=prime)
    return columns - modular_rank(rows, prime) if rows else columns


def h0_p1(k):
    """
    h^0(P^1, O(k)).
    """
    return max(k + 1, 0)
