"""
Component criterion for a stratified cone: a stratum indexes an irreducible
component when its score d = rank offset - codimension is at least the score
of every stratum whose closure contains it.
"""
from dataclasses import dataclass

import networkx as nx


class StratificationError(ValueError):
    pass


@dataclass(frozen=True)
class Stratum:
    id: object
    rank_offset: int
    codim: int

    @property
    def generic(self):
        return self.rank_offset == 0 and self.codim == 0


def d_value(s):
    return s.rank_offset - s.codim


@dataclass(frozen=True)
class ClosureOrder:
    """
    Pairs (a, b) meaning stratum a lies in the closure of stratum b.
    """
    relation: frozenset

    @classmethod
    def generated_by(cls, pairs, ids):
        """
        Reflexive-transitive closure of the given pairs over ids.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(ids)
        graph.add_edges_from(pairs)
        closed = nx.transitive_closure(graph, reflexive=True)
        return cls(frozenset(closed.edges()))

    def above(self, a):
        return {b for x, b in self.relation if x == a}


def stratum_dimension(base_dim, generic_rank, s):
    """
    Dimension of the preimage of a stratum: b + f + d.
    """
    return base_dim + generic_rank + d_value(s)


def maximal_cover(elements, containment):
    """
    Elements not strictly contained in another.

    :param elements: Ids.
    :param containment: Pairs (a, b) meaning a is contained in b.
    """
    elements = list(elements)
    below = {a for a, b in containment if a != b}
    return {e for e in elements if e not in below}


def _check(strata, order):
    ids = {s.id for s in strata}
    if len(ids) != len(strata):
        raise StratificationError("stratum ids are not unique")
    generic = [s for s in strata if s.generic]
    if len(generic) != 1:
        raise StratificationError(f"expected exactly one generic stratum, found {len(generic)}")
    unknown = {x for pair in order.relation for x in pair} - ids
    if unknown:
        raise StratificationError(f"closure order names unknown strata {sorted(map(str, unknown))}")
    return generic[0]


def component_strata(strata, order):
    """
    Ids of the strata whose closure preimages are irreducible components.

    The preimage of a lies in the closure of the preimage of b exactly when a
    lies in the closure of b and d(a) < d(b); components are the maximal
    elements of that containment.

    :raises StratificationError: Without a unique generic stratum, or when the
        order names unknown ids.
    """
    strata = list(strata)
    _check(strata, order)
    score = {s.id: d_value(s) for s in strata}
    closed = ClosureOrder.generated_by(order.relation, score)
    containment = {(a, b) for a, b in closed.relation if a != b and score[a] < score[b]}
    return maximal_cover([s.id for s in strata], containment)
