"""
Scores, emptiness checks and the component criterion for genus-0 stable maps
and quasimaps to a toric target.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from .nodalcoh import CohomologyError, cohomology, h0_p1
from .stratcone import ClosureOrder, Stratum, component_strata, stratum_dimension
from .toricfan import CurveClass, candidate_classes, divisor_curve_cone, is_effective, ray_degrees
from .treegen import DecoratedTree, Mode, canonical_form, contraction_closure, enumerate_trees

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ModuliError(ValueError):
    pass


class EmptyModuliError(ModuliError):
    pass


@dataclass(frozen=True)
class TreeScore:
    i_G: int
    d_G: int
    h0_per_ray: tuple
    h1_per_ray: tuple


def score_tree(t, basis, prime_check=False):
    """
    Computes i_G and d_G = i_G - #E from the per-ray cohomology of t.

    i_G sums h^0(G, L_rho) - h^0(P^1, O(beta.D_rho)) over the rays; the same
    quantity through h^1 differences is checked against it.

    :param t: A decorated tree.
    :param basis: The toric basis the classes are written in.
    :param prime_check: Cross-check each h^0 over a prime field.
    """
    beta = t.class_sum
    h0s, h1s = [], []
    i_g = 0
    h1_excess = 0
    for rho in range(len(basis.fan.rays)):
        degrees = [ray_degrees(basis, cls)[rho] for cls in t.classes]
        result = cohomology(t.degree_tree(degrees), prime_check=prime_check)
        k = ray_degrees(basis, beta)[rho]
        h0s.append(result.h0)
        h1s.append(result.h1)
        i_g += result.h0 - h0_p1(k)
        h1_excess += result.h1 - max(-k - 1, 0)
    d_g = i_g - t.num_edges
    if h1_excess - t.num_edges != d_g:
        raise CohomologyError(f"h0 and h1 bookkeeping disagree for {t}")
    return TreeScore(i_g, d_g, tuple(h0s), tuple(h1s))


class Status(str, Enum):
    EMPTY = "empty"
    PASSED = "passed"


@dataclass(frozen=True)
class EmptinessVerdict:
    """
    Empty with the rule and witness that proves it, or Passed when every
    necessary condition holds. Passed is not a proof of nonemptiness.
    """
    status: Status
    rule: str = None
    ray: int = None
    vertex: int = None
    detail: str = ""

    @property
    def empty(self):
        return self.status == Status.EMPTY

    def describe(self):
        if not self.empty:
            return "passed"
        return f"empty ({self.rule})"


PASSED = EmptinessVerdict(Status.PASSED)


def _empty(rule, detail, ray=None, vertex=None):
    logger.debug("Empty by %s at ray=%s vertex=%s: %s", rule, ray, vertex, detail)
    return EmptinessVerdict(Status.EMPTY, rule, ray, vertex, detail)


def nonempty_status(t, target, mode):
    """
    Necessary conditions for the stratum of t to be nonempty.

    R1 (maps only): every nonzero vertex class is irreducible.
    R2: per ray, grow the set F of components forced into D_rho: negative
    degree; a contracted component touching F; a component meeting F at more
    points than its degree. A forced component must have its class in the
    curve cone of D_rho (for negative degree this is checked in maps mode only).
    R3: the rays forcing any one component must share a maximal cone. On a
    surface R2c rejects a cone-checked neighbour of such a component first, so
    R3 decides the negative seeds that quasimap mode leaves unchecked.

    :param t: A stable decorated tree.
    :param target: The ToricTarget.
    :param mode: Mode.MAPS or Mode.QUASIMAPS.
    """
    mode = Mode(mode)
    basis = target.basis
    if mode == Mode.MAPS:
        for v, cls in enumerate(t.classes):
            if not target.irreducible.contains(cls):
                return _empty("R1", f"class {target.format_class(cls)} is not irreducible", vertex=v)

    forced = []
    for rho in range(len(basis.fan.rays)):
        cone = divisor_curve_cone(basis, rho)
        degrees = [ray_degrees(basis, cls)[rho] for cls in t.classes]
        inside = {v for v, d in enumerate(degrees) if d < 0}
        if mode == Mode.MAPS:
            for v in sorted(inside):
                if not cone.contains(t.classes[v]):
                    return _empty("R2a", f"class {target.format_class(t.classes[v])} has negative degree but is not a curve in D_{rho}", rho, v)
        changed = True
        while changed:
            changed = False
            for v, cls in enumerate(t.classes):
                if v in inside:
                    continue
                hits = sum(1 for w in t.adjacency[v] if w in inside)
                if cls.is_zero:
                    if hits:
                        inside.add(v)
                        changed = True
                elif hits > degrees[v]:
                    if not cone.contains(cls):
                        return _empty("R2c", f"{target.format_class(cls)} meets D_{rho} at {hits} points but has degree {degrees[v]}", rho, v)
                    inside.add(v)
                    changed = True
        forced.append(inside)

    cones = [set(c) for c in basis.fan.max_cones]
    for v in range(t.num_vertices):
        rays = {rho for rho, inside in enumerate(forced) if v in inside}
        if rays and not any(rays <= c for c in cones):
            return _empty("R3", f"forced into divisors {sorted(rays)} with no common cone", vertex=v)
    return PASSED


@dataclass(frozen=True)
class TreeEntry:
    key: str
    tree: DecoratedTree
    score: TreeScore
    verdict: EmptinessVerdict
    offset: int
    component: bool

    def to_dict(self, target=None):
        data = {
            "key": self.key,
            "tree": self.tree.to_dict(),
            "num_edges": self.tree.num_edges,
            "i_G": self.score.i_G,
            "d_G": self.score.d_G,
            "h0_per_ray": list(self.score.h0_per_ray),
            "h1_per_ray": list(self.score.h1_per_ray),
            "offset": self.offset,
            "verdict": {
                "status": self.verdict.status.value,
                "rule": self.verdict.rule,
                "ray": self.verdict.ray,
                "vertex": self.verdict.vertex,
                "detail": self.verdict.detail,
            },
            "component": self.component,
        }
        if target is not None:
            data["labels"] = [target.format_class(c) for c in self.tree.classes]
        return data

    @classmethod
    def from_dict(cls, data, beta):
        tree = DecoratedTree.from_dict(data["tree"], beta)
        verdict = data["verdict"]
        return cls(
            key=data["key"],
            tree=tree,
            score=TreeScore(data["i_G"], data["d_G"], tuple(data["h0_per_ray"]), tuple(data["h1_per_ray"])),
            verdict=EmptinessVerdict(Status(verdict["status"]), verdict["rule"], verdict["ray"], verdict["vertex"], verdict["detail"]),
            offset=data["offset"],
            component=data["component"],
        )


@dataclass(frozen=True)
class ComponentReport:
    """
    Every enumerated tree with its score and verdict, and which trees index
    irreducible components.
    """
    fan_name: str
    mode: Mode
    beta: CurveClass
    n: int
    dim_main: int
    oracle: str
    entries: tuple

    @property
    def components(self):
        return [e for e in self.entries if e.component]

    @property
    def component_keys(self):
        return [e.key for e in self.components]

    def entry(self, key):
        return next(e for e in self.entries if e.key == key)

    def to_dict(self, target=None):
        data = {
            "schema": SCHEMA_VERSION,
            "fan": self.fan_name,
            "mode": self.mode.value,
            "beta": list(self.beta.coords),
            "n": self.n,
            "dim_main": self.dim_main,
            "irreducible_classes": self.oracle,
            "trees": [e.to_dict(target) for e in self.entries],
            "components": self.component_keys,
            "dimensions": dimension_report(self),
            "dimensions_note": "derived from the standard virtual dimension, not from the criterion",
        }
        if target is not None:
            data["beta_label"] = target.format_class(self.beta)
        return data

    @classmethod
    def from_dict(cls, data):
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        beta = CurveClass(tuple(data["beta"]))
        return cls(
            fan_name=data["fan"],
            mode=Mode(data["mode"]),
            beta=beta,
            n=data["n"],
            dim_main=data["dim_main"],
            oracle=data["irreducible_classes"],
            entries=tuple(TreeEntry.from_dict(e, beta) for e in data["trees"]),
        )

    def save(self, path, target=None):
        """
        Writes the report as JSON.

        :param path: Destination file.
        :param target: Optional ToricTarget for symbolic class labels.
        """
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(target), f, indent=2, ensure_ascii=False)

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def main_dimension(target, beta, n):
    """
    dim X + sum_rho beta.D_rho + n - 3.
    """
    return target.dim + sum(ray_degrees(target.basis, beta)) + n - 3


def _is_component(tree, key, scores, basis, prime_check):
    closure = contraction_closure(tree)
    strata = []
    keys = []
    for member in closure:
        member_key = canonical_form(member)
        if member_key not in scores:
            scores[member_key] = score_tree(member, basis, prime_check)
        keys.append(member_key)
        strata.append(Stratum(member_key, scores[member_key].i_G, member.num_edges))
    generic = next(k for k, m in zip(keys, closure) if m.num_vertices == 1)
    pairs = {(key, k) for k in keys} | {(k, generic) for k in keys}
    return key in component_strata(strata, ClosureOrder.generated_by(pairs, keys))


def irreducible_components(target, beta, n, mode, max_parts=None, threads=None, prime_check=False):
    """
    Enumerates the stable decorated trees of beta and flags those that index
    irreducible components: nonempty, and d_G >= d_G' for every contraction G'.

    :param target: The ToricTarget.
    :param beta: A nonzero effective CurveClass.
    :param n: Number of marks.
    :param mode: Mode.MAPS or Mode.QUASIMAPS.
    :param max_parts: Optional bound on nonzero vertices.
    :param threads: Worker count for scoring; None lets the executor decide.
    :param prime_check: Cross-check cohomology over a prime field.
    :raises EmptyModuliError: For quasimaps with fewer than two marks.
    :raises ModuliError: If beta is zero or not effective, or n is negative.
    """
    mode = Mode(mode)
    if n < 0:
        raise ModuliError("number of marks must be nonnegative")
    if mode == Mode.QUASIMAPS and n < 2:
        raise EmptyModuliError("moduli space empty for n < 2")
    basis = target.basis
    if len(beta) != basis.rank:
        raise ModuliError(f"class has {len(beta)} coordinates, expected {basis.rank}")
    if beta.is_zero or not is_effective(basis, beta):
        raise ModuliError(f"{target.format_class(beta)} is not a nonzero effective class")

    allowed = candidate_classes(basis, beta)
    allowed_set = set(allowed)
    trees = enumerate_trees(beta, n, allowed, mode, max_parts=max_parts, within=allowed_set.__contains__)
    keys = [canonical_form(t) for t in trees]

    def evaluate(tree):
        return score_tree(tree, basis, prime_check), nonempty_status(tree, target, mode)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        evaluated = list(pool.map(evaluate, trees))

    scores = {key: score for key, (score, _) in zip(keys, evaluated)}
    d0 = next(score.d_G for tree, (score, _) in zip(trees, evaluated) if tree.num_vertices == 1)
    entries = []
    for key, tree, (score, verdict) in zip(keys, trees, evaluated):
        component = (
            not verdict.empty
            and score.d_G >= d0
            and _is_component(tree, key, scores, basis, prime_check)
        )
        entries.append(TreeEntry(key, tree, score, verdict, score.d_G - d0, component))

    report = ComponentReport(
        fan_name=target.name,
        mode=mode,
        beta=beta,
        n=n,
        dim_main=main_dimension(target, beta, n),
        oracle=target.irreducible.source,
        entries=tuple(entries),
    )
    logger.info(
        "%s, beta=%s, n=%d: %d stable trees, %d components",
        mode.value, target.format_class(beta), n, len(entries), len(report.components),
    )
    return report


def dimension_report(report, base_dim=None, generic_rank=None):
    """
    Absolute dimension of every component.

    With base_dim and generic_rank this is b + f + d_G; otherwise the main
    component's standard dimension plus the tree's offset.
    """
    dims = {}
    for entry in report.components:
        if base_dim is not None and generic_rank is not None:
            stratum = Stratum(entry.key, entry.score.i_G, entry.tree.num_edges)
            dims[entry.key] = stratum_dimension(base_dim, generic_rank, stratum)
        else:
            dims[entry.key] = report.dim_main + entry.offset
    return dims
