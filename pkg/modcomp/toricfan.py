"""
Smooth complete toric fans, their Picard and curve-class bases, and the
intersection data the moduli computations run on.
"""
import json
import logging
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import networkx as nx

from .linalg import bareiss_det, in_cone, integer_inverse, solve_exact

logger = logging.getLogger(__name__)


class FanValidationError(ValueError):
    """
    Raised when a fan file cannot be turned into a smooth complete fan.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ClassParseError(ValueError):
    """
    Raised for malformed curve-class input.
    """


@dataclass(frozen=True, order=True)
class _Coords:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))

    def __len__(self):
        return len(self.coords)

    def __add__(self, other):
        return type(self)(tuple(a + b for a, b in zip(self.coords, other.coords, strict=True)))

    def __sub__(self, other):
        return type(self)(tuple(a - b for a, b in zip(self.coords, other.coords, strict=True)))

    def __neg__(self):
        return type(self)(tuple(-a for a in self.coords))

    def __rmul__(self, k):
        return type(self)(tuple(k * a for a in self.coords))

    @property
    def is_zero(self):
        return not any(self.coords)

    @classmethod
    def zero(cls, length):
        return cls((0,) * length)


class CurveClass(_Coords):
    """
    A class in A_1(X), stored as its degrees against the basis divisors.
    """


class DivisorClass(_Coords):
    """
    A class in Pic(X), stored in the basis {D_rho : rho not in sigma}.
    """


@dataclass(frozen=True)
class Fan:
    """
    Rays and maximal cones of a toric variety. Construction does not validate;
    call validate_fan for that.
    """
    rays: tuple
    max_cones: tuple

    @property
    def ambient_rank(self):
        return len(self.rays[0]) if self.rays else 0

    @classmethod
    def from_dict(cls, data):
        """
        Builds a fan from parsed file contents.

        :param data: A mapping with "rays" and "max_cones".
        :raises FanValidationError: If a key is missing or an entry is not an integer list.
        """
        missing = [key for key in ("rays", "max_cones") if key not in data]
        if missing:
            raise FanValidationError([f"missing key '{key}'" for key in missing])
        try:
            rays = tuple(tuple(int(x) for x in ray) for ray in data["rays"])
            cones = tuple(tuple(int(x) for x in cone) for cone in data["max_cones"])
        except (TypeError, ValueError) as e:
            raise FanValidationError([f"rays and max_cones must be integer lists ({e})"]) from e
        return cls(rays=rays, max_cones=cones)

    @cached_property
    def walls(self):
        """
        Pairs of maximal cones sharing a facet, as (facet, cone index, cone index).
        """
        owners = _facet_owners(self)
        return tuple(
            (facet, cones[0], cones[1])
            for facet, cones in sorted(owners.items(), key=lambda item: sorted(item[0]))
            if len(cones) == 2
        )


def _facet_owners(fan):
    owners = {}
    for index, cone in enumerate(fan.max_cones):
        cone_set = frozenset(cone)
        for ray in cone_set:
            owners.setdefault(cone_set - {ray}, []).append(index)
    return owners


def _fmt_cone(indices):
    return "{" + ",".join(str(i) for i in sorted(indices)) + "}"


def _fmt_facet(indices):
    indices = sorted(indices)
    if len(indices) == 1:
        return f"{{ray {indices[0]}}}"
    return "{rays " + ",".join(str(i) for i in indices) + "}"


@dataclass
class FanReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def validate_fan(fan):
    """
    Checks primitivity, smoothness and completeness (facet pairing plus a
    connected wall graph).

    :param fan: The fan to check.
    :return: A FanReport listing every violation found.
    """
    report = FanReport()
    bad = report.violations
    if not fan.rays:
        bad.append("fan has no rays")
        return report
    rank = fan.ambient_rank
    seen = {}
    for index, ray in enumerate(fan.rays):
        if len(ray) != rank:
            bad.append(f"ray {index} has length {len(ray)}, expected {rank}")
            continue
        if math.gcd(*ray) != 1:
            bad.append(f"ray {index} {list(ray)} is not primitive")
        if ray in seen:
            bad.append(f"ray {index} duplicates ray {seen[ray]}")
        else:
            seen[ray] = index

    shape_ok = True
    for index, cone in enumerate(fan.max_cones):
        if len(set(cone)) != len(cone):
            bad.append(f"cone {index} {_fmt_cone(cone)} repeats a ray")
            shape_ok = False
        if len(cone) != rank:
            bad.append(f"cone {index} {_fmt_cone(cone)} has {len(cone)} rays, expected {rank}")
            shape_ok = False
        out_of_range = [i for i in cone if not 0 <= i < len(fan.rays)]
        if out_of_range:
            bad.append(f"cone {index} references missing rays {out_of_range}")
            shape_ok = False
    if not fan.max_cones:
        bad.append("fan has no maximal cones")
    if bad or not shape_ok:
        return report

    for index, cone in enumerate(fan.max_cones):
        det = bareiss_det([list(fan.rays[i]) for i in cone])
        if abs(det) != 1:
            bad.append(f"cone {index} {_fmt_cone(cone)} is not unimodular (det {det})")

    used = {i for cone in fan.max_cones for i in cone}
    for index in range(len(fan.rays)):
        if index not in used:
            bad.append(f"ray {index} lies in no maximal cone")

    for facet, owners in sorted(_facet_owners(fan).items(), key=lambda item: sorted(item[0])):
        if len(owners) == 1:
            cone = fan.max_cones[owners[0]]
            bad.append(f"facet {_fmt_facet(facet)} of cone {_fmt_cone(cone)} unpaired")
        elif len(owners) > 2:
            bad.append(f"facet {_fmt_facet(facet)} shared by {len(owners)} cones")

    graph = nx.Graph()
    graph.add_nodes_from(range(len(fan.max_cones)))
    graph.add_edges_from((a, b) for _, a, b in fan.walls)
    if not nx.is_connected(graph):
        bad.append("wall graph of maximal cones is not connected")
    return report


@dataclass(frozen=True)
class ToricBasis:
    """
    The Picard basis {D_rho : rho not in sigma(1)} and its dual curve basis.

    pairing[i][j] is <m_i, u_rho> for the i-th ray of sigma and rho = pic_rays[j].
    """
    fan: Fan
    sigma: int
    sigma_rays: tuple
    pic_rays: tuple
    dual: tuple
    pairing: tuple

    @property
    def rank(self):
        return len(self.pic_rays)

    @cached_property
    def divisor_classes(self):
        return tuple(divisor_class_of_ray(self, rho) for rho in range(len(self.fan.rays)))

    @cached_property
    def mori_cone(self):
        return CurveCone(tuple(dict.fromkeys(cls for _, cls in wall_curve_classes(self))))


def build_basis(fan, sigma):
    """
    Solves for the dual basis m_i of the rays of sigma and pairs it with the other rays.

    :param fan: A validated fan.
    :param sigma: Index of the maximal cone to work in.
    """
    if not 0 <= sigma < len(fan.max_cones):
        raise IndexError(f"sigma {sigma} out of range for {len(fan.max_cones)} maximal cones")
    sigma_rays = tuple(sorted(fan.max_cones[sigma]))
    try:
        dual = integer_inverse([fan.rays[t] for t in sigma_rays])
    except ValueError as e:
        raise RuntimeError(f"cone {sigma} is not unimodular; validate the fan first") from e
    pic_rays = tuple(i for i in range(len(fan.rays)) if i not in sigma_rays)
    pairing = tuple(
        tuple(sum(a * b for a, b in zip(m, fan.rays[rho])) for rho in pic_rays) for m in dual
    )
    return ToricBasis(fan, sigma, sigma_rays, pic_rays, dual, pairing)


def _check_ray(basis, rho):
    if not 0 <= rho < len(basis.fan.rays):
        raise IndexError(f"ray {rho} out of range")


def divisor_class_of_ray(basis, rho):
    """
    The class [D_rho] in the Picard basis.
    """
    _check_ray(basis, rho)
    if rho in basis.pic_rays:
        return DivisorClass(tuple(int(j == basis.pic_rays.index(rho)) for j in range(basis.rank)))
    row = basis.pairing[basis.sigma_rays.index(rho)]
    return DivisorClass(tuple(-x for x in row))


def curve_degree(basis, beta, rho):
    """
    The intersection number beta . D_rho.
    """
    _check_ray(basis, rho)
    return sum(a * b for a, b in zip(beta.coords, basis.divisor_classes[rho].coords, strict=True))


@lru_cache(maxsize=8192)
def ray_degrees(basis, beta):
    return tuple(curve_degree(basis, beta, rho) for rho in range(len(basis.fan.rays)))


def transport_class(beta, source, target):
    """
    Rewrites beta from one Picard basis of a fan into another.

    A class is determined by its degrees against all D_rho, so its coordinates
    in target are its degrees against target's basis divisors.
    """
    if source.fan != target.fan:
        raise ValueError("bases belong to different fans")
    degrees = ray_degrees(source, beta)
    return CurveClass(tuple(degrees[rho] for rho in target.pic_rays))


@lru_cache(maxsize=64)
def wall_curve_classes(basis):
    """
    The torus-invariant curve class of every wall.

    For a wall shared by two maximal cones with off-wall rays a and b, the
    relation u_a + u_b + sum_t c_t u_t = 0 over the wall rays t gives
    C.D_a = C.D_b = 1 and C.D_t = c_t.

    :return: A tuple of (wall ray indices, CurveClass) pairs.
    """
    fan = basis.fan
    result = []
    for facet, first, second in fan.walls:
        (a,) = set(fan.max_cones[first]) - facet
        (b,) = set(fan.max_cones[second]) - facet
        wall = tuple(sorted(facet))
        target = tuple(-(x + y) for x, y in zip(fan.rays[a], fan.rays[b]))
        if wall:
            coefficients = solve_exact([fan.rays[t] for t in wall], target)
            if coefficients is None or any(not c.is_integer for c in coefficients):
                raise RuntimeError(f"wall {_fmt_facet(facet)} has no integral relation")
        else:
            coefficients = ()
        numbers = {a: 1, b: 1}
        numbers.update({t: int(c) for t, c in zip(wall, coefficients)})
        result.append((wall, CurveClass(tuple(numbers.get(rho, 0) for rho in basis.pic_rays))))
    return tuple(result)


@dataclass(frozen=True)
class CurveCone:
    """
    The rational cone spanned by finitely many curve classes.
    """
    generators: tuple

    def contains(self, gamma):
        return in_cone(gamma.coords, tuple(g.coords for g in self.generators))


@lru_cache(maxsize=256)
def divisor_curve_cone(basis, rho):
    """
    Cone of curves lying in D_rho, spanned by the walls that contain rho.
    """
    _check_ray(basis, rho)
    return CurveCone(tuple(dict.fromkeys(cls for wall, cls in wall_curve_classes(basis) if rho in wall)))


def is_effective(basis, gamma):
    return basis.mori_cone.contains(gamma)


def candidate_classes(basis, beta, limit=20000):
    """
    Every nonzero integral class gamma with gamma and beta - gamma effective.

    Classes are grown as nonnegative integer combinations of the wall classes.

    :raises ValueError: If more than ``limit`` classes turn up, which only
        happens for a fan whose Mori cone is not strongly convex.
    """
    generators = sorted({g for g in basis.mori_cone.generators if not g.is_zero})
    start = CurveClass.zero(basis.rank)
    seen = {start}
    frontier = [start]
    while frontier:
        gamma = frontier.pop()
        for g in generators:
            grown = gamma + g
            if grown in seen or not is_effective(basis, beta - grown):
                continue
            seen.add(grown)
            frontier.append(grown)
            if len(seen) > limit:
                raise ValueError("candidate class search did not terminate; is the fan projective?")
    seen.discard(start)
    return sorted(seen)


def effective_decompositions(beta, allowed, max_parts=None, within=None):
    """
    All multisets of allowed classes summing to beta.

    :param beta: The nonzero class to split.
    :param allowed: Nonzero classes the parts are drawn from.
    :param max_parts: Upper bound on the number of parts.
    :param within: Optional predicate on partial remainders; branches whose
        remainder fails it are pruned. Either this or max_parts bounds the search.
    :return: A list of tuples, each sorted, no two equal.
    """
    if beta.is_zero:
        raise ValueError("cannot decompose the zero class")
    if max_parts is None and within is None:
        raise ValueError("effective_decompositions needs max_parts or within")
    parts = sorted(set(allowed))
    if any(p.is_zero for p in parts):
        raise ValueError("allowed classes must be nonzero")
    found = []
    chosen = []

    def grow(remaining, start):
        if remaining.is_zero:
            found.append(tuple(chosen))
            return
        if max_parts is not None and len(chosen) >= max_parts:
            return
        for index in range(start, len(parts)):
            rest = remaining - parts[index]
            if within is not None and not rest.is_zero and not within(rest):
                continue
            chosen.append(parts[index])
            grow(rest, index)
            chosen.pop()

    grow(beta, 0)
    return found


@dataclass(frozen=True)
class IrreducibleClasses:
    """
    Membership oracle for classes of irreducible curves.

    source is "list" (explicit classes), "cones" (union of cones) or
    "unknown" (every effective class is accepted).
    """
    source: str
    classes: frozenset = frozenset()
    cones: tuple = ()

    @property
    def known(self):
        return self.source != "unknown"

    def contains(self, gamma):
        if gamma.is_zero:
            return True
        if self.source == "list":
            return gamma in self.classes
        return any(cone.contains(gamma) for cone in self.cones)


_CSV_INTS = re.compile(r"^\s*-?\d+(\s*,\s*-?\d+)*\s*$")
_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*([^\s\d+\-,()]+)\s*")


@dataclass(frozen=True)
class ToricTarget:
    """
    A validated fan with its chosen basis, class names and irreducibility oracle.
    """
    name: str
    fan: Fan
    basis: ToricBasis
    class_names: tuple = ()
    input_basis: tuple = ()
    irreducible: IrreducibleClasses = None
    description: str = ""

    @property
    def dim(self):
        return self.fan.ambient_rank

    @property
    def names(self):
        return dict(self.class_names)

    def parse_class(self, text):
        """
        Parses "2,2" (coefficients over input_basis, or dual-basis coordinates)
        or a name expression such as "2s+2e" or "3ℓ".

        :raises ClassParseError: On malformed input.
        """
        text = str(text).strip()
        if not text:
            raise ClassParseError("empty curve class")
        if _CSV_INTS.match(text):
            values = [int(x) for x in text.split(",")]
            if self.input_basis:
                if len(values) != len(self.input_basis):
                    raise ClassParseError(
                        f"expected {len(self.input_basis)} integers over ({', '.join(self.input_basis)}), got {len(values)}"
                    )
                names = self.names
                total = CurveClass.zero(self.basis.rank)
                for k, name in zip(values, self.input_basis):
                    total = total + k * names[name]
                return total
            if len(values) != self.basis.rank:
                raise ClassParseError(f"expected {self.basis.rank} integers, got {len(values)}")
            return CurveClass(tuple(values))
        return self._parse_expression(text)

    def _parse_expression(self, text):
        names = self.names
        total = CurveClass.zero(self.basis.rank)
        position = 0
        while position < len(text):
            match = _TERM.match(text, position)
            if not match or match.end() == position:
                raise ClassParseError(f"cannot parse curve class '{text}'")
            sign, count, name = match.groups()
            if position > 0 and not sign:
                raise ClassParseError(f"missing operator in '{text}'")
            if name not in names:
                raise ClassParseError(f"unknown class name '{name}'")
            k = int(count) if count else 1
            total = total + (-k if sign == "-" else k) * names[name]
            position = match.end()
        return total

    def format_class(self, gamma):
        """
        Symbolic rendering: a name, a multiple of a name, a combination over
        input_basis, or raw coordinates.
        """
        if gamma.is_zero:
            return "0"
        for name, cls in self.class_names:
            if cls == gamma:
                return name
        for name, cls in self.class_names:
            k = _multiple_of(gamma, cls)
            if k is not None and k >= 2:
                return f"{k}{name}"
        if self.input_basis:
            names = self.names
            solution = solve_exact([names[n].coords for n in self.input_basis], gamma.coords)
            if solution is not None and all(x.is_integer for x in solution):
                return _format_terms(zip((int(x) for x in solution), self.input_basis))
        return "(" + ",".join(str(x) for x in gamma.coords) + ")"


def _multiple_of(gamma, cls):
    """
    The integer k with gamma = k * cls, or None.
    """
    pivot = next((i for i, x in enumerate(cls.coords) if x), None)
    if pivot is None or gamma.coords[pivot] % cls.coords[pivot]:
        return None
    k = gamma.coords[pivot] // cls.coords[pivot]
    return k if k * cls == gamma else None


def _format_terms(terms):
    out = ""
    for k, name in terms:
        if k == 0:
            continue
        magnitude = "" if abs(k) == 1 else str(abs(k))
        if k < 0:
            out += f"-{magnitude}{name}"
        else:
            out += f"{'+' if out else ''}{magnitude}{name}"
    return out or "0"


def _read_mapping(path):
    path = Path(path)
    if path.suffix.lower() == ".toml":
        with open(path, "rb") as f:
            return tomllib.load(f)
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _class_list(entries, names, rank, what):
    out = []
    for entry in entries:
        if isinstance(entry, str):
            if entry not in names:
                raise FanValidationError([f"{what}: unknown class name '{entry}'"])
            out.append(names[entry])
            continue
        coords = tuple(int(x) for x in entry)
        if len(coords) != rank:
            raise FanValidationError([f"{what}: class {list(coords)} has length {len(coords)}, expected {rank}"])
        out.append(CurveClass(coords))
    return out


def irreducible_oracle(data, names, basis):
    """
    Builds the irreducible-class oracle from "irreducible_classes" or
    "irreducible_cones"; falls back to all effective classes.
    """
    if data.get("irreducible_classes") is not None:
        classes = _class_list(data["irreducible_classes"], names, basis.rank, "irreducible_classes")
        return IrreducibleClasses("list", classes=frozenset(classes))
    if data.get("irreducible_cones") is not None:
        cones = tuple(
            CurveCone(tuple(_class_list(gens, names, basis.rank, "irreducible_cones")))
            for gens in data["irreducible_cones"]
        )
        return IrreducibleClasses("cones", cones=cones)
    logger.warning("No irreducible classes given; treating every effective class as irreducible (UNKNOWN).")
    return IrreducibleClasses("unknown", cones=(basis.mori_cone,))


def target_from_dict(data, name="fan", classes=None):
    """
    Validates fan data and assembles a ToricTarget.

    :param data: Parsed fan file contents.
    :param name: Fallback display name.
    :param classes: Optional mapping whose irreducible entries replace the fan's.
    :raises FanValidationError: If the fan or its class data is invalid.
    """
    fan = Fan.from_dict(data)
    report = validate_fan(fan)
    if not report.ok:
        raise FanValidationError(report.violations)
    sigma = data.get("sigma", 0)
    if not isinstance(sigma, int) or not 0 <= sigma < len(fan.max_cones):
        raise FanValidationError([f"sigma {sigma!r} is not a maximal cone index"])
    basis = build_basis(fan, sigma)

    names = {}
    for key, coords in (data.get("class_names") or {}).items():
        names[key] = _class_list([coords], {}, basis.rank, "class_names")[0]
    input_basis = tuple(data.get("input_basis") or ())
    unknown = [n for n in input_basis if n not in names]
    if unknown:
        raise FanValidationError([f"input_basis names unknown classes {unknown}"])
    if input_basis and len(input_basis) != basis.rank:
        raise FanValidationError([f"input_basis needs {basis.rank} names, got {len(input_basis)}"])

    source = classes if classes is not None else data
    oracle = irreducible_oracle(source, names, basis)
    logger.debug("Loaded %s: %d rays, sigma=%d, pic rays %s", name, len(fan.rays), sigma, basis.pic_rays)
    return ToricTarget(
        name=data.get("name", name),
        fan=fan,
        basis=basis,
        class_names=tuple(names.items()),
        input_basis=input_basis,
        irreducible=oracle,
        description=data.get("description", ""),
    )


def load_target(path, classes_path=None):
    """
    Loads a fan file (JSON or TOML) into a ToricTarget.

    :param path: The fan file.
    :param classes_path: Optional file with irreducible_classes or irreducible_cones.
    :raises FileNotFoundError: If a file does not exist.
    :raises FanValidationError: If the fan is invalid.
    """
    data = _read_mapping(path)
    classes = _read_mapping(classes_path) if classes_path else None
    return target_from_dict(data, name=Path(path).stem, classes=classes)
