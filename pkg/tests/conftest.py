import pytest
from pathlib import Path
from unittest.mock import MagicMock

from modcomp.toricfan import CurveClass, load_target
from modcomp.treegen import DecoratedTree

FANS_DIR = Path(__file__).parent.parent / "modcomp" / "fans"


@pytest.fixture(scope="session")
def blp2():
    """Fixture for the blow-up of P^2 at a point, classes s, e and ℓ = s + e."""
    return load_target(FANS_DIR / "blp2.json")


@pytest.fixture(scope="session")
def p2():
    """Fixture for the projective plane."""
    return load_target(FANS_DIR / "p2.json")


@pytest.fixture
def mock_console():
    """Fixture for a mock rich console."""
    return MagicMock()


@pytest.fixture
def chain():
    """Fixture building a path-shaped tree from class names: chain(target, "s", "2e")."""
    def build(target, *labels, marks=()):
        classes = tuple(target.parse_class(label) for label in labels)
        edges = tuple((i, i + 1) for i in range(len(classes) - 1))
        return DecoratedTree(classes, edges, marks)
    return build


@pytest.fixture
def star():
    """Fixture building a star tree: star(target, "0", "s", "s", "2e") has hub 0."""
    def build(target, hub, *legs, marks=()):
        classes = (CurveClass.zero(target.basis.rank) if hub == "0" else target.parse_class(hub),)
        classes += tuple(target.parse_class(label) for label in legs)
        edges = tuple((0, i) for i in range(1, len(classes)))
        return DecoratedTree(classes, edges, marks)
    return build
