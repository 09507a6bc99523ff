"""
Command-line front end: load a fan, run the component computation, and write
tables, a JSON report and DOT graphs.
"""
import argparse
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path

from .moduli import EmptyModuliError, ModuliError, dimension_report, irreducible_components
from .settings import configure_logging, load_settings
from .terminal import ReportUI, describe_tree, short_id, vertex_label
from .toricfan import ClassParseError, FanValidationError, load_target
from .treegen import Mode, canonical_form, contraction_poset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAN = 2
EXIT_BETA = 3
EXIT_EMPTY = 4

FANS_DIR = Path(__file__).parent / "fans"


@dataclass
class RunConfig:
    fan_path: str
    beta: str
    marks: int = 0
    mode: Mode = Mode.MAPS
    table: bool = True
    json_path: str = None
    dot_dir: str = None
    max_parts: int = None
    classes_path: str = None
    threads: int = None
    prime_check: bool = False


def _quote(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_tree_dot(tree, target, name="tree"):
    """
    Undirected DOT graph of one tree, vertices labelled "class | {marks}".
    """
    lines = [f"graph {_quote(name)} {{"]
    for v in range(tree.num_vertices):
        lines.append(f"  v{v} [label={_quote(vertex_label(tree, v, target, separator=' | '))}];")
    for a, b in tree.edges:
        lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_poset_dot(trees, target, name="contractions"):
    """
    Directed DOT graph with one node per tree and an arrow per single-edge contraction.
    """
    keyed = sorted(((canonical_form(t), t) for t in trees), key=lambda item: item[0])
    lines = [f"digraph {_quote(name)} {{"]
    for key, tree in keyed:
        lines.append(f"  t{short_id(key)} [label={_quote(describe_tree(tree, target))}];")
    for source, dest in contraction_poset([t for _, t in keyed]):
        lines.append(f"  t{short_id(source)} -> t{short_id(dest)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(report, target, dot_dir):
    """
    Writes tree_<id>.dot for every tree and poset.dot for the contraction order.
    """
    out = Path(dot_dir)
    out.mkdir(parents=True, exist_ok=True)
    for entry in report.entries:
        name = f"tree_{short_id(entry.key)}"
        (out / f"{name}.dot").write_text(emit_tree_dot(entry.tree, target, name), encoding="utf-8")
    trees = [entry.tree for entry in report.entries]
    (out / "poset.dot").write_text(emit_poset_dot(trees, target), encoding="utf-8")


def resolve_fan_path(path, base_dir=FANS_DIR):
    """
    Returns path itself when it exists, else the bundled fan of that name.

    Bundled names may not climb out of the fans directory.
    """
    if Path(path).exists():
        return str(path)
    name = path if Path(path).suffix else f"{path}.json"
    if ".." in Path(name).parts or Path(name).is_absolute():
        return str(path)
    base = Path(base_dir).resolve()
    candidate = (base / name).resolve()
    if candidate.parent != base or not candidate.exists():
        return str(path)
    return str(candidate)


def run(config, ui=None):
    """
    Runs one computation end to end.

    :param config: The RunConfig.
    :param ui: A ReportUI; a fresh one by default.
    :return: The process exit status.
    """
    ui = ui or ReportUI()
    try:
        target = load_target(resolve_fan_path(config.fan_path), config.classes_path)
    except FanValidationError as e:
        ui.display_error(f"invalid fan {config.fan_path}", e.violations)
        return EXIT_FAN
    except (OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        ui.display_error(f"cannot read fan {config.fan_path}: {e}")
        return EXIT_FAN

    try:
        beta = target.parse_class(config.beta)
    except ClassParseError as e:
        ui.display_error(f"malformed class '{config.beta}': {e}")
        return EXIT_BETA

    try:
        report = irreducible_components(
            target,
            beta,
            config.marks,
            config.mode,
            max_parts=config.max_parts,
            threads=config.threads,
            prime_check=config.prime_check,
        )
    except EmptyModuliError as e:
        ui.display_error(str(e))
        return EXIT_EMPTY
    except ModuliError as e:
        ui.display_error(str(e))
        return EXIT_BETA

    if config.table:
        ui.display_header(report, target)
        ui.display_trees(report, target)
        ui.display_components(report, target, dimension_report(report))
    if config.json_path:
        report.save(config.json_path, target)
        logger.info("Wrote %s", config.json_path)
    if config.dot_dir:
        write_dot(report, target, config.dot_dir)
        logger.info("Wrote DOT files to %s", config.dot_dir)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="modcomp",
        description="Irreducible components of genus-0 stable map and quasimap spaces to toric varieties.",
    )
    parser.add_argument("--fan", required=True, help="fan file (JSON or TOML)")
    parser.add_argument("--beta", required=True, help='curve class, e.g. "2,2" or "2s+2e"')
    parser.add_argument("--marks", type=int, default=0, help="number of marked points")
    parser.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.MAPS.value)
    parser.add_argument("--json", dest="json_path", help="write the JSON report here")
    parser.add_argument("--dot", dest="dot_dir", help="write DOT files into this directory")
    parser.add_argument("--table", dest="table", action="store_true", default=True, help="print tables (default)")
    parser.add_argument("--no-table", dest="table", action="store_false", help="skip the tables")
    parser.add_argument("--max-parts", type=int, help="bound on nonzero vertices per tree")
    parser.add_argument("--classes", dest="classes_path", help="file overriding the irreducible classes")
    parser.add_argument("--threads", type=int, help="scoring threads (overrides MODCOMP_THREADS)")
    parser.add_argument("--config", default="modcomp.json", help="engine settings file")
    parser.add_argument("--prime-check", action="store_true", help="cross-check cohomology over a prime field")
    parser.add_argument("--debug", action="store_true", help="verbose logging")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    configure_logging(args.debug)
    settings = load_settings(args.config)
    if settings["debug_mode"]:
        configure_logging(True)
    config = RunConfig(
        fan_path=args.fan,
        beta=args.beta,
        marks=args.marks,
        mode=Mode(args.mode),
        table=args.table,
        json_path=args.json_path,
        dot_dir=args.dot_dir,
        max_parts=args.max_parts if args.max_parts is not None else settings["max_parts"],
        classes_path=args.classes_path,
        threads=args.threads if args.threads is not None else settings["threads"],
        prime_check=args.prime_check or bool(settings["prime_check"]),
    )
    return run(config)
