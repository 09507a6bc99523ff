import hashlib

from rich.console import Console
from rich.panel import Panel
from rich.table import Table


def short_id(key):
    """
    A stable 8-character id for a canonical key.
    """
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:8]


def vertex_label(tree, v, target, separator=""):
    label = target.format_class(tree.classes[v])
    marks = tree.marks_at[v]
    if marks:
        label += separator + "{" + ",".join(str(m) for m in marks) + "}"
    return label


def describe_tree(tree, target):
    """
    One-line picture of a tree: a path as "s — 2e — s", a star as
    "0⟨s, s, 2e⟩", anything else as labelled vertices and edges.
    """
    labels = [vertex_label(tree, v, target) for v in range(tree.num_vertices)]
    if tree.num_vertices == 1:
        return labels[0]
    valence = tree.valence
    if max(valence) <= 2:
        start = min(v for v in range(tree.num_vertices) if valence[v] == 1)
        order, previous, current = [start], None, start
        while len(order) < tree.num_vertices:
            step = next(w for w in tree.adjacency[current] if w != previous)
            previous, current = current, step
            order.append(current)
        forward = " — ".join(labels[v] for v in order)
        backward = " — ".join(labels[v] for v in reversed(order))
        return min(forward, backward)
    hub = max(range(tree.num_vertices), key=lambda v: valence[v])
    if valence[hub] == tree.num_edges:
        legs = sorted(labels[w] for w in tree.adjacency[hub])
        return f"{labels[hub]}⟨{', '.join(legs)}⟩"
    vertices = " ".join(f"{v}:{label}" for v, label in enumerate(labels))
    edges = " ".join(f"{a}-{b}" for a, b in tree.edges)
    return f"{vertices} | {edges}"


class ReportUI:
    """
    Rich rendering of component reports.
    """

    def __init__(self):
        self.console = Console()

    def display_header(self, report, target):
        """
        Shows the run parameters.

        :param report: The ComponentReport.
        :param target: The ToricTarget it was computed on.
        """
        oracle = report.oracle if report.oracle != "unknown" else "[bold yellow]UNKNOWN (all effective classes)[/bold yellow]"
        body = (
            f"Target: [bold green]{target.name}[/bold green]\n"
            f"Class: {target.format_class(report.beta)}   Marks: {report.n}   Mode: {report.mode.value}\n"
            f"Main component dimension: {report.dim_main}   Irreducible classes: {oracle}"
        )
        self.console.print(Panel(body, title="modcomp", border_style="blue"))

    def display_trees(self, report, target):
        """
        One row per stable tree.
        """
        table = Table(title="Stable decorated trees")
        table.add_column("Id", style="cyan")
        table.add_column("Tree", style="magenta")
        table.add_column("#E", justify="right")
        table.add_column("d - d0", justify="right")
        table.add_column("Verdict")
        table.add_column("Component", style="bold green")

        for entry in report.entries:
            verdict = entry.verdict.describe()
            if entry.verdict.empty:
                verdict = f"[red]{verdict}[/red]"
            table.add_row(
                short_id(entry.key),
                describe_tree(entry.tree, target),
                str(entry.tree.num_edges),
                str(entry.offset),
                verdict,
                "yes" if entry.component else "",
            )
        self.console.print(table)

    def display_components(self, report, target, dimensions):
        """
        The components with their dimensions.

        :param dimensions: Mapping from canonical key to absolute dimension.
        """
        table = Table(title=f"Irreducible components ({len(report.components)})")
        table.add_column("Id", style="cyan")
        table.add_column("Tree", style="magenta")
        table.add_column("Offset", justify="right")
        table.add_column("Dimension", justify="right")
        for entry in report.components:
            table.add_row(
                short_id(entry.key),
                describe_tree(entry.tree, target),
                str(entry.offset),
                str(dimensions[entry.key]),
            )
        self.console.print(table)

    def display_error(self, message, details=()):
        self.console.print(f"[bold red]Error:[/bold red] {message}")
        for line in details:
            self.console.print(f"  - {line}")
