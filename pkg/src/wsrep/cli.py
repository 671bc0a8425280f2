"""Command-line entry point.

Every subcommand prints one JSON document (to stdout, or to ``--out``) that
includes the effective configuration.  Settings resolve as command-line flag, then the
``--config`` JSON file, then the built-in default.  Domain errors exit with
status 1 and a JSON error object on stderr; usage errors exit with 2.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import asdict, dataclass, fields
from functools import wraps
from pathlib import Path
from typing import Any, Callable

import click

from .errors import WsrepError


@dataclass(frozen=True)
class CliConfig:
    store: str | None = None
    stop_general: str | None = None
    stop_boilerplate: str | None = None
    rules: str | None = None
    sim_method: str = "ExactStem"
    alpha: float = 0.8
    walk_d: float = 0.15
    walk_k: int = 5
    walk_budget: int = 10**7
    vr_kind: str = "B"
    seed: int = 0
    lam: float = 0.9
    match_threshold: float = 0.1
    overlap_threshold: int = 1
    select_threshold: float = 0.5
    max_results: int = 10

    def pipeline(self):
        from .text.pipeline import DEFAULT_PIPELINE, TextPipeline

        if self.stop_general is None and self.stop_boilerplate is None:
            return DEFAULT_PIPELINE
        return TextPipeline.from_files(self.stop_general, self.stop_boilerplate)


_FIELDS = {f.name for f in fields(CliConfig)}


def _resolve(flags: dict[str, Any], config_path: str | None) -> CliConfig:
    file_values: dict[str, Any] = {}
    if config_path:
        try:
            file_values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise click.BadParameter(f"cannot read config: {exc}", param_hint="--config") from exc
        if not isinstance(file_values, dict):
            raise click.BadParameter("config must be a JSON object", param_hint="--config")
        unknown = sorted(set(file_values) - _FIELDS)
        if unknown:
            raise click.BadParameter(f"unknown config keys: {', '.join(unknown)}", param_hint="--config")
    values = {**file_values, **{k: v for k, v in flags.items() if k in _FIELDS and v is not None}}
    return CliConfig(**values)


def _write(text: str) -> None:
    """Send command output to ``--out`` when given, else stdout."""
    out = click.get_current_context().meta.get("wsrep.out")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _emit(obj: dict[str, Any]) -> None:
    _write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _command(fn: Callable) -> Callable:
    """Resolve the config and turn domain errors into exit status 1."""

    @click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON config file.")
    @click.option("--store", type=click.Path(file_okay=False), help="Store directory.")
    @click.option("--out", type=click.Path(dir_okay=False), help="Write the output here instead of stdout.")
    @wraps(fn)
    def wrapper(config_path, out, **flags):
        click.get_current_context().meta["wsrep.out"] = out
        cfg = _resolve(flags, config_path)
        if cfg.store is None:
            raise click.UsageError("a store is required (--store or the config file)")
        rest = {k: v for k, v in flags.items() if k not in _FIELDS}
        try:
            fn(cfg, **rest)
        except (WsrepError, ValueError, KeyError) as exc:
            err = {"error": type(exc).__name__, "message": str(exc)}
            click.echo(json.dumps(err, sort_keys=True), err=True)
            sys.exit(1)

    return wrapper


def _stoplist_options(fn):
    fn = click.option("--stop-general", type=click.Path(dir_okay=False, exists=True),
                      help="General English stoplist file.")(fn)
    fn = click.option("--stop-boilerplate", type=click.Path(dir_okay=False, exists=True),
                      help="WSDL boilerplate stoplist file.")(fn)
    return fn


def _open(cfg: CliConfig, writable: bool = False):
    from .store import Store

    return Store(cfg.store, writable=writable)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Web-service representations, discovery and recommendation."""


@main.command()
@click.option("--manifest", required=True, type=click.Path(dir_okay=False), help="JSON-lines manifest.")
@click.option("--online/--offline", default=False, help="Check WSDL availability over HTTP.")
@click.option("--timeout", type=float, default=10.0, show_default=True)
@click.option("--language-threshold", type=float, default=0.10, show_default=True)
@_command
def ingest(cfg: CliConfig, manifest, online, timeout, language_threshold):
    """Parse a corpus manifest into the store."""
    from .ingest import ingest_corpus, load_manifest

    man = load_manifest(manifest)
    with _open(cfg, writable=True) as store:
        report = ingest_corpus(
            man, store, check_online=online, timeout=timeout, language_threshold=language_threshold
        )
    _emit({"config": asdict(cfg), "report": report.to_dict()})


@main.command("build-reps")
@_stoplist_options
@_command
def build_reps(cfg: CliConfig):
    """Build the baseline representation of every service."""
    from .workflows import build_baselines

    with _open(cfg, writable=True) as store:
        n = build_baselines(store, cfg.pipeline())
    _emit({"config": asdict(cfg), "built": {"B": n}})


@main.command()
@click.option("--rules", type=click.Path(dir_okay=False, exists=True), help="Rule file (default: bundled).")
@click.option("--xml", "xml_path", type=click.Path(dir_okay=False), help="Also write annotations as XML.")
@_stoplist_options
@_command
def tag(cfg: CliConfig, xml_path):
    """Annotate descriptions and build the RBTT representation."""
    from .rbtt import export_annotations_xml, load_rules
    from .workflows import tag_corpus

    rules = load_rules(cfg.rules)
    with _open(cfg, writable=True) as store:
        summary = tag_corpus(store, rules, cfg.pipeline())
        if xml_path:
            lines = [
                export_annotations_xml(store.list_annotations(s.id), s.id) for s in store.list_services()
            ]
            Path(xml_path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    _emit({"config": asdict(cfg), "summary": summary.to_dict()})


@main.command()
@click.option("--sim-method", type=click.Choice(["ExactStem", "CorpusNGD"]), default=None)
@click.option("--alpha", type=click.FloatRange(0, 1), default=None)
@_stoplist_options
@_command
def graph(cfg: CliConfig):
    """Build the service dependency graph."""
    from .depgraph import SimilarityConfig, build_dependency_graph

    sim = SimilarityConfig(cfg.sim_method, cfg.alpha)
    with _open(cfg, writable=True) as store:
        g = build_dependency_graph(store, sim, pipeline=cfg.pipeline())
        store.put_graph(g)
    _emit({"config": asdict(cfg), "nodes": len(g.nodes), "edges": len(g.edges),
           "out_degree": g.out_degree})


@main.command()
@click.option("--walk-d", type=float, default=None, help="Random jump probability (default 0.15).")
@click.option("--walk-k", type=int, default=None, help="Maximum path length (default 5).")
@click.option("--walk-budget", type=int, default=None)
@click.option("--vr-kind", type=click.Choice(["B", "RBTT"]), default=None)
@click.option("--lambda", "lam", type=click.FloatRange(0, 1), default=None, help="Rating inclusion factor.")
@_command
def reputation(cfg: CliConfig):
    """Compute symbolic reputations and report numeric ones."""
    from .discovery import stored_reputations
    from .reputation import NumericReputationConfig, WalkConfig, compute_symbolic_reputations

    walk = WalkConfig(cfg.walk_d, cfg.walk_k, cfg.walk_budget)
    with _open(cfg, writable=True) as store:
        results = compute_symbolic_reputations(store, walk, cfg.vr_kind)
        numeric = stored_reputations(store, [s.id for s in store.list_services()],
                                     NumericReputationConfig(cfg.lam))
    _emit({
        "config": asdict(cfg),
        "symbolic": {r.service_id: sorted(r.terms) for r in results},
        "numeric": numeric,
    })


@main.command()
@click.option("--query", "query_path", required=True, type=click.Path(dir_okay=False, exists=True))
@click.option("--seed", type=int, default=None, help="Seed for the random fallback pick.")
@click.option("--match-threshold", type=click.FloatRange(0, 1), default=None)
@click.option("--select-threshold", type=click.FloatRange(0, 1), default=None)
@click.option("--lambda", "lam", type=click.FloatRange(0, 1), default=None)
@_stoplist_options
@_command
def discover(cfg: CliConfig, query_path):
    """Run a discovery query."""
    from .discovery import Query, discover as run
    from .reputation import NumericReputationConfig

    try:
        raw = json.loads(Path(query_path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise click.BadParameter(f"query is not JSON: {exc}", param_hint="--query") from exc
    raw.setdefault("match_threshold", cfg.match_threshold)
    if click.get_current_context().params.get("match_threshold") is not None:
        raw["match_threshold"] = cfg.match_threshold
    query = Query.from_dict(raw)
    with _open(cfg) as store:
        result = run(
            query,
            store,
            rng=random.Random(cfg.seed),
            select_threshold=cfg.select_threshold,
            reputation_cfg=NumericReputationConfig(cfg.lam),
            pipeline=cfg.pipeline(),
        )
    _emit({"config": asdict(cfg), "query": query.to_dict(), **result.to_dict()})


@main.command()
@click.option("--target", required=True, help="Service id of the discovered service.")
@click.option("--overlap-threshold", type=click.IntRange(min=1), default=None)
@click.option("--max-results", type=click.IntRange(min=1), default=None)
@click.option("--vr-kind", type=click.Choice(["B", "RBTT"]), default=None)
@click.option("--lambda", "lam", type=click.FloatRange(0, 1), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@_command
def recommend(cfg: CliConfig, target, fmt):
    """Recommend services related to a target via its symbolic reputation."""
    from .recommend import RecommendationConfig, recommend as run
    from .reputation import NumericReputationConfig

    rc = RecommendationConfig(cfg.overlap_threshold, cfg.max_results)
    with _open(cfg) as store:
        rec = run(target, store, rc, vr_kind=cfg.vr_kind, reputation_cfg=NumericReputationConfig(cfg.lam))
    if fmt == "text":
        _write(rec.to_text() + "config: " + json.dumps(asdict(cfg), sort_keys=True) + "\n")
    else:
        _emit({"config": asdict(cfg), **rec.to_dict()})


@main.command("eval")
@click.option("--categories", required=True, help="Comma-separated category names.")
@click.option("--kinds", default="B,RBTT", show_default=True, help="Comma-separated representation kinds.")
@click.option("--template", default="{category}", show_default=True, help="Query template.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Write the CSV report here.")
@click.option("--markdown", "md_path", type=click.Path(dir_okay=False), help="Write the Markdown table here.")
@_stoplist_options
@_command
def evaluate(cfg: CliConfig, categories, kinds, template, csv_path, md_path):
    """Per-category precision/recall of each representation."""
    from .evaluation import run_category_experiment

    cats = [c.strip() for c in categories.split(",") if c.strip()]
    ks = [k.strip() for k in kinds.split(",") if k.strip()]
    with _open(cfg) as store:
        report = run_category_experiment(store, cats, ks, template, cfg.pipeline())
    csv_text, md_text = report.to_csv(), report.to_markdown()
    if csv_path:
        Path(csv_path).write_text(csv_text, encoding="utf-8")
    if md_path:
        Path(md_path).write_text(md_text, encoding="utf-8")
    _emit({"config": asdict(cfg), **report.to_dict(), "csv": csv_text, "markdown": md_text})


def _jsonl(path: str) -> list[dict[str, Any]]:
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if line.strip() and not line.lstrip().startswith("#"):
            try:
                rows.append(json.loads(line))
            except ValueError as exc:
                raise click.BadParameter(f"{path}:{lineno}: {exc}") from exc
    return rows


@main.command("import")
@click.option("--ratings", type=click.Path(dir_okay=False, exists=True),
              help='JSON lines {"service_id", "score", "age_days"}.')
@click.option("--qos", type=click.Path(dir_okay=False, exists=True),
              help='JSON lines {"service_id", "attribute", "value", "direction"}.')
@_command
def import_(cfg: CliConfig, ratings, qos):
    """Load consumer ratings and QoS advertisements.

    Every row is validated before anything is written, so a bad file
    leaves the store untouched.
    """
    from .errors import ReferentialIntegrity
    from .store import QoSAdvertisement, RatingRecord

    rating_rows = [
        RatingRecord(row["service_id"], row["score"], row.get("age_days", 0.0))
        for row in (_jsonl(ratings) if ratings else [])
    ]
    qos_rows = [
        QoSAdvertisement(row["service_id"], row["attribute"], row["value"], row.get("direction", "HigherBetter"))
        for row in (_jsonl(qos) if qos else [])
    ]
    with _open(cfg, writable=True) as store:
        unknown = sorted({r.service_id for r in [*rating_rows, *qos_rows]} - {s.id for s in store.list_services()})
        if unknown:
            raise ReferentialIntegrity(f"unknown service ids: {', '.join(unknown)}")
        with store.batch():
            for r in rating_rows:
                store.put_rating(r)
            for q in qos_rows:
                store.put_qos(q)
    n_r, n_q = len(rating_rows), len(qos_rows)
    _emit({"config": asdict(cfg), "imported": {"ratings": n_r, "qos": n_q}})


if __name__ == "__main__":  # pragma: no cover
    main()
