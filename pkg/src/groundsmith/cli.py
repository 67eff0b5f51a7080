"""Command-line entry points for every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
inconsistent inputs), 3 pipeline failure (classification, grounding, or
planning).  Failures print a single machine-readable JSON line to stderr.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import ltl
from .assets import BUNDLED_WORLDS, load_bundled_lexicon, load_bundled_world
from .corpus import (
    CorpusError,
    evaluate,
    generate_corpus,
    load_corpus,
    save_corpus,
    train_templates,
)
from .frontend import FrontendError, extract_cq
from .grounding import GroundingError, GroundingLexicon, build_registry, lexicon_from_world
from .planner import PlannerError, plan
from .report import (
    default_errors_path,
    default_figure_path,
    render_accuracy_figure,
    write_error_histogram,
    write_metrics_csv,
)
from .service import bundle_for_world, create_app
from .templates import CorruptLibrary, TemplateError, instantiate, load_library, save_library
from .world import StateExplosion, WorldConfig, WorldError, action_to_str, initial_state

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PIPELINE = 3

DATA_ERRORS = (WorldError, CorpusError, OSError, json.JSONDecodeError)
PIPELINE_ERRORS = (FrontendError, GroundingError, TemplateError, PlannerError,
                   StateExplosion, ltl.LtlError)


def _fail(code: int, kind: str, detail: str) -> "SystemExit":
    click.echo(json.dumps({"error": kind, "detail": detail}), err=True)
    return SystemExit(code)


def _load_world(path: str) -> WorldConfig:
    if path in BUNDLED_WORLDS:
        return load_bundled_world(path)
    return WorldConfig.load(path)


def _load_lexicon(spec: str | None, world: WorldConfig) -> GroundingLexicon:
    if spec is None:
        return lexicon_from_world(world)
    if spec in ("seen", "unseen"):
        return load_bundled_lexicon(spec)
    return GroundingLexicon.load(spec)


@click.group()
def cli():
    """Ground natural-language robot commands to LTL and plan them."""


@cli.command("gen-corpus")
@click.option("--split", type=click.Choice(["seen", "unseen"]), required=True)
@click.option("--domain", type=click.Choice(["manipulation", "navigation"]), required=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--homonyms", is_flag=True, help="Append homonym records for failure demos.")
def gen_corpus(split, domain, seed, out, homonyms):
    """Generate one corpus split as JSON lines."""
    records = generate_corpus(split, domain, seed=seed, include_homonyms=homonyms)
    save_corpus(records, out)
    click.echo(f"wrote {len(records)} records to {out}")


@cli.command("train")
@click.option("--corpus", "corpora", type=click.Path(exists=True, dir_okay=False),
              multiple=True, required=True)
@click.option("--world", required=True,
              help="World config path or bundled name (toy_seen, ...).")
@click.option("--lexicon", default=None,
              help="Lexicon path or bundled split name; derived from the world when omitted.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def train(corpora, world, lexicon, out):
    """Learn one template per task class from corpus gold pairs."""
    w = _load_world(world)
    lex = _load_lexicon(lexicon, w)
    reg = build_registry(w, lex)
    records = []
    for path in corpora:
        records.extend(load_corpus(path))
    library = train_templates(records, reg, lex)
    save_library(library, out)
    click.echo(f"learned {len(library)} templates -> {out}")


@cli.command("eval")
@click.option("--corpus", "corpora", type=click.Path(exists=True, dir_okay=False),
              multiple=True, required=True)
@click.option("--library", "library_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--world", required=True)
@click.option("--lexicon", default=None)
@click.option("--metrics", "metrics_path", type=click.Path(dir_okay=False), required=True)
@click.option("--errors", "errors_path", type=click.Path(dir_okay=False), default=None,
              help="Error-histogram JSON path (default: alongside the CSV).")
@click.option("--figure", "figure_path", type=click.Path(dir_okay=False), default=None,
              help="Accuracy-figure PNG path (default: alongside the CSV).")
@click.option("--no-figure", is_flag=True, help="Skip figure rendering.")
@click.option("--gold-cq", is_flag=True, help="Use gold contextual queries instead of the front-end.")
@click.option("--pos/--no-pos", "pos_mode", default=True, show_default=True,
              help="Feed POS tags to the grounding function.")
def eval_cmd(corpora, library_path, world, lexicon, metrics_path, errors_path,
             figure_path, no_figure, gold_cq, pos_mode):
    """Run the pipeline over corpora and write metrics, errors, and figure."""
    w = _load_world(world)
    lex = _load_lexicon(lexicon, w)
    reg = build_registry(w, lex)
    library = load_library(library_path)
    records = []
    for path in corpora:
        records.extend(load_corpus(path))
    metrics = evaluate(records, library, lex, reg, pos_mode=pos_mode, use_gold_cq=gold_cq)
    write_metrics_csv(metrics, metrics_path)
    write_error_histogram(metrics, errors_path or default_errors_path(metrics_path))
    if not no_figure:
        render_accuracy_figure(metrics, figure_path or default_figure_path(metrics_path))
    for split in metrics.splits:
        agg = metrics.overall(split)
        click.echo(f"{split}: {agg.ltl_correct}/{agg.total} grounded LTL correct "
                   f"({agg.accuracy:.1%})")


@cli.command("plan")
@click.option("--world", required=True)
@click.option("--text", required=True)
@click.option("--library", "library_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--lexicon", default=None)
@click.option("--gamma", type=float, default=None, help="Discount (default: the world's).")
@click.option("--epsilon", type=float, default=1e-6, show_default=True)
@click.option("--horizon", type=int, default=200, show_default=True)
def plan_cmd(world, text, library_path, lexicon, gamma, epsilon, horizon):
    """Parse a command, instantiate its template, and plan it."""
    w = _load_world(world)
    lex = _load_lexicon(lexicon, w)
    reg = build_registry(w, lex)
    library = load_library(library_path)
    cq = extract_cq(text, lex)
    click.echo(f"cq: {cq}")
    template = library.get(cq.descriptor)
    if template is None:
        raise _fail(EXIT_PIPELINE, "MissingTemplate", f"no template for class {cq.descriptor}")
    grounded = instantiate(template, cq, reg, lex)
    click.echo(f"ltl: {ltl.format_ltl(grounded)}")
    result = plan(w, initial_state(w), grounded, reg,
                  gamma=gamma, epsilon=epsilon, horizon=horizon)
    click.echo(f"plan ({len(result.actions)} actions): "
               + ", ".join(action_to_str(a) for a in result.actions))
    click.echo(f"accepted: {str(result.accepted).lower()}")


@cli.command("parse")
@click.option("--text", required=True)
@click.option("--world", default="toy_4x1", show_default=True)
@click.option("--lexicon", default=None)
def parse_cmd(text, world, lexicon):
    """Extract the contextual query of a command."""
    w = _load_world(world)
    lex = _load_lexicon(lexicon, w)
    cq = extract_cq(text, lex)
    click.echo(json.dumps({"descriptor": cq.descriptor, "params": list(cq.params)}))


@cli.command("serve")
@click.option("--world", required=True)
@click.option("--library", "library_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--lexicon", default=None)
@click.option("--port", type=int, default=None,
              help="Port (default: GROUNDSMITH_PORT or 8077).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--pos/--no-pos", "pos_mode", default=True, show_default=True)
def serve_cmd(world, library_path, lexicon, port, host, pos_mode):
    """Serve the interactive session API."""
    import uvicorn

    w = _load_world(world)
    lex = _load_lexicon(lexicon, w)
    library = load_library(library_path)
    world_id = world if world in BUNDLED_WORLDS else Path(world).stem
    bundles = {world_id: bundle_for_world(w, lex)}
    if "toy_4x1" not in bundles:
        demo = load_bundled_world("toy_4x1")
        bundles["toy_4x1"] = bundle_for_world(demo)
    app = create_app(bundles, default_world=world_id, library=library, pos_mode=pos_mode)
    if port is None:
        port = int(os.environ.get("GROUNDSMITH_PORT", "8077"))
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        click.echo(json.dumps({"error": "UsageError", "detail": exc.format_message()}), err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "detail": exc.format_message()}),
                   err=True)
        return EXIT_USAGE
    except CorruptLibrary as exc:
        click.echo(json.dumps({"error": "CorruptLibrary", "detail": str(exc)}), err=True)
        return EXIT_DATA
    except PIPELINE_ERRORS as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), err=True)
        return EXIT_PIPELINE
    except DATA_ERRORS as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), err=True)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
