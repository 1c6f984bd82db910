"""Command line entry points: serve the API, one-shot ask, build the
template base from a dataset, and run the evaluation harness."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import build_components, load_config
from .errors import DblpNlqError
from .evalharness import evaluate, load_dataset
from .session import SessionStore
from .templates import build_template_base


def _components(args):
    cfg = load_config(getattr(args, "config", None))
    return cfg, build_components(cfg)


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    cfg, components = _components(args)
    store = SessionStore(components, ttl_s=cfg.session_ttl_s,
                         cap=cfg.session_cap)
    uvicorn.run(create_app(store), host=args.host, port=args.port,
                log_level="warning")
    return 0


def _print_state(state) -> None:
    doc = state.to_dict()
    print(f"question: {doc['question']}")
    lf = doc["logical_form"]
    print(f"logical form: {lf['text'] or lf['raw_tokens'] or '(none)'}")
    for i, row in enumerate(doc["mentions"]):
        picked = row["candidates"][row["selected_index"]] \
            if row["candidates"] else None
        chosen = picked["uri"] or picked["label"] if picked else "(unlinked)"
        flag = f"  [{row['error']}]" if row["error"] else ""
        print(f"mention {i}: {row['display']} ({row['kind']}) -> {chosen}{flag}")
    for tm in doc["templates"]:
        mark = "*" if tm["rank"] - 1 == doc["selected_template"] else " "
        print(f"template {tm['rank']}{mark} d={tm['distance']:.3f} {tm['text']}")
    print(f"query: {doc['query']['sparql'] or '(none)'}")
    answers = doc["answers"]
    if answers is None:
        print("answers: (none)")
    elif answers["boolean"] is not None:
        print(f"answers: {answers['boolean']}")
    else:
        print(f"answers: {len(answers['rows'])} rows "
              f"{'(truncated)' if answers['truncated'] else ''}")
        for row in answers["rows"][:10]:
            print("  " + " | ".join(c["value"] if c else "" for c in row))
    if doc["stage_errors"]:
        for stage, err in doc["stage_errors"].items():
            print(f"error at {stage}: {err['error']}: {err['message']}")
    if doc["skipped"]:
        print(f"skipped stages: {', '.join(doc['skipped'])}")


def _cmd_ask(args) -> int:
    cfg, components = _components(args)
    store = SessionStore(components, ttl_s=cfg.session_ttl_s,
                         cap=cfg.session_cap)
    state = store.create(args.question)
    _print_state(state)
    return 0


def _cmd_build_templates(args) -> int:
    _, components = _components(args)
    items = load_dataset(args.dataset)
    base, report = build_template_base(
        [(item.id, item.gold_query) for item in items],
        components.vocab, dataset_name=str(args.dataset))
    base.save(args.out)
    print(f"built {len(base.templates)} templates from "
          f"{report.built}/{report.total} items -> {args.out}")
    for item_id, reason in report.skipped:
        print(f"  skipped {item_id}: {reason}")
    return 0


def _cmd_eval(args) -> int:
    _, components = _components(args)
    items = load_dataset(args.dataset)
    report = evaluate(components, items, mode=args.mode)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=1))
    print(report.summary())
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dblpnlq",
        description="question answering over the DBLP knowledge graph")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the session HTTP API")
    p.add_argument("--config", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("ask", help="one-shot pipeline run, printed")
    p.add_argument("question")
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_ask)

    p = sub.add_parser("build-templates",
                       help="build the template base from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_build_templates)

    p = sub.add_parser("eval", help="score the pipeline over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--mode", choices=["full", "gold-lf"], default="full")
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_eval)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DblpNlqError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
