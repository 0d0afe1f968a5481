"""Command-line front end: scripted simulations, turn statistics, dev tools.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .assets import asset_path
from .embeddings import load_vectors
from .keywords import Keyword, SimpleTokenizer
from .scenario import load_scenario, run_scenario
from .stats import format_stats_table, parse_transcript, turn_stats
from .templates import load_templates, realize, select_template
from .wmd import nbow, to_similarity, wmd

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tvcompanion",
                     description="TV-watching companion robot brain tools")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scripted scenario deterministically")
    sim.add_argument("scenario", help="scenario JSON file")
    sim.add_argument("--transcript", help="write the transcript JSONL here")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sim.add_argument("--json", action="store_true", help="print the summary as JSON")

    st = sub.add_parser("stats", help="turn statistics over transcript files")
    st.add_argument("transcripts", nargs="+", help="transcript JSONL files")

    wq = sub.add_parser("wmd", help="distance, similarity, and plan for two texts")
    wq.add_argument("text_a")
    wq.add_argument("text_b")
    wq.add_argument("--vectors", default=None, help="word-vector file (default: bundled)")

    gen = sub.add_parser("gen", help="generate an utterance for a keyword")
    gen.add_argument("keyword")
    gen.add_argument("--kind", choices=["disclosure", "question"], default="question")
    gen.add_argument("--templates", default=None, help="template file (default: bundled)")
    gen.add_argument("--vectors", default=None, help="word-vector file (default: bundled)")

    srv = sub.add_parser("serve", help="run the session service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--data-dir", default="data", help="transcript directory")
    srv.add_argument("--vectors", default=None)
    srv.add_argument("--templates", default=None)
    srv.add_argument("--stopwords", default=None)
    srv.add_argument("--user-dictionary", default=None)
    srv.add_argument("--engines-dir", default=None,
                     help="directory with tv_program/daily_life/news_sns .jsonl files")
    srv.add_argument("--generative-url", default=None,
                     help="external generative endpoint (optional)")
    srv.add_argument("--ui-dir", default="frontend/dist",
                     help="built web UI to mount at /ui (skipped when missing)")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario, seed_override=args.seed)
    result = run_scenario(scenario, transcript_out=args.transcript)
    summary = result.summary()
    if args.json:
        print(json.dumps(summary, ensure_ascii=False, indent=2))
        return 0
    print(f"conversations: {summary['conversations']}")
    print(f"turns per conversation: {summary['turns_per_conversation']}")
    mean = summary["mean_turns"]
    print(f"mean turns: {'-' if mean is None else f'{mean:.2f}'}")
    print(f"max turns: {summary['max_turns'] if summary['max_turns'] is not None else '-'}")
    print(f"utterance slots: {summary['utterance_slots']}")
    uses = ", ".join(f"{surface}@{seq}" for surface, seq in summary["keyword_uses"])
    print(f"keyword uses: {uses if uses else '-'}")
    if args.transcript:
        print(f"transcript written to {args.transcript}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    groups = []
    for path in args.transcripts:
        if not Path(path).exists():
            print(f"error: no such transcript: {path}", file=sys.stderr)
            return DATA_ERROR
        entries = parse_transcript(path)
        groups.append((Path(path).name, turn_stats(entries)))
    print(format_stats_table(groups))
    return 0


def _cmd_wmd(args: argparse.Namespace) -> int:
    store = load_vectors(args.vectors or asset_path("vectors.txt"))
    tokenizer = SimpleTokenizer()
    doc_a = nbow(tokenizer.tokenize(args.text_a), store)
    doc_b = nbow(tokenizer.tokenize(args.text_b), store)
    distance, plan = wmd(doc_a, doc_b, store)
    print(f"distance: {distance:.6f}")
    print(f"similarity: {to_similarity(distance):.6f}")
    print("plan:")
    for (src, dst), mass in sorted(plan.flows.items()):
        print(f"  {src} -> {dst}: {mass:.6f}")
    print(f"source marginal sum: {sum(plan.marginal_source().values()):.6f}")
    print(f"target marginal sum: {sum(plan.marginal_target().values()):.6f}")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    store = load_vectors(args.vectors or asset_path("vectors.txt"))
    corpus = load_templates(args.templates or asset_path("templates.tsv"), store=store)
    keyword = Keyword(surface=args.keyword.lower(), source="detection", first_seen=0.0)
    template = select_template(keyword, args.kind, corpus, store)
    utterance = realize(template, keyword)
    print(utterance.text)
    print(f"template id: {template.id}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import ServiceSettings, create_app

    engines = None
    if args.engines_dir:
        engines = {
            engine_id: Path(args.engines_dir) / f"{engine_id}.jsonl"
            for engine_id in ("tv_program", "daily_life", "news_sns")
        }
    settings = ServiceSettings(
        data_dir=Path(args.data_dir),
        vectors=Path(args.vectors) if args.vectors else asset_path("vectors.txt"),
        templates=Path(args.templates) if args.templates else asset_path("templates.tsv"),
        stopwords=Path(args.stopwords) if args.stopwords else asset_path("stopwords.txt"),
        user_dictionary=Path(args.user_dictionary) if args.user_dictionary else None,
        engines=engines,
        generative_url=args.generative_url,
        frontend_dist=Path(args.ui_dir) if args.ui_dir else None,
    )
    app = create_app(settings)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "simulate": _cmd_simulate,
        "stats": _cmd_stats,
        "wmd": _cmd_wmd,
        "gen": _cmd_gen,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError, KeyError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
