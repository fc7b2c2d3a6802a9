"""Serve the oracle over HTTP, or dump a 360-row fixture file for offline use.

Examples:
  mlm-oracle-server --port 8000
  mlm-oracle-server --dump-fixture --model synthetic-stereotype --out fixture.csv
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .backends import BackendLoadError, KNOWN_MODELS, make_scorer
from .encoding import all_vectors, vector_to_sentence


def dump_fixture(model_id: str, out_path: str, cache_dir: str | None) -> int:
    try:
        scorer = make_scorer(model_id, cache_dir=cache_dir)
    except KeyError:
        print(f"unknown model {model_id!r}; known: {', '.join(KNOWN_MODELS)}", file=sys.stderr)
        return 1
    vectors = all_vectors()
    sentences = [vector_to_sentence(v) for v in vectors]
    try:
        scored = scorer.score(sentences)
    except BackendLoadError as exc:
        print(f"cannot load {model_id}: {exc}", file=sys.stderr)
        return 2
    with open(out_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        for vector, scores in zip(vectors, scored):
            label = 1 if scores["he"] > scores["she"] else 0
            writer.writerow(list(vector) + [label])
    print(f"wrote {len(vectors)} labeled rows to {out_path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mlm-oracle-server", description=__doc__)
    parser.add_argument("--host", default=os.environ.get("ORACLE_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("ORACLE_PORT", "8000")))
    parser.add_argument(
        "--cache-dir",
        default=os.environ.get("MODEL_CACHE_DIR"),
        help="model weight cache directory (defaults to the transformers cache)",
    )
    parser.add_argument("--dump-fixture", action="store_true",
                        help="classify all 360 template examples and exit")
    parser.add_argument("--model", help="model id for --dump-fixture")
    parser.add_argument("--out", default="fixture.csv", help="fixture output path")
    args = parser.parse_args(argv)

    if args.dump_fixture:
        if not args.model:
            parser.error("--dump-fixture needs --model")
        return dump_fixture(args.model, args.out, args.cache_dir)

    import uvicorn

    from .app import create_app

    uvicorn.run(create_app(cache_dir=args.cache_dir), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
