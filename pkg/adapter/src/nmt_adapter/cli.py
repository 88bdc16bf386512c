"""nmt-adapter command line: serve, sweep, translate-file."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .models import CheckpointSet, ModelError, load_model
from .server import TranslationServer
from .sweep import sweep


def cmd_serve(args):
    model = load_model(args.model, beam_size=args.beam_size)
    server = TranslationServer(model, host=args.host, port=args.port)
    print(f"serving {args.model} at {server.endpoint}/translate", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_sweep(args):
    checkpoints = CheckpointSet.parse(args.checkpoints, beam_size=args.beam_size)
    manifest = sweep(checkpoints, args.suite, args.out_dir)
    print(
        f"swept {len(manifest['checkpoints'])} checkpoints "
        f"({len(manifest['skipped'])} skipped) -> {args.out_dir}"
    )
    return 0


def cmd_translate_file(args):
    """One-shot file-protocol turn: read src.txt, write hyp.txt."""
    model = load_model(args.model, beam_size=args.beam_size)
    exchange = Path(args.dir)
    src = exchange / "src.txt"
    deadline = time.monotonic() + args.timeout
    while not src.exists():
        if time.monotonic() > deadline:
            raise ModelError(f"no {src} appeared within {args.timeout}s")
        time.sleep(0.05)
    sources = src.read_text(encoding="utf-8").splitlines()
    translations = model.translate_batch(sources)
    (exchange / "hyp.txt").write_text(
        "".join(t + "\n" for t in translations), encoding="utf-8"
    )
    print(f"translated {len(sources)} lines -> {exchange / 'hyp.txt'}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nmt-adapter",
        description="Expose NMT checkpoints behind the compoeval protocols",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="HTTP service speaking POST /translate")
    p.add_argument("--model", required=True, help="hf:<name-or-path> or phrase .tsv")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--beam-size", type=int, default=1)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("sweep", help="translate a suite with every checkpoint")
    p.add_argument(
        "--checkpoints", required=True, help="label=path,label=path,... in order"
    )
    p.add_argument("--suite", required=True, help="suite JSONL or plain text sources")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--beam-size", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("translate-file", help="answer one file-protocol exchange")
    p.add_argument("--model", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--beam-size", type=int, default=1)
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_translate_file)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
