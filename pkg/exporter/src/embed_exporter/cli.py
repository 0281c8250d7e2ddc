"""Command-line entry point: headline CSV in, EMB1 embeddings out."""

from __future__ import annotations

import argparse
import sys

from embed_exporter.exporter import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_MODEL,
    ExportJob,
    SchemaError,
    export_embeddings,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exporter",
        description="Embed each headline of a CSV with a pretrained sentence "
        "transformer and write the vectors as an EMB1 file.",
    )
    parser.add_argument("--input", required=True,
                        help="headline CSV with date and title columns")
    parser.add_argument("--output", required=True, help="EMB1 output path")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help=f"sentence-transformer model name (default {DEFAULT_MODEL})")
    parser.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE,
                        help=f"titles per inference batch (default {DEFAULT_BATCH_SIZE})")
    parser.add_argument("--normalize", action=argparse.BooleanOptionalAction,
                        default=True, help="L2-normalize rows (default on)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        job = ExportJob(
            input_path=args.input,
            output_path=args.output,
            model_name=args.model,
            batch_size=args.batch_size,
            normalize=args.normalize,
        )
        n = export_embeddings(job)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # model load / inference failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"wrote {n} embeddings to {args.output}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
