"""Command-line surface: extract a corpus, validate an existing one.
Exit codes: 0 success, 1 extraction/validation problems, 2 usage error."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .extract import NETWORKS, ExtractionConfig, extract
from .tnsr import TnsrError, validate_corpus


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fmx", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extract", help="capture post-ReLU feature maps as TNSR files")
    e.add_argument("--network", choices=sorted(NETWORKS), required=True)
    e.add_argument("--images", required=True, metavar="DIR")
    e.add_argument("--out", required=True, metavar="DIR")
    e.add_argument("--wordwidth", type=int, choices=(8, 16, 32), default=16)
    e.add_argument("--max-images", type=int, default=None, metavar="N")
    e.add_argument("--no-pretrained", action="store_true",
                   help="use randomly initialized weights (no checkpoint download)")
    e.add_argument("--seed", type=int, default=0,
                   help="weight init seed when --no-pretrained is given")

    v = sub.add_parser("validate", help="re-check every file a manifest references")
    v.add_argument("manifest")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "extract":
        try:
            config = ExtractionConfig(
                network=args.network,
                image_dir=Path(args.images),
                out_dir=Path(args.out),
                m=args.wordwidth,
                max_images=args.max_images,
                pretrained=not args.no_pretrained,
                seed=args.seed,
            )
        except ValueError as e:
            print(f"fmx: {e}", file=sys.stderr)
            return 2
        try:
            report = extract(config)
        except Exception as e:  # weight retrieval and I/O failures
            print(f"fmx: {e}", file=sys.stderr)
            return 1
        print(
            json.dumps(
                {
                    "network": args.network,
                    "wordwidth": args.wordwidth,
                    "written": len(report.written),
                    "manifest": str(report.manifest_path) if report.manifest_path else None,
                    "errors": report.errors,
                }
            )
        )
        return 0 if report.written and not report.errors else 1

    try:
        errors = validate_corpus(args.manifest)
    except (OSError, TnsrError) as e:
        print(f"fmx: {e}", file=sys.stderr)
        return 1
    print(json.dumps({"manifest": args.manifest, "errors": errors}))
    return 0 if not errors else 1


if __name__ == "__main__":
    sys.exit(main())
