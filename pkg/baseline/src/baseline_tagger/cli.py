from __future__ import annotations

import argparse
import sys

from .pipeline import MissingPipelineError
from .tagger import BaselineRun, tag_corpus


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="baseline-tagger")
    sub = parser.add_subparsers(dest="command", required=True)
    tag = sub.add_parser("tag", help="tag a dataset and write a predictions file")
    tag.add_argument("--dataset", required=True)
    tag.add_argument("--out", required=True)
    tag.add_argument("--model", default="en_core_web_sm",
                     help="spaCy pipeline name, or 'pattern-en' for the bundled tagger")
    args = parser.parse_args(argv)
    try:
        out = tag_corpus(BaselineRun(dataset=args.dataset, out=args.out, model=args.model))
    except (MissingPipelineError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
