"""Command line entry point: parse a corpus, featurize mentions and senses.

Exit codes: 0 on success, 2 for bad input (malformed files, unknown config
keys, missing paths, out-of-range references), 1 for unexpected failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .backends import load_encoder
from .config import ExtractorConfig, load_config
from .features import (
    build_mention_records,
    collect_targets,
    featurize_sense_dictionary,
    parse_corpus,
)
from .formats import (
    InputError,
    load_sense_dictionary,
    read_occurrences,
    read_parses,
    read_raw_corpus,
    write_mention_features,
    write_parses,
)
from .parser import RuleParser

log = logging.getLogger(__name__)


def _make_parser(config: ExtractorConfig) -> RuleParser:
    if config.parser_model.startswith("builtin"):
        return RuleParser()
    raise ValueError(f"unsupported parser_model {config.parser_model!r}")


def run_parse(args, config: ExtractorConfig) -> int:
    rows = read_raw_corpus(args.corpus)
    sentences, skipped = parse_corpus(rows, _make_parser(config))
    write_parses(args.out, sentences, config)
    log.info(
        "parsed %d sentences (%d skipped) -> %s", len(sentences), len(skipped), args.out
    )
    return 0


def _sense_records(args, config: ExtractorConfig, encoder) -> list[dict]:
    dictionary = load_sense_dictionary(args.senses)
    records, skipped = featurize_sense_dictionary(
        dictionary,
        _make_parser(config),
        encoder,
        length=config.mwp_length,
        batch_size=config.batch_size,
    )
    if skipped:
        log.warning("skipped %d sense examples: %s", len(skipped), ", ".join(skipped))
    return records


def run_featurize_mentions(args, config: ExtractorConfig) -> int:
    _, sentences = read_parses(args.parses)
    by_id = {s.sentence_id: s for s in sentences}
    occurrences = read_occurrences(args.occurrences)
    targets = collect_targets(by_id, occurrences)
    encoder = load_encoder(config)
    records = build_mention_records(
        by_id, targets, encoder, length=config.mwp_length, batch_size=config.batch_size
    )
    if args.senses:
        records.extend(_sense_records(args, config, encoder))
    write_mention_features(
        args.out, records, d_emb=encoder.hidden_size, length=config.mwp_length, config=config
    )
    log.info("wrote %d mention feature records -> %s", len(records), args.out)
    return 0


def run_featurize_senses(args, config: ExtractorConfig) -> int:
    encoder = load_encoder(config)
    records = _sense_records(args, config, encoder)
    write_mention_features(
        args.out, records, d_emb=encoder.hidden_size, length=config.mwp_length, config=config
    )
    log.info("wrote %d sense example records -> %s", len(records), args.out)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evfeats",
        description="neural feature extraction front end for the event type pipeline",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="analyze a raw sentence corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=run_parse)

    p = sub.add_parser(
        "featurize-mentions", help="embed the mentions referenced by occurrences"
    )
    p.add_argument("--parses", required=True)
    p.add_argument("--occurrences", required=True)
    p.add_argument("--senses", help="also featurize dictionary example sentences")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=run_featurize_mentions)

    p = sub.add_parser(
        "featurize-senses", help="embed dictionary example sentences only"
    )
    p.add_argument("--senses", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=run_featurize_senses)
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        force=True,
    )
    try:
        config = load_config(args.config) if args.config else ExtractorConfig()
        return args.handler(args, config)
    except (InputError, FileNotFoundError, IsADirectoryError, PermissionError) as err:
        log.error("%s", err)
        return 2
    except ValueError as err:
        log.error("%s", err)
        return 2
    except Exception:  # pragma: no cover - defensive
        log.exception("unhandled error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
