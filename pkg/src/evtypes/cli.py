"""Command-line pipeline over documented file formats.

Subcommands: extract | select | disambiguate | featurize | cluster |
evaluate | run-all. Each one is a pure function of its input files plus the
resolved config, so rerunning with the same seed produces byte-identical
outputs and run-all equals the sequential composition of the stages.

Exit codes: 0 success, 1 internal error, 2 input error (malformed or missing
files, bad config, data that violates a documented contract). Logs go to
standard error; data only to files or standard output.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import rank_pairs_per_type, save_checkpoint, train
from .config import PipelineConfig, config_hash, load_config, resolve_seed
from .extraction import aggregate_pairs, extract_po_occurrences
from .features import assemble_pair_features, build_term_features
from .formats import (
    SCHEMA_VERSION,
    InputFormatError,
    read_labels,
    read_mention_features,
    read_occurrences,
    read_pair_features,
    read_pair_table,
    read_parses,
    read_sense_assignments,
    write_json_report,
    write_occurrences,
    write_pair_features,
    write_pair_table,
    write_sense_assignments,
)
from .metrics import ClusteringResult, metrics_report
from .salience import (
    build_salience_table,
    filter_occurrences,
    load_background_stats,
    read_salient_words,
    select_salient,
    write_salience_table,
)
from .senses import (
    build_sense_profiles,
    catch_all_sense,
    load_sense_dictionary,
    score_senses,
)

log = logging.getLogger("evtypes")


def _meta(config: PipelineConfig) -> dict:
    return {"config_hash": config_hash(config), "seed": config.seed}


def _require(value, flag: str):
    if value is None:
        raise InputFormatError("<args>", 0, f"{flag} is required (flag or config paths)")
    return value


# ---------------------------------------------------------------------------
# stage implementations (shared by the subcommands and run-all)


def run_extract(parses_path, out_occurrences, out_pairs, config: PipelineConfig) -> None:
    _, sentences = read_parses(parses_path)
    occurrences = []
    for sentence in sentences:
        occurrences.extend(extract_po_occurrences(sentence))
    meta = _meta(config)
    write_occurrences(out_occurrences, occurrences, meta)
    write_pair_table(out_pairs, aggregate_pairs(occurrences), meta)
    log.info(
        "extracted %d occurrences (%d distinct pairs) from %d sentences",
        len(occurrences),
        len(set((o.predicate_lemma, o.object_head_lemma) for o in occurrences)),
        len(sentences),
    )


def run_select(pairs_path, background_path, out_predicates, out_heads, config: PipelineConfig) -> None:
    counts = read_pair_table(pairs_path)
    background = load_background_stats(background_path)
    meta = _meta(config)
    for role, out_path in (("predicate", out_predicates), ("head", out_heads)):
        freq = Counter()
        for (pred, head), count in counts.items():
            freq[pred if role == "predicate" else head] += count
        if not freq:
            Path(out_path).write_text(
                "# format=salience_table schema_version=1\n"
                f"# tool_version={__version__}\n"
                f"# config_hash={meta['config_hash']}\n"
                f"# seed={meta['seed']}\n",
                encoding="utf-8",
            )
            log.info("no %s lemmas to select", role)
            continue
        table = build_salience_table(freq, background)
        kept = select_salient(table, config.keep_fraction)
        trimmed = table.__class__(
            entries=tuple(row for row in table.entries if row[0] in kept)
        )
        write_salience_table(trimmed, out_path, meta)
        log.info("kept %d of %d %s lemmas", len(kept), len(table), role)


def run_disambiguate(mentions_path, senses_path, out_path, config: PipelineConfig) -> None:
    header, mentions = read_mention_features(mentions_path)
    if header.get("l") is not None and header["l"] != config.mwp_length:
        raise InputFormatError(
            mentions_path,
            1,
            f"mention lists have length {header['l']}, config wants {config.mwp_length}",
        )
    dictionary = load_sense_dictionary(senses_path)
    example_features = {m.mention_id: m for m in mentions if m.kind == "sense_example"}
    entries = [entry for group in dictionary.values() for entry in group]
    profiles, skipped = build_sense_profiles(entries, example_features, limit=config.mwp_length)
    for sense_id in skipped:
        log.warning("sense %s has no example features; skipped", sense_id)
    by_lemma: dict[str, list] = {}
    for profile in profiles:
        by_lemma.setdefault(profile.lemma, []).append(profile)

    assignments = []
    fallbacks = 0
    for mention in mentions:
        if mention.kind != "predicate":
            continue
        candidates = by_lemma.get(mention.term)
        if candidates:
            scored = score_senses(mention, candidates, p=config.rbo_p, depth=config.mwp_length)
            sense_id, score = scored[0]
            if not math.isfinite(score):
                raise InputFormatError(
                    mentions_path, 1, f"{mention.mention_id}: sense scores are non-finite"
                )
        else:
            sense_id, score = catch_all_sense(mention.term), None
            fallbacks += 1
        assignments.append(
            {
                "mention_id": mention.mention_id,
                "lemma": mention.term,
                "sense_id": sense_id,
                "score": score,
            }
        )
    write_sense_assignments(out_path, assignments, _meta(config))
    log.info("assigned senses to %d predicate mentions (%d catch-all)", len(assignments), fallbacks)


def run_featurize(
    occurrences_path,
    mentions_path,
    assignments_path,
    predicates_path,
    heads_path,
    out_path,
    config: PipelineConfig,
) -> None:
    _, occurrences = read_occurrences(occurrences_path)
    _, mentions = read_mention_features(mentions_path)
    _, assignments = read_sense_assignments(assignments_path)
    salient_predicates = set(read_salient_words(predicates_path))
    salient_heads = set(read_salient_words(heads_path))

    kept = filter_occurrences(occurrences, salient_predicates, salient_heads)
    sense_by_mention = {a["mention_id"]: a["sense_id"] for a in assignments}
    predicate_mentions = {
        (m.sentence_id, m.token_index): m for m in mentions if m.kind == "predicate"
    }
    object_mentions = {
        (m.sentence_id, m.token_index): m for m in mentions if m.kind == "object_head"
    }

    pair_counts: Counter = Counter()
    pair_sentences: dict[tuple[str, str], set] = {}
    pred_groups: dict[str, dict] = {}
    obj_groups: dict[str, dict] = {}
    missing = 0
    for occ in kept:
        pm = predicate_mentions.get((occ.sentence_id, occ.predicate_index))
        om = object_mentions.get((occ.sentence_id, occ.object_head_index))
        if pm is None or om is None:
            missing += 1
            log.warning(
                "%s: no mention features for predicate %d / object %d; occurrence dropped",
                occ.sentence_id,
                occ.predicate_index,
                occ.object_head_index,
            )
            continue
        if pm.term != occ.predicate_lemma or om.term != occ.object_head_lemma:
            raise InputFormatError(
                mentions_path,
                1,
                f"{occ.sentence_id}: mention terms {pm.term!r}/{om.term!r} disagree "
                f"with occurrence lemmas {occ.predicate_lemma!r}/{occ.object_head_lemma!r}",
            )
        sense = sense_by_mention.get(pm.mention_id)
        if sense is None:
            missing += 1
            log.warning("%s: no sense assignment; occurrence dropped", pm.mention_id)
            continue
        key = (sense, occ.object_head_lemma)
        pair_counts[key] += 1
        pair_sentences.setdefault(key, set()).add(occ.sentence_id)
        pred_groups.setdefault(sense, {})[pm.mention_id] = pm
        obj_groups.setdefault(occ.object_head_lemma, {})[om.mention_id] = om

    meta = _meta(config)
    if not pair_counts:
        write_pair_features(out_path, [], meta)
        log.info("no pairs survived selection; wrote empty feature file")
        return
    pred_features = build_term_features(
        {k: list(v.values()) for k, v in pred_groups.items()}, config.pca_dim
    )
    obj_features = build_term_features(
        {k: list(v.values()) for k, v in obj_groups.items()}, config.pca_dim
    )
    pairs, dropped = assemble_pair_features(pair_counts, pred_features, obj_features, pair_sentences)
    for pred, head in dropped:
        log.warning("pair (%s, %s) lacks features on one side; dropped", pred, head)
    write_pair_features(out_path, pairs, meta)
    log.info(
        "featurized %d pairs (%d occurrences dropped, %d pairs dropped)",
        len(pairs),
        missing,
        len(dropped),
    )


def run_cluster(pairs_path, out_report, out_checkpoint, config: PipelineConfig) -> None:
    _, pairs = read_pair_features(pairs_path)
    if not pairs:
        raise InputFormatError(pairs_path, 1, "no pair features to cluster")
    h_p = np.stack([p.h_p for p in pairs])
    h_o = np.stack([p.h_o for p in pairs])
    model, assignment = train(h_p, h_o, config.train)
    ranked = rank_pairs_per_type(assignment, pairs)
    clusters = []
    for cluster_id, members in enumerate(ranked):
        entries = [
            {
                "predicate_sense": pairs[i].predicate_sense,
                "object_head": pairs[i].object_head,
                "score": float(assignment.log_likelihood[i, cluster_id]),
                "frequency": pairs[i].frequency,
            }
            for i in members
        ]
        sentence_ids = sorted({s for i in members for s in pairs[i].sentence_ids})
        clusters.append(
            {
                "cluster_id": cluster_id,
                "pairs": entries,
                "example_sentence_ids": sentence_ids,
            }
        )
    report = {
        "meta": {
            "format": "cluster_report",
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "config_hash": config_hash(config),
            "seed": config.seed,
            "k": config.train.k,
            "iterations": assignment.iterations,
            "converged": assignment.converged,
        },
        "clusters": clusters,
    }
    write_json_report(out_report, report)
    if out_checkpoint is not None:
        save_checkpoint(out_checkpoint, model)
    log.info(
        "clustered %d pairs into %d types (%d iterations, converged=%s)",
        len(pairs),
        config.train.k,
        assignment.iterations,
        assignment.converged,
    )


def run_evaluate(predicted_path, reference_path, out_path, config: PipelineConfig) -> None:
    predicted = read_labels(predicted_path)
    reference = read_labels(reference_path)
    if len(predicted) != len(reference):
        raise InputFormatError(
            predicted_path,
            0,
            f"{len(predicted)} predicted labels vs {len(reference)} reference labels",
        )
    try:
        result = ClusteringResult(predicted=tuple(predicted), reference=tuple(reference))
    except ValueError as err:
        raise InputFormatError(predicted_path, 0, str(err)) from err
    payload = {"meta": {**_meta(config), "tool_version": __version__}}
    payload.update(metrics_report(result))
    if out_path is None:
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        write_json_report(out_path, payload)


RUN_ALL_FILES = {
    "occurrences": "occurrences.jsonl",
    "pair_freq": "pair_freq.tsv",
    "salient_predicates": "salient_predicates.tsv",
    "salient_heads": "salient_heads.tsv",
    "assignments": "sense_assignments.jsonl",
    "pair_features": "pair_features.jsonl",
    "checkpoint": "model.ckpt",
    "report": "cluster_report.json",
}


def run_all(parses_path, background_path, mentions_path, senses_path, out_dir, config: PipelineConfig) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    f = {name: out / fname for name, fname in RUN_ALL_FILES.items()}
    run_extract(parses_path, f["occurrences"], f["pair_freq"], config)
    run_select(f["pair_freq"], background_path, f["salient_predicates"], f["salient_heads"], config)
    run_disambiguate(mentions_path, senses_path, f["assignments"], config)
    run_featurize(
        f["occurrences"],
        mentions_path,
        f["assignments"],
        f["salient_predicates"],
        f["salient_heads"],
        f["pair_features"],
        config,
    )
    run_cluster(f["pair_features"], f["report"], f["checkpoint"], config)


# ---------------------------------------------------------------------------
# argument parsing


def _cmd_extract(args, config):
    run_extract(
        _require(args.parses or config.paths.parses, "--parses"),
        args.out_occurrences,
        args.out_pairs,
        config,
    )
    return 0


def _cmd_select(args, config):
    run_select(
        _require(args.pairs, "--pairs"),
        _require(args.background or config.paths.background, "--background"),
        args.out_predicates,
        args.out_heads,
        config,
    )
    return 0


def _cmd_disambiguate(args, config):
    run_disambiguate(
        _require(args.mentions or config.paths.mention_features, "--mentions"),
        _require(args.senses or config.paths.senses, "--senses"),
        args.out,
        config,
    )
    return 0


def _cmd_featurize(args, config):
    run_featurize(
        _require(args.occurrences, "--occurrences"),
        _require(args.mentions or config.paths.mention_features, "--mentions"),
        _require(args.assignments, "--assignments"),
        _require(args.salient_predicates, "--salient-predicates"),
        _require(args.salient_heads, "--salient-heads"),
        args.out,
        config,
    )
    return 0


def _cmd_cluster(args, config):
    run_cluster(_require(args.pairs, "--pairs"), args.out_report, args.out_checkpoint, config)
    return 0


def _cmd_evaluate(args, config):
    run_evaluate(
        _require(args.predicted, "--predicted"),
        _require(args.reference, "--reference"),
        args.out,
        config,
    )
    return 0


def _cmd_run_all(args, config):
    run_all(
        _require(args.parses or config.paths.parses, "--parses"),
        _require(args.background or config.paths.background, "--background"),
        _require(args.mentions or config.paths.mention_features, "--mentions"),
        _require(args.senses or config.paths.senses, "--senses"),
        args.out_dir or config.paths.out_dir,
        config,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evtypes",
        description="Induce event types from dependency-parsed text.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="overrides EVTYPES_SEED and the config seed")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="pull predicate-object occurrences out of parses")
    p.add_argument("--parses")
    p.add_argument("--out-occurrences", required=True)
    p.add_argument("--out-pairs", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("select", help="score lemmas against background statistics")
    p.add_argument("--pairs", required=True)
    p.add_argument("--background")
    p.add_argument("--out-predicates", required=True)
    p.add_argument("--out-heads", required=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("disambiguate", help="assign dictionary senses to predicate mentions")
    p.add_argument("--mentions")
    p.add_argument("--senses")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_disambiguate)

    p = sub.add_parser("featurize", help="build pair feature vectors")
    p.add_argument("--occurrences", required=True)
    p.add_argument("--mentions")
    p.add_argument("--assignments", required=True)
    p.add_argument("--salient-predicates", required=True)
    p.add_argument("--salient-heads", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("cluster", help="train the latent model and emit event types")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out-report", required=True)
    p.add_argument("--out-checkpoint")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("evaluate", help="score predicted labels against a reference")
    p.add_argument("--predicted")
    p.add_argument("--reference")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("run-all", help="extract, select, disambiguate, featurize, cluster")
    p.add_argument("--parses")
    p.add_argument("--background")
    p.add_argument("--mentions")
    p.add_argument("--senses")
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_run_all)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        force=True,
    )
    try:
        config = load_config(args.config)
        config = config.with_seed(resolve_seed(args.seed, config))
        return args.func(args, config)
    except InputFormatError as err:
        log.error("%s", err)
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as err:
        log.error("%s", err)
        return 2
    except ValueError as err:
        # data-contract violations surface as ValueError from the modules
        log.error("%s", err)
        return 2
    except Exception:
        log.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
