"""Command-line front end.

Every subcommand reads its declared inputs, writes its artifacts into
``--out`` and records a ``manifest.json`` with the resolved configuration,
seed and SHA-256 digests of inputs and outputs. Exit codes: 0 success,
1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .cascade import (cascades_from_membership, detect_cascades, read_cascade_report, read_membership,
                      seed_sentiment_group, write_cascade_report, write_membership)
from .classify import classify_cascades, label_summary
from .corpus import read_corpus, write_corpus
from .errors import CascataError, DataError
from .lexicon import CategoryLexicon, SentimentLexicon, annotate_corpus, corpus_means
from .network import k_core_decomposition, read_edges, write_edges
from .stats import ccdf, fit_power_law, ks_two_sample, lrt_vs_lognormal, power_law_ccdf_line
from .synth import SynthConfig, gen_corpus, gen_graph, synth_lexicons, write_truth
from .userlevel import (METRICS, build_neighborhood, engagement_regressions, neighborhood_correlation,
                        user_features, write_features)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger("cascata")

SUBCOMMANDS = ("annotate", "cascades", "classify", "fit", "compare", "userlevel", "synth", "pipeline")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# small I/O helpers
# ---------------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def _write_tsv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return str(v)


def _load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config {path} is not a flat key = value file: {exc}") from exc
    for key, value in data.items():
        if isinstance(value, dict):
            raise UsageError(f"config {path}: nested section {key!r} not allowed")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _origin(value):
    if value in (None, "midnight", "first"):
        return value
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"--origin must be 'midnight', 'first' or an integer, got {value!r}") from None


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _load_lexicons(args):
    slex = SentimentLexicon.from_file(args.sentiment_lexicon)
    clex = CategoryLexicon.from_file(args.category_lexicon) if args.category_lexicon else CategoryLexicon()
    return slex, clex


def _read_annotated(args, path):
    corpus = read_corpus(path, window_width=args.window, origin=_origin(args.origin))
    if not corpus.is_annotated or getattr(args, "sentiment_lexicon", None):
        if not getattr(args, "sentiment_lexicon", None):
            raise DataError(f"{path} has unannotated tweets and no --sentiment-lexicon was given")
        corpus = annotate_corpus(corpus, *_load_lexicons(args))
    return corpus


# ---------------------------------------------------------------------------
# subcommand bodies; each returns {label: path} of inputs it consumed
# ---------------------------------------------------------------------------

def cmd_annotate(args, out: Path):
    _require(args, "corpus", "sentiment_lexicon")
    corpus = read_corpus(args.corpus, window_width=args.window, origin=_origin(args.origin))
    corpus = annotate_corpus(corpus, *_load_lexicons(args), keep_existing=not args.reannotate)
    write_corpus(corpus, out / "annotated.jsonl")
    means = corpus_means(corpus, args.ratio_mode)
    _write_json(out / "means.json", vars(means) | {"n_tweets": len(corpus), "skipped_lines": corpus.skipped})
    return {"corpus": args.corpus, "sentiment_lexicon": args.sentiment_lexicon,
            "category_lexicon": args.category_lexicon}


def cmd_cascades(args, out: Path):
    _require(args, "corpus", "edges")
    corpus = read_corpus(args.corpus, window_width=args.window, origin=_origin(args.origin))
    graph = read_edges(args.edges)
    cascades = detect_cascades(corpus, graph, same_window=args.same_window,
                               include_spreaders=args.include_spreaders)
    write_cascade_report(cascades, out / "cascades.tsv")
    write_membership(cascades, out / "cascade_members.tsv")
    return {"corpus": args.corpus, "edges": args.edges}


def cmd_classify(args, out: Path):
    _require(args, "corpus", "members")
    corpus = _read_annotated(args, args.corpus)
    member_of = read_membership(args.members)
    n_c = None
    if args.cascades:
        n_c = {row["cascade_id"]: row["n_c"] for row in read_cascade_report(args.cascades)}
    cascades = cascades_from_membership(corpus, member_of, n_c=n_c)
    annotations = corpus.annotations()
    means = corpus_means(corpus, args.ratio_mode)
    labels = classify_cascades(cascades, annotations, means, args.ratio_mode)
    write_cascade_report(cascades, out / "cascades_labeled.tsv",
                         {cid: lab.as_row() for cid, lab in labels.items()})
    _write_tsv(out / "label_summary.tsv", ("label", "count", "share"),
               label_summary(lab.sentiment for lab in labels.values()))
    groups = seed_sentiment_group(cascades, annotations)
    _write_tsv(out / "seed_groups.tsv", ("cascade_id", "seed_sentiment"),
               sorted((c.cascade_id, e) for e, cs in groups.items() for c in cs))
    _write_json(out / "means.json", vars(means))
    return {"corpus": args.corpus, "members": args.members, "cascades": args.cascades}


def _grouped_column(path, column, group_by):
    rows = read_cascade_report(path) if _is_cascade_report(path) else _read_generic(path)
    if not rows:
        raise DataError(f"{path} has no rows")
    if column not in rows[0]:
        raise DataError(f"{path} has no column {column!r}")
    if group_by and group_by not in rows[0]:
        raise DataError(f"{path} has no column {group_by!r}")
    groups = {}
    for row in rows:
        key = row[group_by] if group_by else "all"
        groups.setdefault(key, []).append(int(row[column]))
    return {k: np.array(v, dtype=np.int64) for k, v in sorted(groups.items())}


def _is_cascade_report(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
    return header[:2] == ["cascade_id", "seed_tweet"]


def _read_generic(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        return [dict(zip(header, line.rstrip("\n").split("\t"))) for line in fh if line.strip()]


def _fit_group(values, x_min, positive_mean):
    values = values[values > 0]
    try:
        fit = fit_power_law(values, x_min)
        lrt = lrt_vs_lognormal(values, fit, positive_mean=positive_mean)
    except DataError as exc:
        return {"error": str(exc), "n": int(values.size)}, None
    return {"alpha": fit.alpha, "xmin": fit.x_min, "sigma": fit.sigma_alpha, "ntail": fit.n_tail,
            "D": fit.D, "R": lrt.R, "p_R": lrt.p, "n": fit.n, "report": fit.report(),
            "evidence": lrt.evidence()}, fit


def cmd_fit(args, out: Path):
    _require(args, "input", "column")
    groups = _grouped_column(args.input, args.column, args.group_by)
    report = {}
    for key, values in groups.items():
        rep, fit = _fit_group(values, args.xmin, args.lognormal_mean == "positive")
        report[key] = rep
        stem = f"ccdf_{args.column}" + (f"_{key}" if args.group_by else "")
        positive = values[values > 0]
        if positive.size:
            xs, ps = ccdf(positive)
            _write_tsv(out / f"{stem}.tsv", ("x", "ccdf"), zip(xs.tolist(), ps.tolist()))
        if fit is not None:
            lx, lp = power_law_ccdf_line(fit, int(positive.max()))
            _write_tsv(out / f"{stem}_fit.tsv", ("x", "ccdf"), zip(lx.tolist(), lp.tolist()))
    _write_json(out / f"fit_{args.column}.json", report if args.group_by else report["all"])
    return {"input": args.input}


def cmd_compare(args, out: Path):
    _require(args, "input", "column", "group_by")
    groups = _grouped_column(args.input, args.column, args.group_by)
    rows = []
    for (ka, a), (kb, b) in combinations(groups.items(), 2):
        try:
            res = ks_two_sample(a, b, weighted=args.weighted, n_perm=args.n_perm, seed=args.seed,
                                workers=args.workers)
            rows.append((ka, kb, a.size, b.size, res.D, res.p, int(res.weighted)))
        except DataError:
            rows.append((ka, kb, a.size, b.size, "", "", int(args.weighted)))
    _write_tsv(out / f"ks_{args.column}_{args.group_by}.tsv",
               ("group_a", "group_b", "n_a", "n_b", "D", "p", "weighted"), rows)
    return {"input": args.input}


def _userlevel_dataset(args, corpus, graph, cores, out: Path, suffix: str):
    feats = user_features(corpus, graph, cores, args.ratio_mode)
    write_features(feats, out / f"features{suffix}.tsv")
    reg_rows = []
    reg_json = {}
    try:
        activity, integration = engagement_regressions(feats)
        for target, res in (("n", activity), ("k_c", integration)):
            cells = res.row()
            reg_rows.append([target] + [cells.get(c, "") for c in ("n", "k_c", "k_in", "k_out", "pos", "neg",
                                                                    "soc", "cog")] + [f"{res.r_squared:.3f}"])
            reg_json[target] = {"weights": res.weights, "p_values": res.p_values, "r_squared": res.r_squared,
                                "n": res.n}
    except DataError as exc:
        reg_json["error"] = str(exc)
    _write_tsv(out / f"regressions{suffix}.tsv",
               ("target", "n", "k_c", "k_in", "k_out", "pos", "neg", "soc", "cog", "R2"), reg_rows)
    _write_json(out / f"regressions{suffix}.json", reg_json)
    rows = []
    try:
        nb = build_neighborhood(feats, graph, args.weighting)
        for i, metric in enumerate(METRICS):
            res = neighborhood_correlation(feats, graph, metric, n_shuffles=args.n_shuffles,
                                           seed=args.seed + i, weighting=args.weighting,
                                           workers=args.workers, neighborhood=nb)
            rows.append((metric, res.r, res.null_mean, res.null_2sd, res.n_users, res.n_skipped))
    except DataError as exc:
        logger.warning("neighbourhood correlations skipped: %s", exc)
    _write_tsv(out / f"neighborhood{suffix}.tsv",
               ("metric", "r", "null_mean", "null_2sd", "n_users", "skipped"), rows)


def cmd_userlevel(args, out: Path):
    _require(args, "corpus", "edges")
    graph = read_edges(args.edges)
    cores = k_core_decomposition(graph, args.degree_mode)
    corpus = _read_annotated(args, args.corpus)
    _userlevel_dataset(args, corpus, graph, cores, out, "")
    inputs = {"corpus": args.corpus, "edges": args.edges}
    if args.timeline_corpus:
        timeline = _read_annotated(args, args.timeline_corpus)
        _userlevel_dataset(args, timeline, graph, cores, out, "_timeline")
        inputs["timeline_corpus"] = args.timeline_corpus
    return inputs


def _synth_config(args) -> SynthConfig:
    options = {}
    if args.synth_config:
        options.update(_load_config(args.synth_config))
    options["seed"] = args.seed
    return SynthConfig.from_mapping(options)


def cmd_synth(args, out: Path):
    cfg = _synth_config(args)
    graph = gen_graph(cfg)
    sc = gen_corpus(cfg, graph)
    write_corpus(sc.corpus, out / "corpus.jsonl")
    write_edges(graph, out / "edges.tsv")
    write_truth(sc, out / "truth.tsv")
    if cfg.with_text:
        slex, clex = synth_lexicons()
        _write_tsv(out / "sentiment_lexicon.tsv", ("lemma", "strength"), sorted(slex.entries.items()))
        _write_tsv(out / "category_lexicon.tsv", ("lemma", "category"),
                   sorted([(x, "social") for x in clex.social] + [(x, "cognitive") for x in clex.cognitive]))
    return {"synth_config": args.synth_config}


def cmd_pipeline(args, out: Path):
    """synth (optional) -> annotate -> cascades -> classify -> fit/compare -> userlevel."""
    inputs = {}
    if args.synth_config or not args.corpus:
        sub = out / "synth"
        sub.mkdir(exist_ok=True)
        inputs.update(cmd_synth(args, sub))
        cfg = _synth_config(args)
        _window_defaults(args, cfg.window_width, str(cfg.origin))
        args.corpus = str(sub / "corpus.jsonl")
        args.edges = str(sub / "edges.tsv")
        if (sub / "sentiment_lexicon.tsv").exists() and not args.sentiment_lexicon:
            args.sentiment_lexicon = str(sub / "sentiment_lexicon.tsv")
            args.category_lexicon = str(sub / "category_lexicon.tsv")
    else:
        _require(args, "corpus", "edges")
        inputs.update({"corpus": args.corpus, "edges": args.edges})
    _window_defaults(args)
    if args.sentiment_lexicon:
        sub = out / "annotate"
        sub.mkdir(exist_ok=True)
        inputs.update(cmd_annotate(args, sub))
        args.corpus = str(sub / "annotated.jsonl")
        args.sentiment_lexicon = args.category_lexicon = None

    sub = out / "cascades"
    sub.mkdir(exist_ok=True)
    cmd_cascades(args, sub)
    args.members = str(sub / "cascade_members.tsv")
    args.cascades = str(sub / "cascades.tsv")

    sub = out / "classify"
    sub.mkdir(exist_ok=True)
    cmd_classify(args, sub)
    labeled = str(sub / "cascades_labeled.tsv")
    seed_table = _seed_table(labeled, sub / "seed_groups.tsv", sub / "cascades_seed.tsv")

    fit_dir, cmp_dir = out / "fit", out / "compare"
    fit_dir.mkdir(exist_ok=True)
    cmp_dir.mkdir(exist_ok=True)
    args.input = labeled
    for column in ("n_sp", "n_c"):
        args.column = column
        for group in ("sentiment", "social", "cognitive"):
            args.group_by = group
            cmd_fit(args, fit_dir)
            cmd_compare(args, cmp_dir)
        args.input, args.group_by = seed_table, "seed_sentiment"
        cmd_compare(args, cmp_dir)
        args.input = labeled

    sub = out / "userlevel"
    sub.mkdir(exist_ok=True)
    cmd_userlevel(args, sub)
    return inputs


def _seed_table(labeled, seed_groups, dest):
    seeds = dict(line.rstrip("\n").split("\t") for line in open(seed_groups, encoding="utf-8").readlines()[1:])
    rows = read_cascade_report(labeled)
    _write_tsv(dest, ("cascade_id", "n_sp", "n_c", "seed_sentiment"),
               ((r["cascade_id"], r["n_sp"], r["n_c"], seeds[str(r["cascade_id"])]) for r in rows))
    return str(dest)


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="random seed (default $CASCATA_SEED or 0)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--verbose", "-v", action="store_true")


def _corpus_opts(p):
    p.add_argument("--corpus")
    p.add_argument("--window", type=int, default=None,
                   help="window width in seconds (default 86400, or the synth config's in a pipeline)")
    p.add_argument("--origin", default=None,
                   help="'midnight', 'first' or epoch seconds (default midnight, or the synth config's)")
    p.add_argument("--sentiment-lexicon")
    p.add_argument("--category-lexicon")
    p.add_argument("--ratio-mode", choices=("pooled", "tweet"), default="pooled")


def _cascade_opts(p):
    p.add_argument("--edges")
    p.add_argument("--no-same-window", dest="same_window", action="store_false")
    p.add_argument("--exclude-spreaders", dest="include_spreaders", action="store_false")


def _stats_opts(p):
    p.add_argument("--in", dest="input")
    p.add_argument("--column")
    p.add_argument("--group-by")
    p.add_argument("--xmin", type=int)
    p.add_argument("--lognormal-mean", choices=("positive", "free"), default="positive")
    p.add_argument("--weighted", action="store_true", help="tail-weighted KS statistic")
    p.add_argument("--n-perm", type=int, default=1000)


def _user_opts(p):
    p.add_argument("--timeline-corpus", help="second per-user corpus analysed alongside")
    p.add_argument("--degree-mode", choices=("distinct", "multi"), default="distinct")
    p.add_argument("--weighting", choices=("user", "tweet"), default="user")
    p.add_argument("--n-shuffles", type=int, default=1000)


def build_parser():
    parser = _Parser(prog="cascata", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cascata {__version__}")
    subs = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    groups = {
        "annotate": (_corpus_opts,),
        "cascades": (_corpus_opts, _cascade_opts),
        "classify": (_corpus_opts,),
        "fit": (_stats_opts,),
        "compare": (_stats_opts,),
        "userlevel": (_corpus_opts, _cascade_opts, _user_opts),
        "synth": (),
        "pipeline": (_corpus_opts, _cascade_opts, _stats_opts, _user_opts),
    }
    for name, adders in groups.items():
        p = subs.add_parser(name)
        _common(p)
        for add in adders:
            add(p)
        if name == "classify":
            p.add_argument("--members", help="tweet_id -> cascade_id TSV")
            p.add_argument("--cascades", help="cascade report supplying n_c")
        if name == "annotate":
            p.add_argument("--reannotate", action="store_true", help="ignore existing annotations")
        if name in ("synth", "pipeline"):
            p.add_argument("--synth-config", help="synthetic corpus configuration (key = value)")
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        raise UsageError(parser.format_usage() + "cascata: error: a subcommand is required")
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.subcommand]
        known = {a.dest for a in sub._actions}
        config = _load_config(args.config)
        unknown = sorted(set(config) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    if args.seed is None:
        env = os.environ.get("CASCATA_SEED")
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"CASCATA_SEED must be an integer, got {env!r}") from None
    for name in ("reannotate", "members", "cascades", "input", "column", "group_by", "xmin",
                 "timeline_corpus", "synth_config", "sentiment_lexicon", "category_lexicon", "edges",
                 "corpus"):
        if not hasattr(args, name):
            setattr(args, name, None)
    if args.subcommand != "pipeline":
        _window_defaults(args)
    defaults = {"ratio_mode": "pooled", "same_window": True,
                "include_spreaders": True, "lognormal_mean": "positive", "weighted": False, "n_perm": 1000,
                "degree_mode": "distinct", "weighting": "user", "n_shuffles": 1000}
    for name, value in defaults.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    return args


def _window_defaults(args, window=86400, origin="midnight"):
    if getattr(args, "window", None) is None:
        args.window = window
    if getattr(args, "origin", None) is None:
        args.origin = origin


def _relative(value, out: Path):
    if isinstance(value, str) and value:
        try:
            return str(Path(value).resolve().relative_to(out.resolve()))
        except ValueError:
            return value
    return value


def _manifest(args, inputs, out: Path, started):
    config = {k: _relative(v, out) for k, v in sorted(vars(args).items()) if k not in ("verbose", "out")}
    digests = {}
    for label, path in sorted(inputs.items()):
        if path and Path(path).is_file():
            digests[label] = {"path": _relative(str(path), out), "sha256": _sha256(path)}
    outputs = {}
    for p in sorted(out.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            outputs[str(p.relative_to(out))] = _sha256(p)
    return {"version": __version__, "subcommand": args.subcommand, "seed": args.seed, "config": config,
            "inputs": digests, "outputs": outputs,
            "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started))}


def run(argv=None) -> int:
    """Run one subcommand; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.time()
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except DataError as exc:
        print(f"cascata: data error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        inputs = COMMANDS[args.subcommand](args, out)
        _write_json(out / "manifest.json", _manifest(args, inputs, out, started))
    except UsageError as exc:
        print(f"cascata {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    except (CascataError, OSError) as exc:
        print(f"cascata {args.subcommand}: data error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
