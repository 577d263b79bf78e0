"""Interval-scaled IR evaluation measures from the command line.

Every subcommand writes one table (CSV with a header row, or JSON) to
``--out`` or standard output. Exit codes: 0 success, 2 input error,
3 capacity error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .embeddings import embed_f1, embed_precision, embed_recall
from .exceptions import CapacityError, IntervalIRError, NumericalError, ParseError
from .interval_map import ranked_scores
from .measures import MeasureSpec, ScoreMatrix, score_matrix
from .run_space import (
    QUANTUM,
    RunTriple,
    _strategy,
    analyze_scale,
    enumerate_scale,
    enumeration_cap,
    find_order_disagreement,
    subset_sum_index,
)
from .scale_cache import ScaleCache
from .stats import TEST_NAMES, overall_correlation, significance_change_report, topicwise_correlation
from .trec_io import judge_and_cut, parse_qrels, parse_run_file

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_NUMERICAL = 0, 2, 3, 4

DEFAULTS = {
    "measure": "P",
    "cutoff": "10",
    "alpha": 0.05,
    "ties": "unq",
    "format": "csv",
    "jobs": 1,
    "mode": "self",
    "tests": ",".join(TEST_NAMES),
    "k_max": None,
    "n_max": None,
    "rb": None,
}
#: keys accepted in a --config file (flag names with dashes as underscores)
CONFIG_KEYS = {"measure", "cutoff", "qrels", "runs", "alpha", "ties", "cache_dir",
               "max_enum_n", "format", "out", "jobs", "mode", "tests", "rb", "n_max",
               "k_max", "versus", "triples"}
#: run length beyond which `steps` streams values instead of materialising them
STEPS_STREAM_N = 24


@dataclass
class AnalysisConfig:
    measures: List[str]
    cutoffs: List[int]
    alpha: float = 0.05
    ties: str = "unq"
    caps: Optional[Dict[str, int]] = None
    cache_dir: Optional[str] = None
    format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ParseError(f"alpha must lie in (0, 1), got {self.alpha}")
        if any(c < 1 for c in self.cutoffs):
            raise ParseError(f"cutoffs must be >= 1, got {self.cutoffs}")

    def specs(self) -> List[MeasureSpec]:
        """Every measure at every cutoff; labels like ``P@5`` fix their own cutoff."""
        out = []
        for label in self.measures:
            if "@" in label:
                out.append(MeasureSpec.parse(label))
            else:
                out.extend(MeasureSpec.parse(label, c) for c in self.cutoffs)
        return out

    def cache(self) -> ScaleCache:
        return ScaleCache(self.cache_dir, caps=self.caps)


# ---------------------------------------------------------------- config

def read_config(path) -> Dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            key, sep, value = text.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or not key:
                raise ParseError(f"expected key=value, got {text!r}", line=line_no, source=path)
            if key not in CONFIG_KEYS:
                raise ParseError(f"unknown config key {key!r}", line=line_no, source=path)
            out[key] = value.strip()
    return out


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from the defaults. Flags win."""
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in conf.items():
        if getattr(args, key, None) is None:
            if key == "runs":
                value = value.split()
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _int_list(text) -> List[int]:
    """``"5,10,20"`` or ``"1-15"`` (or a mix) as a sorted list of ints."""
    out = set()
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.update(range(int(lo), int(hi) + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise ParseError(f"invalid integer list {text!r}") from None
    if not out:
        raise ParseError(f"empty integer list {text!r}")
    return sorted(out)


def _optional_int(value) -> Optional[int]:
    if value is None or value == "":
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"expected an integer, got {value!r}") from None


def build_config(args) -> AnalysisConfig:
    max_n = _optional_int(getattr(args, "max_enum_n", None))
    caps = {"exhaustive": max_n, "subset_sum": max_n} if max_n is not None else None
    try:
        alpha = float(args.alpha)
        jobs = int(args.jobs)
    except ValueError as err:
        raise ParseError(str(err)) from None
    if args.ties not in ("unq", "mid", "min", "max"):
        raise ParseError(f"unknown tie strategy {args.ties!r}")
    if args.format not in ("csv", "json"):
        raise ParseError(f"unknown output format {args.format!r}")
    measures = [m.strip() for m in str(args.measure).split(",") if m.strip()]
    return AnalysisConfig(measures, _int_list(args.cutoff), alpha, args.ties, caps,
                          getattr(args, "cache_dir", None), args.format, jobs)


# ---------------------------------------------------------------- input

def _run_paths(runs: Sequence[str]) -> List[Path]:
    paths = []
    for item in runs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(q for q in p.iterdir() if q.is_file() and not q.name.startswith(".")))
        else:
            paths.append(p)
    if not paths:
        raise ParseError("no run files given")
    return paths


def load_records(runs: Sequence[str]):
    records = []
    for path in _run_paths(runs):
        recs = parse_run_file(path)
        if not recs:
            raise ParseError("run file contains no records", source=str(path))
        records.extend(recs)
    return records


@dataclass
class Collection:
    """Parsed runs and qrels; judged runs are cut lazily per cutoff."""

    records: list
    qrels: object
    _judged: Dict[int, list] = field(default_factory=dict)

    def matrix(self, spec: MeasureSpec) -> ScoreMatrix:
        n = spec.cutoff_n
        if n not in self._judged:
            self._judged[n] = judge_and_cut(self.records, self.qrels, n)
        return score_matrix(spec, self._judged[n], self.qrels)


def load_collection(args) -> Collection:
    if not args.runs:
        raise ParseError("--runs is required")
    if not args.qrels:
        raise ParseError("--qrels is required")
    return Collection(load_records(args.runs), parse_qrels(args.qrels))


# ---------------------------------------------------------------- output

def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return f"{float(value):.8f}"
    return "" if value is None else str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else round(float(value), 8)
    return value


def write_table(header: Sequence[str], rows: Iterable[Sequence], fmt: str, out) -> None:
    """Write rows as CSV (streamed) or as a JSON array of objects."""
    if fmt == "json":
        data = [dict(zip(header, map(_json_value, row))) for row in rows]
        out.write(json.dumps(data, indent=2))
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _write_atomic(path: Path, header, rows, fmt: str) -> None:
    # a failure midway leaves no partial output file behind
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            write_table(header, rows, fmt, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _rank_value(value, ties):
    return int(value) if ties != "mid" else float(value)


# ---------------------------------------------------------------- commands

def cmd_measure(args, conf: AnalysisConfig):
    coll = load_collection(args)
    header = ("measure", "topic", "system", "value")

    def rows():
        for spec in conf.specs():
            m = coll.matrix(spec)
            for i, t in enumerate(m.topics):
                for j, s in enumerate(m.systems):
                    yield spec.name, t, s, float(m.cells[i, j])
            for s, mean in zip(m.systems, m.column_means()):
                yield spec.name, "all", s, float(mean)
    return header, rows()


def cmd_rankmap(args, conf: AnalysisConfig):
    coll = load_collection(args)
    cache = conf.cache()
    header = ("measure", "topic", "system", "raw", "rank", "rb")

    def rows():
        for spec in conf.specs():
            m = coll.matrix(spec)
            r = ranked_scores(m, cache=cache, ties=conf.ties, n_jobs=conf.jobs)
            for i, t in enumerate(m.topics):
                rb = r.scale_rb[i]
                for j, s in enumerate(m.systems):
                    yield (spec.name, t, s, float(m.cells[i, j]),
                           _rank_value(r.cells[i, j], conf.ties), "inf" if rb is None else rb)
    return header, rows()


def _single_spec(conf: AnalysisConfig) -> MeasureSpec:
    specs = conf.specs()
    if len(specs) != 1:
        raise ParseError(f"this command takes one measure and one cutoff, got {len(specs)}")
    return specs[0]


def cmd_steps(args, conf: AnalysisConfig):
    spec = _single_spec(conf)
    n = spec.cutoff_n
    rb = _optional_int(args.rb)
    if spec.depends_on_rb and rb is None:
        raise ParseError(f"{spec.kind} needs --rb")
    header = ("index", "value", "multiplicity")
    streaming = (n > STEPS_STREAM_N and _strategy(spec) in ("subset_sum", "subset_sum_rbp"))
    if streaming:
        cap = enumeration_cap(spec, conf.caps)
        if n > cap:
            raise CapacityError(f"enumerating {spec.kind} runs of length {n} exceeds the cap "
                                f"of {cap}; raise it with --max-enum-n")

        def rows():
            index = 0
            for quanta, counts in subset_sum_index(spec, n, rb).iter_values(conf.jobs):
                for q, c in zip(quanta, counts):
                    index += 1
                    yield index, float(q) * QUANTUM, int(c)
        return header, rows()
    scale = enumerate_scale(spec, n, rb, caps=conf.caps, n_jobs=conf.jobs)
    return header, ((i + 1, float(v), int(c))
                    for i, (v, c) in enumerate(zip(scale.values, scale.counts)))


def cmd_space(args, conf: AnalysisConfig):
    rb = _optional_int(args.rb)
    header = ("measure", "n", "rb", "distinct")

    def rows():
        for spec in conf.specs():
            if spec.depends_on_rb and rb is None:
                raise ParseError(f"{spec.kind} needs --rb")
            n = spec.cutoff_n
            if n > STEPS_STREAM_N and _strategy(spec) in ("subset_sum", "subset_sum_rbp"):
                cap = enumeration_cap(spec, conf.caps)
                if n > cap:
                    raise CapacityError(f"enumerating {spec.kind} runs of length {n} exceeds "
                                        f"the cap of {cap}; raise it with --max-enum-n")
                size = len(subset_sum_index(spec, n, rb))
            else:
                size = len(enumerate_scale(spec, n, rb, caps=conf.caps, n_jobs=conf.jobs))
            yield spec.name, n, "inf" if rb is None else rb, size
    return header, rows()


def _ranked_name(spec: MeasureSpec) -> str:
    return f"{spec.name}:ranked"


def cmd_correlate(args, conf: AnalysisConfig):
    if args.mode not in ("self", "pairwise"):
        raise ParseError(f"unknown correlation mode {args.mode!r}")
    coll = load_collection(args)
    cache = conf.cache()
    specs = conf.specs()
    raw = {s: coll.matrix(s) for s in specs}
    ranked = {s: ranked_scores(raw[s], cache=cache, ties=conf.ties, n_jobs=conf.jobs)
              for s in specs}
    header = ("measure_a", "measure_b", "kind", "topic_or_overall", "tau")

    def emit(name_a, a, name_b, b):
        yield name_a, name_b, "overall", "overall", overall_correlation(a, b)
        for t, tau in zip(raw[specs[0]].topics, topicwise_correlation(a, b)):
            yield name_a, name_b, "topic", t, float(tau)

    def rows():
        if args.mode == "self":
            for s in specs:
                yield from emit(s.name, raw[s], _ranked_name(s), ranked[s])
        else:
            for s1, s2 in combinations(specs, 2):
                yield from emit(s1.name, raw[s1], s2.name, raw[s2])
                yield from emit(_ranked_name(s1), ranked[s1], _ranked_name(s2), ranked[s2])
    return header, rows()


def cmd_sigtest(args, conf: AnalysisConfig):
    tests = [t.strip() for t in str(args.tests).split(",") if t.strip()]
    unknown = [t for t in tests if t not in TEST_NAMES]
    if unknown:
        raise ParseError(f"unknown tests {unknown}; expected some of {list(TEST_NAMES)}")
    coll = load_collection(args)
    cache = conf.cache()
    header = ("measure", "test", "sig", "s2ns", "ns2s", "delta_pct")

    def rows():
        for spec in conf.specs():
            raw = coll.matrix(spec)
            ranked = ranked_scores(raw, cache=cache, ties=conf.ties, n_jobs=conf.jobs)
            for test in tests:
                rep = significance_change_report(raw, ranked, test, conf.alpha)
                yield spec.name, test, rep.sig, rep.s2ns, rep.ns2s, rep.delta_pct
    return header, rows()


def _fraction(value: float) -> str:
    return str(Fraction(value).limit_denominator(10_000))


def cmd_analyze_scale(args, conf: AnalysisConfig):
    n_max = _optional_int(args.n_max)
    k_max = _optional_int(args.k_max)
    if n_max is None or k_max is None:
        raise ParseError("analyze-scale needs --n-max and --k-max")
    header = ("measure", "item", "value")
    rows = []
    for label in conf.measures:
        spec = MeasureSpec.parse(label.split("@")[0], n_max)
        res = analyze_scale(spec, n_max, k_max, caps=conf.caps)
        name = spec.name.split("@")[0]
        # set-based measures have small rational images; print them exactly
        show = _fraction if spec.kind in ("P", "R", "F1") else _fmt
        rows.append((name, "image", " ".join(show(v) for v in res.image)))
        rows.append((name, "equispaced", res.equispaced))
        if res.witness is not None:
            rows.append((name, "witness", " ".join(show(v) for v in res.witness)))
        if args.versus:
            found = find_order_disagreement(spec.kind, args.versus, n_max, k_max)
            text = "none" if found is None else f"{found.first!r} {found.second!r}"
            rows.append((f"{name} vs {args.versus}", "disagreement", text))
            if found is not None:
                rows.append((f"{name} vs {args.versus}", "ties_vs_strict", found.ties_vs_strict))
    return header, rows


def read_triples(path) -> List[RunTriple]:
    """Whitespace or comma separated ``r n rb`` lines."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].replace(",", " ").strip()
            if not text:
                continue
            parts = text.split()
            try:
                if len(parts) != 3:
                    raise ValueError(f"expected 3 fields, got {len(parts)}")
                out.append(RunTriple(*(int(p) for p in parts)))
            except (ValueError, IntervalIRError) as err:
                raise ParseError(str(err), line=line_no, source=str(path)) from None
    if not out:
        raise ParseError("no triples", source=str(path))
    return out


def cmd_embed(args, conf: AnalysisConfig):
    if not args.triples:
        raise ParseError("--triples is required")
    kind = str(args.measure).split("@")[0]
    triples = read_triples(args.triples)
    header = ("measure", "common", "index", "relevant", "length", "rb", "value")
    if kind == "P":
        common, runs = embed_precision(triples)
        value = lambda e: e.precision()
    elif kind == "R":
        common, runs = embed_recall(triples)
        value = lambda e: e.recall()
    elif kind == "F1":
        common, _, runs = embed_f1(triples)
        value = lambda e: e.f1()
    else:
        raise ParseError(f"embeddings exist for P, R and F1, not {kind!r}")
    return header, [(kind, common, i + 1, e.relevant, e.length, e.rb, str(value(e)))
                    for i, e in enumerate(runs)]


COMMANDS = {
    "measure": cmd_measure,
    "rankmap": cmd_rankmap,
    "steps": cmd_steps,
    "space": cmd_space,
    "correlate": cmd_correlate,
    "sigtest": cmd_sigtest,
    "analyze-scale": cmd_analyze_scale,
    "embed": cmd_embed,
}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; command-line flags win")
    common.add_argument("--measure", help="measure labels, comma separated (e.g. P,AP,RBP_p05,nDCG_b02@30)")
    common.add_argument("--cutoff", help="run lengths, e.g. 5,10 or 1-15 (default 10)")
    common.add_argument("--alpha", help="significance level (default 0.05)")
    common.add_argument("--ties", choices=("unq", "mid", "min", "max"), help="tie strategy (default unq)")
    common.add_argument("--cache-dir", dest="cache_dir", help="directory for the on-disk scale cache")
    common.add_argument("--max-enum-n", dest="max_enum_n", help="raise the enumeration cap on run length")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--out", help="output file (default standard output)")
    common.add_argument("--jobs", help="worker threads for enumeration and ranking (default 1)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--runs", nargs="+", help="run files or directories of run files")
    data.add_argument("--qrels", help="qrels file")

    parser = argparse.ArgumentParser(prog="intervalir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("measure", parents=[common, data], help="per-topic scores and per-system means")
    sub.add_parser("rankmap", parents=[common, data], help="raw scores next to their ranks")
    p = sub.add_parser("steps", parents=[common], help="sorted distinct values of a measure")
    p.add_argument("--rb", help="recall base (required for R, F1, AP, nDCG)")
    p = sub.add_parser("space", parents=[common], help="number of distinct values per run length")
    p.add_argument("--rb", help="recall base (required for R, F1, AP, nDCG)")
    p = sub.add_parser("correlate", parents=[common, data], help="overall and topic-by-topic Kendall tau")
    p.add_argument("--mode", choices=("self", "pairwise"),
                   help="measure vs its ranked version, or every pair of measures (default self)")
    p = sub.add_parser("sigtest", parents=[common, data], help="significance changes under ranking")
    p.add_argument("--tests", help=f"comma separated subset of {','.join(TEST_NAMES)}")
    p = sub.add_parser("analyze-scale", parents=[common], help="image and equi-spacing on S[N,K]")
    p.add_argument("--n-max", dest="n_max", help="largest run length")
    p.add_argument("--k-max", dest="k_max", help="largest recall base")
    p.add_argument("--versus", help="second set-based measure to search for an ordering disagreement")
    p = sub.add_parser("embed", parents=[common], help="embed (r, n, rb) triples into a common space")
    p.add_argument("--triples", help="file of 'r n rb' lines")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _merge_config(args)
        conf = build_config(args)
        header, rows = COMMANDS[args.command](args, conf)
        if args.command != "steps":
            # only steps streams; everything else is computed before any output
            rows = list(rows)
        if args.out:
            _write_atomic(Path(args.out), header, rows, conf.format)
        else:
            write_table(header, rows, conf.format, sys.stdout)
    except CapacityError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except NumericalError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (IntervalIRError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
