"""Command-line front end.

Commands: ``ved``, ``ved-table``, ``ed-count``, ``compare``.  Every run yields
a :class:`RunRecord`; records are appended to a line-delimited JSON cache and
identical requests are answered from it.

Exit codes: 0 success, 1 usage, 2 internal verification failure,
3 mathematical-invariant violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import grassloc, stability
from .edlagrange import MetricSpec, random_target
from .pathtrack import TrackerConfig, ed_count

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INVARIANT = 0, 1, 2, 3
DEFAULT_CACHE = "vedkit-cache.jsonl"
RECORD_FIELDS = ("command", "parameters", "results", "seeds", "timestamp", "conventionFlags")


class UsageError(Exception):
    pass


class CommandFailure(Exception):
    def __init__(self, message: str, code: int, record: "RunRecord | None" = None):
        super().__init__(message)
        self.code, self.record = code, record


def convention_flags() -> dict:
    return {"sigma": grassloc.SIGMA, "xi_sign": grassloc.XI_SIGN}


@dataclass
class RunRecord:
    command: str
    parameters: dict
    results: dict
    seeds: dict = field(default_factory=dict)
    timestamp: str = ""
    conventionFlags: dict = field(default_factory=convention_flags)
    cacheHit: bool = False

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()
        # normalize to JSON-native values so cached and fresh payloads compare equal
        self.parameters = json.loads(json.dumps(self.parameters))
        self.results = json.loads(json.dumps(self.results))
        self.seeds = json.loads(json.dumps(self.seeds))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        missing = [k for k in RECORD_FIELDS if k not in d]
        if missing:
            raise ValueError(f"record lacks fields {missing}")
        return cls(**{k: d[k] for k in (*RECORD_FIELDS, "cacheHit") if k in d})


def canonical_key(command: str, parameters: dict) -> str:
    return json.dumps([command, parameters], sort_keys=True, separators=(",", ":"))


class ResultCache:
    """Append-only JSONL store keyed by (command, canonical parameters).

    A truncated last line (interrupted append) is ignored on read.
    """

    def __init__(self, path: Optional[os.PathLike | str]):
        self.path = Path(path) if path else None

    def _records(self):
        if self.path is None or not self.path.exists():
            return
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    yield RunRecord.from_json(line)
                except (ValueError, TypeError):
                    continue

    def lookup(self, command: str, parameters: dict) -> Optional[RunRecord]:
        key = canonical_key(command, parameters)
        hit = None
        for rec in self._records():
            if canonical_key(rec.command, rec.parameters) == key:
                hit = rec
        if hit is not None:
            hit.cacheHit = True
        return hit

    def append(self, record: RunRecord) -> None:
        if self.path is None:
            return
        if self.path.parent and not self.path.parent.exists():
            self.path.parent.mkdir(parents=True)
        stored = RunRecord(**{**asdict(record), "cacheHit": False})
        with self.path.open("a") as fh:
            fh.write(stored.to_json() + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def cached(self, command: str, parameters: dict, compute: Callable[[], RunRecord],
               force: bool = False) -> RunRecord:
        if not force:
            hit = self.lookup(command, parameters)
            if hit is not None:
                return hit
        record = compute()
        self.append(record)
        return record


# --- commands -----------------------------------------------------------------


def _ved_record(n: int, verify: bool, seed: int) -> RunRecord:
    params = {"n": n, "verify": verify}
    seeds: dict = {}
    try:
        res = grassloc.ved(n, verify=verify)
    except grassloc.RouteMismatch as exc:
        rec = RunRecord("ved", params, {"error": str(exc), "j": exc.j, "verified": False})
        raise CommandFailure(str(exc), EXIT_VERIFY, rec) from exc
    except grassloc.IntegralityError as exc:
        raise CommandFailure(str(exc), EXIT_VERIFY) from exc
    results = {"ved": res.ved, "degs": res.degs, "m": 2 * n - 2,
               "weights": list(res.weightsUsed.weights), "verified": res.verified}
    if verify:
        seeds["weightSeed"] = seed
        independent = grassloc.weight_independence_check(n, 3, seed)
        results["weightIndependent"] = independent
        results["verified"] = res.verified and independent
        if not independent:
            raise CommandFailure("degree vector depends on the torus weights", EXIT_VERIFY,
                                 RunRecord("ved", params, results, seeds))
    return RunRecord("ved", params, results, seeds)


def cmd_ved(n: int, verify: bool = False, seed: int = 0, cache: ResultCache | None = None,
            force: bool = False) -> RunRecord:
    if n < 3:
        raise UsageError("n must be >= 3")
    cache = cache or ResultCache(None)
    params = {"n": n, "verify": verify}
    if verify:
        params["seed"] = seed
    return cache.cached("ved", params, lambda: _ved_record(n, verify, seed), force)


def _cached_ved(cache: ResultCache, n: int) -> int:
    return cmd_ved(n, cache=cache).results["ved"]


def cmd_ved_table(nMin: int, nMax: int, fitWindow: tuple | None = None, holdout: int = 0,
                  cache: ResultCache | None = None, force: bool = False) -> RunRecord:
    if nMin < 3 or nMin > nMax:
        raise UsageError(f"invalid range {nMin}..{nMax}")
    cache = cache or ResultCache(None)

    def compute_row(n):
        rec = cmd_ved(n, cache=cache, force=force)
        return rec.results["ved"], rec.results["degs"]

    params = {"nMin": nMin, "nMax": nMax,
              "fitWindow": list(fitWindow) if fitWindow else None, "holdout": holdout}

    def compute():
        table = stability.ved_table(nMin, nMax, compute_row)
        results: dict = {"rows": [list(r) for r in table.rows()]}
        if fitWindow is not None:
            try:
                report = stability.fit_and_validate(table, tuple(fitWindow), holdout)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            results["fit"] = report.to_dict()
            results["stable"] = report.stable
            width = fitWindow[1] - fitWindow[0] + 1
            early = stability.earliest_stable_window(table, width, holdout) if holdout else None
            results["earliestStableWindow"] = list(early.fitWindow) if early else None
        return RunRecord("ved-table", params, results)

    return cache.cached("ved-table", params, compute, force)


def _trial_seeds(seed: int, trials: int) -> list:
    rng = np.random.default_rng(seed)
    return [[int(a), int(b)] for a, b in rng.integers(0, 2**31, size=(trials, 2))]


def _ed_lane(metric: MetricSpec, seed: int, trials: int, cfg: TrackerConfig, threads: int):
    counts, residuals, details = [], [], []
    for target_seed, path_seed in _trial_seeds(seed, trials):
        sols = ed_count(metric, random_target(target_seed), cfg, path_seed, threads)
        counts.append(sols.count)
        residuals.append(max(sols.residuals, default=0.0))
        details.append({"targetSeed": target_seed, "pathSeed": path_seed, **sols.to_dict()})
    return counts, residuals, details


def modal(counts) -> int:
    return Counter(counts).most_common(1)[0][0]


def cmd_ed_count(metric: str, seed: int = 0, trials: int = 1, threads: int = 1,
                 cache: ResultCache | None = None, force: bool = False,
                 cfg: TrackerConfig | None = None) -> RunRecord:
    if trials < 1:
        raise UsageError("trials must be >= 1")
    try:
        spec = MetricSpec.parse(metric, seed)
    except (ValueError, OSError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    cfg = cfg or TrackerConfig()
    cache = cache or ResultCache(None)
    params = {"metric": metric, "metricSpec": spec.to_dict(), "seed": seed, "trials": trials,
              "tracker": cfg.to_dict()}

    def compute():
        counts, residuals, details = _ed_lane(spec, seed, trials, cfg, threads)
        bound = _cached_ved(cache, 3)
        results = {"counts": counts, "modalCount": modal(counts), "vED": bound,
                   "withinBound": all(c <= bound for c in counts),
                   "maxResidual": max(residuals), "trials": details}
        seeds = {"seed": seed, "trialSeeds": _trial_seeds(seed, trials)}
        return RunRecord("ed-count", params, results, seeds)

    rec = cache.cached("ed-count", params, compute, force)
    if not rec.results["withinBound"]:
        raise CommandFailure("ED count exceeds vED(3)", EXIT_INVARIANT, rec)
    return rec


def cmd_compare(seeds: int = 3, seed: int = 0, threads: int = 1,
                cache: ResultCache | None = None, force: bool = False,
                cfg: TrackerConfig | None = None) -> RunRecord:
    if seeds < 1:
        raise UsageError("seeds must be >= 1")
    cache = cache or ResultCache(None)
    symbolic = _cached_ved(cache, 3)
    generic = cmd_ed_count("random", seed, seeds, threads, cache, force, cfg)
    bw = cmd_ed_count("bw", seed, seeds, threads, cache, force, cfg)
    gcounts, bcounts = generic.results["counts"], bw.results["counts"]
    equal = modal(gcounts) == symbolic
    results = {
        "n": 3,
        "symbolic": symbolic,
        "genericCounts": gcounts,
        "genericModal": modal(gcounts),
        "equal": equal,
        "inconclusiveTrials": [k for k, c in enumerate(gcounts) if c < symbolic],
        "bwCounts": bcounts,
        "bwModal": modal(bcounts),
        "strict": modal(bcounts) < symbolic,
    }
    rec = RunRecord("compare", {"seeds": seeds, "seed": seed},
                    results, {"generic": generic.seeds, "bw": bw.seeds})
    if seeds >= 2 and all(c != symbolic for c in gcounts):
        raise CommandFailure("generic ED count disagrees with vED(3) on every seed", EXIT_VERIFY, rec)
    return rec


# --- output ---------------------------------------------------------------------


def render(record: RunRecord, mode: str) -> str:
    r = record.results
    if mode == "json":
        return record.to_json()
    if record.command == "ved":
        if mode == "plain":
            return str(r["ved"])
        return "j,deg\n" + "\n".join(f"{j},{d}" for j, d in enumerate(r["degs"]))
    if record.command == "ved-table":
        lines = ["n,ved"] + [f"{n},{v}" for n, v in r["rows"]]
        if mode == "plain" and "fit" in r:
            lines.append(f"stable={str(r['stable']).lower()} degree={r['fit']['detectedDegree']}")
        return "\n".join(lines)
    if record.command == "ed-count":
        if mode == "plain":
            return str(r["modalCount"])
        return "trial,count\n" + "\n".join(f"{k},{c}" for k, c in enumerate(r["counts"]))
    if record.command == "compare":
        if mode == "plain":
            return f"{r['symbolic']} {r['genericModal']} {r['bwModal']}"
        return ("lane,modal,symbolic\n"
                f"generic,{r['genericModal']},{r['symbolic']}\nbw,{r['bwModal']},{r['symbolic']}")
    return record.to_json()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _window(text: str) -> tuple:
    try:
        a, b = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected A:B") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache", default=DEFAULT_CACHE,
                        help="append-only result cache ('' disables)")
    common.add_argument("--output", choices=("json", "csv", "plain"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--verify", action="store_true")
    common.add_argument("--force", action="store_true", help="recompute even on a cache hit")

    parser = _Parser(prog="vedkit", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ved", parents=[common], help="virtual ED degree of sigma_2(v_2(P^{n-1}))")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("ved-table", parents=[common], help="vED over a range of n, with a polynomial fit")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--fit-window", type=_window)
    p.add_argument("--holdout", type=int, default=0)

    p = sub.add_parser("ed-count", parents=[common], help="numeric ED count for the 3 x 3 symmetroid")
    p.add_argument("--metric", default="random",
                   help="bw | random | identity | diag:a1,...,a6 | file:<path>")
    p.add_argument("--trials", type=int, default=1)

    p = sub.add_parser("compare", parents=[common], help="symbolic vED(3) against numeric counts")
    p.add_argument("--seeds", type=int, default=3)
    return parser


def run(argv=None) -> tuple:
    """Parse and execute; returns ``(exit code, record or None)``."""
    args = build_parser().parse_args(argv)
    cache = ResultCache(args.cache or None)
    try:
        if args.command == "ved":
            rec = cmd_ved(args.n, args.verify, args.seed, cache, args.force)
        elif args.command == "ved-table":
            rec = cmd_ved_table(args.n_min, args.n_max, args.fit_window, args.holdout,
                                cache, args.force)
        elif args.command == "ed-count":
            rec = cmd_ed_count(args.metric, args.seed, args.trials, args.threads, cache, args.force)
        else:
            rec = cmd_compare(args.seeds, args.seed, args.threads, cache, args.force)
    except UsageError as exc:
        print(f"vedkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except CommandFailure as exc:
        print(f"vedkit: {exc}", file=sys.stderr)
        if exc.record is not None:
            print(render(exc.record, args.output))
        return exc.code, exc.record
    print(render(rec, args.output))
    return EXIT_OK, rec


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
