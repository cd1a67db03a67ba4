"""Command-line front end: ``ellstat <subcommand> [options]``.

Every table is written as CSV with a ``#`` header line naming the package
version and the configuration (threads and paths excluded, so the bytes
depend only on the computation).  Long splitting scans run block by block,
optionally in worker processes, and can checkpoint after every block.

Exit codes: 0 ok, 1 usage, 2 I/O or checkpoint, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .census import (
    brute_force_d1_closure,
    brute_force_mass,
    census_averages,
    d1_set,
    schoof_mass,
)
from .constants import c0, linnik_constant, serre_constant
from .ecfp import (
    ORACLE_LIMIT,
    CertificationError,
    Curve,
    brute_force_census,
    local_invariants,
    local_invariants_mod_p,
)
from .modmath import DEFAULT_SEGMENT, divisors, iter_primes, primes
from .splitting import SMALL_PRIME_ARTIFACT, SplitAccumulator, split_block, split_primes_table
from .twins import multiplicity_at, report, twin_scan

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3
CHECKPOINT_FORMAT = 1
BLOCK_UNIT = 1 << 16  # block sizes are whole multiples of this sieve unit

BUILTIN_CURVES = {
    "A": (0, 0, 0, -1, 0),
    "E": (0, 0, 0, 6, -2),
    "F": (0, 0, 1, -1, 0),
}

SUBCOMMANDS = ("invariants", "split", "outside", "twins", "twin-n", "census", "constants", "oracle")


class UsageError(Exception):
    pass


class CheckpointError(Exception):
    pass


def parse_curve(spec: str) -> Curve:
    """A builtin name (A, E, F) or five comma-separated integers a1,a2,a3,a4,a6."""
    spec = spec.strip()
    if spec in BUILTIN_CURVES:
        return Curve(*BUILTIN_CURVES[spec])
    fields = [f.strip() for f in spec.strip("[]").split(",")]
    if len(fields) != 5:
        raise UsageError(f"curve spec needs 5 coefficients, got {len(fields)}: {spec!r}")
    coeffs = []
    for name, f in zip(("a1", "a2", "a3", "a4", "a6"), fields):
        try:
            coeffs.append(int(f))
        except ValueError:
            raise UsageError(f"coefficient {name} is not an integer: {f!r}") from None
    try:
        return Curve(*coeffs)
    except ValueError as e:
        raise UsageError(f"{e} (discriminant is 0)") from None


@dataclass(frozen=True)
class RunConfig:
    command: str
    curve: Curve | None
    xmax: int | None
    seed: int = 0
    threads: int = 1
    serre_m: int | None = None
    d: int | None = None
    n: int | None = None
    k: int = 3
    out: Path | None = None
    checkpoint: Path | None = None
    block_size: int = DEFAULT_SEGMENT
    oracle: bool = False
    max_blocks: int | None = None

    def describe(self) -> str:
        """Configuration text for output headers; threads and paths left out."""
        parts = [f"command={self.command}"]
        if self.curve is not None:
            parts.append(f"curve={self.curve}")
        for name in ("xmax", "serre_m", "d", "n"):
            v = getattr(self, name)
            if v is not None:
                parts.append(f"{name}={v}")
        if self.command == "twins":
            parts.append(f"k={self.k}")
        if self.command in ("split", "outside"):
            parts.append(f"block_size={self.block_size}")
        if self.oracle:
            parts.append("oracle=1")
        parts.append(f"seed={self.seed}")
        return " ".join(parts)

    def fingerprint(self) -> str:
        key = {
            "command": "split",  # split and outside share one scan
            "curve": list(self.curve.coefficients),
            "xmax": self.xmax,
            "seed": self.seed,
            "serre_m": self.serre_m,
            "block_size": self.block_size,
            "version": __version__,
        }
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


# --------------------------------------------------------------------------
# formatting
# --------------------------------------------------------------------------

def fmt_ratio(x, places: int = 5) -> str:
    """Decimal string with ``places`` digits, truncated toward zero."""
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        d = Decimal(mpmath.nstr(x, 30, strip_zeros=False))
    return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_DOWN))


def _csv(header: list[str], rows, comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# ellstat {__version__} {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}.{suffix}{path.suffix or '.csv'}")


def _emit(cfg: RunConfig, tables: list[tuple[str | None, str]]) -> None:
    """Write the main table (suffix None) and any sibling tables.

    Without --out only the main table goes to stdout.  Files are written
    to a temporary name and renamed, so a failure leaves no partial output.
    """
    if cfg.out is None:
        for suffix, text in tables:
            if suffix is None:
                sys.stdout.write(text)
        return
    for suffix, text in tables:
        path = cfg.out if suffix is None else _sibling(cfg.out, suffix)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)


# --------------------------------------------------------------------------
# block scheduling and checkpoints
# --------------------------------------------------------------------------

def _blocks(xmax: int, size: int) -> list[tuple[int, int]]:
    out, lo = [], 2
    while lo <= xmax:
        hi = min(xmax, lo + size - 1)
        out.append((lo, hi))
        lo = hi + 1
    return out


def _split_worker(coeffs, lo, hi, m, seed) -> dict:
    return split_block(Curve(*coeffs), lo, hi, m, seed).to_state()


def save_checkpoint(path: Path, fingerprint: str, last_block: int, acc: SplitAccumulator) -> None:
    data = {
        "format": CHECKPOINT_FORMAT,
        "version": __version__,
        "fingerprint": fingerprint,
        "last_completed_block": last_block,
        "state": acc.to_state(),
    }
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(data, sort_keys=True))
    os.replace(tmp, path)


def load_checkpoint(path: Path, fingerprint: str) -> tuple[int, SplitAccumulator]:
    try:
        data = json.loads(path.read_text())
        fmt, version = data["format"], data["version"]
    except (ValueError, KeyError, TypeError) as e:
        raise CheckpointError(f"corrupt checkpoint {path}: {e}") from None
    if fmt != CHECKPOINT_FORMAT or version != __version__:
        raise CheckpointError(
            f"checkpoint {path} was written by format {fmt}, version {version}; "
            f"this is format {CHECKPOINT_FORMAT}, version {__version__}"
        )
    if data.get("fingerprint") != fingerprint:
        raise CheckpointError(f"checkpoint {path} belongs to a different configuration")
    try:
        return int(data["last_completed_block"]), SplitAccumulator.from_state(data["state"])
    except (ValueError, KeyError, TypeError) as e:
        raise CheckpointError(f"corrupt checkpoint {path}: {e}") from None


def checkpoint_roundtrip(path: Path, fingerprint: str) -> tuple[int, SplitAccumulator]:
    """Load a checkpoint and write it back unchanged."""
    last, acc = load_checkpoint(path, fingerprint)
    save_checkpoint(path, fingerprint, last, acc)
    return last, acc


def run_split_scan(cfg: RunConfig) -> SplitAccumulator | None:
    """Splitting scan to cfg.xmax, block by block; None if stopped early."""
    blocks = _blocks(cfg.xmax, cfg.block_size)
    fp = cfg.fingerprint()
    acc, start = SplitAccumulator(), 0
    if cfg.checkpoint is not None and cfg.checkpoint.exists():
        last, acc = load_checkpoint(cfg.checkpoint, fp)
        start = last + 1
    todo = list(range(start, len(blocks)))
    if cfg.max_blocks is not None:
        todo = todo[: cfg.max_blocks]
    args = [(cfg.curve.coefficients, *blocks[i], cfg.serre_m, cfg.seed) for i in todo]

    def fold(i, state):
        nonlocal acc
        acc = acc.merge(SplitAccumulator.from_state(state))
        if cfg.checkpoint is not None:
            save_checkpoint(cfg.checkpoint, fp, i, acc)

    if cfg.threads > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            futures = [pool.submit(_split_worker, *a) for a in args]
            for i, fut in zip(todo, futures):
                fold(i, fut.result())
    else:
        for i, a in zip(todo, args):
            fold(i, _split_worker(*a))
    if (todo[-1] + 1 if todo else start) < len(blocks):
        return None
    acc.xmax = cfg.xmax
    acc.check()
    return acc


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _need(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise UsageError(f"{cfg.command} requires --{name.replace('_', '-')}")
    if cfg.xmax is not None and cfg.xmax < 5:
        raise UsageError("--xmax must be >= 5")


def _stopped(cfg: RunConfig) -> int:
    print(f"stopped after {cfg.max_blocks} block(s); resume with --checkpoint {cfg.checkpoint}", file=sys.stderr)
    return EXIT_OK


def cmd_invariants(cfg: RunConfig) -> int:
    _need(cfg, "curve", "xmax")
    rows = []
    for p in iter_primes(2, cfg.xmax):
        r = local_invariants(cfg.curve, p, cfg.seed)
        if r.good:
            rows.append((p, "good", r.a, r.n, r.d1, r.d2, int(r.supersingular)))
        else:
            rows.append((p, "bad", "", "", "", "", ""))
    header = ["p", "status", "a", "n", "d1", "d2", "supersingular"]
    _emit(cfg, [(None, _csv(header, rows, cfg.describe()))])
    return EXIT_OK


def cmd_split(cfg: RunConfig) -> int:
    _need(cfg, "curve", "xmax")
    acc = run_split_scan(cfg)
    if acc is None:
        return _stopped(cfg)
    main = _csv(
        ["X", "pi", "S", "ratio"],
        [(cfg.xmax, acc.prime_count, acc.s_sum, fmt_ratio(acc.ratio))],
        cfg.describe(),
    )
    per_d = [
        (d, c, fmt_ratio(r), "" if g is None else g)
        for d, c, r, g in split_primes_table(acc, cfg.serre_m)
        if cfg.d is None or d == cfg.d
    ]
    table = _csv(["d", "count", "ratio", "galois_order"], per_d, cfg.describe())
    _emit(cfg, [(None, main), ("per_d", table)])
    return EXIT_OK


def cmd_outside(cfg: RunConfig) -> int:
    _need(cfg, "curve", "xmax")
    acc = run_split_scan(cfg)
    if acc is None:
        return _stopped(cfg)
    # below SMALL_PRIME_ARTIFACT the definitions degenerate; flag, don't drop
    rows = [
        (p, d, g if cfg.serre_m is not None else "", cls if p >= SMALL_PRIME_ARTIFACT else f"artifact-{cls}")
        for p, d, g, cls in sorted(acc.outside)
    ]
    _emit(cfg, [(None, _csv(["p", "d1", "galois_order", "class"], rows, cfg.describe()))])
    return EXIT_OK


def cmd_twins(cfg: RunConfig) -> int:
    _need(cfg, "curve", "xmax")
    if cfg.k < 1:
        raise UsageError("--k must be >= 1")
    rep = report(twin_scan(cfg.curve, cfg.xmax, cfg.seed), cfg.k)
    desc = cfg.describe()
    main = _csv(
        ["X", "S_prime", "ratio_li2", "jX"],
        [(rep.X, rep.S_prime, fmt_ratio(rep.ratio_li2()), rep.jX)],
        desc,
    )
    census = _csv(["k", "count"], sorted(rep.multiplicity_census.items()), desc)
    moments = _csv(
        ["k", "S_k", "T_k"],
        [(k, rep.S.get(k, ""), rep.T.get(k, "")) for k in range(0, cfg.k + 1)],
        desc,
    )
    _emit(cfg, [(None, main), ("census", census), ("moments", moments)])
    return EXIT_OK


def cmd_twin_n(cfg: RunConfig) -> int:
    _need(cfg, "curve", "n")
    if cfg.n < 1:
        raise UsageError("--n must be >= 1")
    w = multiplicity_at(cfg.curve, cfg.n, cfg.seed)
    row = (w.n, w.M, w.window_lo, w.window_hi, ";".join(map(str, w.primes)))
    _emit(cfg, [(None, _csv(["n", "M", "window_lo", "window_hi", "primes"], [row], cfg.describe()))])
    return EXIT_OK


def _census_oracle(limit: int) -> list[str]:
    """Mismatches between d1_set/schoof_mass and the brute-force census."""
    bad = []
    for p in primes(5, min(limit, ORACLE_LIMIT)):
        if set(d1_set(p).members) != brute_force_d1_closure(p):
            bad.append(f"D1({p}) differs from the brute-force closure")
        for d in divisors(p - 1):
            if d % 2 and schoof_mass(p, d) != brute_force_mass(p, d)[0]:
                bad.append(f"schoof_mass({p}, {d}) differs from the weighted census")
    return bad


def cmd_census(cfg: RunConfig) -> int:
    _need(cfg, "xmax")
    if cfg.oracle:
        bad = _census_oracle(cfg.xmax)
        if bad:
            raise CertificationError("; ".join(bad))
    total, small, large = census_averages(cfg.xmax)
    c = linnik_constant().value
    ratio = mpmath.mpf(total) / (c * cfg.xmax / 4)
    desc = cfg.describe()
    main = _csv(
        ["X", "sum_all", "sum_small", "sum_large", "ratio_cX4"],
        [(cfg.xmax, total, small, large, fmt_ratio(ratio))],
        desc,
    )
    tables = [(None, main)]
    if cfg.out is not None:
        rows = []
        for p in iter_primes(5, cfg.xmax):
            rec = d1_set(p)
            rows.append((p, ";".join(map(str, sorted(rec.members))), rec.small_count, rec.large_count))
        tables.append(("primes", _csv(["p", "members", "small_count", "large_count"], rows, desc)))
    _emit(cfg, tables)
    return EXIT_OK


def cmd_constants(cfg: RunConfig) -> int:
    rows = []

    def add(name, rational, v):
        rows.append((name, rational, mpmath.nstr(v.value, 12, strip_zeros=False), mpmath.nstr(v.tail_bound, 3)))

    add("c0", "", c0())
    add("linnik", "", linnik_constant())
    if cfg.serre_m is not None:
        cp, c = serre_constant(cfg.serre_m)
        rows.append(("c_prime", f"{cp.numerator}/{cp.denominator}", mpmath.nstr(mpmath.mpf(cp.numerator) / cp.denominator, 12, strip_zeros=False), "0"))
        add("c", "", c)
    _emit(cfg, [(None, _csv(["name", "rational", "value", "tail_bound"], rows, cfg.describe()))])
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    limit = cfg.xmax if cfg.xmax is not None else ORACLE_LIMIT
    if limit < 5:
        raise UsageError("--xmax must be >= 5")
    rows, bad = [], []
    for p in primes(5, min(limit, ORACLE_LIMIT)):
        entries = brute_force_census(p)
        ok = True
        for e in entries:
            r = local_invariants_mod_p(e.curve, p, cfg.seed)
            if (r.n, r.d1, r.d2) != (e.n, e.d1, e.d2):
                ok = False
                bad.append(f"p={p} {e.curve}: fast ({r.n},{r.d1},{r.d2}) vs brute ({e.n},{e.d1},{e.d2})")
        rows.append((p, len(entries), int(ok)))
    bad += _census_oracle(limit)
    _emit(cfg, [(None, _csv(["p", "classes", "ok"], rows, cfg.describe()))])
    if bad:
        raise CertificationError("; ".join(bad))
    return EXIT_OK


COMMANDS = {
    "invariants": cmd_invariants,
    "split": cmd_split,
    "outside": cmd_outside,
    "twins": cmd_twins,
    "twin-n": cmd_twin_n,
    "census": cmd_census,
    "constants": cmd_constants,
    "oracle": cmd_oracle,
}


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ellstat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ellstat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--curve", help="builtin A, E, F or a1,a2,a3,a4,a6")
        sp.add_argument("--xmax", type=_positive)
        sp.add_argument("--d", type=_positive)
        sp.add_argument("--n", type=_positive)
        sp.add_argument("--k", type=_positive, default=3)
        sp.add_argument("--serre-m", type=_positive)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=_positive, default=1)
        sp.add_argument("--block-size", type=_positive, default=DEFAULT_SEGMENT)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--checkpoint", type=Path)
        sp.add_argument("--oracle", action="store_true")
        sp.add_argument("--max-blocks", type=_positive, help=argparse.SUPPRESS)
    return parser


def config_from_args(argv: list[str] | None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if not 0 <= ns.seed < 1 << 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if ns.block_size % BLOCK_UNIT:
        raise UsageError(f"--block-size must be a multiple of {BLOCK_UNIT}")
    return RunConfig(
        command=ns.command,
        curve=parse_curve(ns.curve) if ns.curve is not None else None,
        xmax=ns.xmax,
        seed=ns.seed,
        threads=ns.threads,
        serre_m=ns.serre_m,
        d=ns.d,
        n=ns.n,
        k=ns.k,
        out=ns.out,
        checkpoint=ns.checkpoint,
        block_size=ns.block_size,
        oracle=ns.oracle,
        max_blocks=ns.max_blocks,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except UsageError as e:
        print(f"ellstat: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    except CheckpointError as e:
        print(f"ellstat: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"ellstat: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except CertificationError as e:
        print(f"ellstat: invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
