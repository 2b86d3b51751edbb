"""Command-line driver: ``cyclolrs <command> --config job.json --out DIR``.

Exit codes: 0 success, 1 usage or validation error, 2 structure violation
(exceptional parameter, failed structure check), 3 budget or timeout.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bounds import BOUND_COLUMNS, theorem1_report, theorem2_report, theorem3_bound, factor_terms
from .config import JobConfig, parse_config
from .cyclo import to_text
from .errors import BudgetError, CapExceeded, CycloLRSError, EmptyS, StructureError, StructureViolation
from .exceptional import scan_multi_dominant, torsion_factor_check
from .ideals import greatest_prime_and_radical, ideals_above, parse_prime_ideal, s_part
from .lrs import desired_structure_check, iter_terms, specialize
from .sunit import SUnitConfig, solve

log = logging.getLogger("cyclolrs")

COMMANDS = ("terms", "factor", "growth", "spart", "scan", "bounds", "solve")
EXIT_OK, EXIT_USAGE, EXIT_STRUCTURE, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cyclolrs", description="Parametric recurrences evaluated at roots of unity.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON job configuration")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    ap.add_argument("--precision", type=int, help="ball precision in bits, overrides job.precision")
    ap.add_argument("--n-max", type=int, dest="n_max", help="upper end of the n range, overrides job.n_range")
    ap.add_argument("--budget-ms", type=int, dest="budget_ms", help="factorization budget per term")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


# -- output -------------------------------------------------------------------------

def write_csv(path: Path, tag: str, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"#v1 {tag}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _ideal_text(fact) -> str:
    return ";".join(f"{P.to_text()}^{v}" for P, v in fact.factors)


# -- commands ----------------------------------------------------------------------

def _specialized(cfg: JobConfig):
    m, j = cfg.zeta
    return specialize(cfg.sequence(), m, j, cfg.precision)


def _n_values(cfg: JobConfig):
    lo, hi = cfg.n_range
    return list(range(lo, hi + 1))


def _ideal_set(cfg: JobConfig, Lz):
    K = Lz.field
    if not cfg.S:
        raise EmptyS("job.S is required for this command")
    out = []
    primes = [s for s in cfg.S if isinstance(s, int)]
    out.extend(ideals_above(K, primes))
    for s in cfg.S:
        if isinstance(s, str):
            P = parse_prime_ideal(s, K.m)
            if P not in ideals_above(K, [P.p]):
                raise CycloLRSError(f"{s} is not a prime ideal of Q(zeta_{K.m})")
            out.append(P)
    return sorted(set(out))


def cmd_terms(cfg, args, out: Path):
    Lz = _specialized(cfg)
    lo, hi = cfg.n_range
    deg = Lz.field.degree
    rows = []
    for n, u in zip(range(hi + 1), iter_terms(Lz)):
        if n >= lo:
            rows.append([n, *(_frac(c) for c in u.coords)])
    write_csv(out / "terms.csv", f"terms m={Lz.field.m}", ["n", *(f"c{i}" for i in range(deg))], rows)


def _frac(c) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


FACTOR_COLUMNS = ["n", "abs_norm", "P", "radical_norm", "s_part_norm", "cofactor_norm", "ideals"]


def _factor_rows(cfg, args, S=None):
    Lz = _specialized(cfg)
    facts = factor_terms(Lz, _n_values(cfg), args.workers, cfg.budget_ms)
    rows = []
    for n, fact in facts.items():
        P, rad = greatest_prime_and_radical(fact)
        sp = s_part(fact, S(Lz)) if S else None
        rows.append([n, fact.norm_abs, P, rad, "" if sp is None else sp.s_part_norm,
                     "" if sp is None else sp.cofactor_norm, _ideal_text(fact)])
    return rows


def cmd_factor(cfg, args, out: Path):
    write_csv(out / "factors.csv", "factors", FACTOR_COLUMNS, _factor_rows(cfg, args))


def cmd_spart(cfg, args, out: Path):
    rows = _factor_rows(cfg, args, S=lambda Lz: _ideal_set(cfg, Lz))
    write_csv(out / "factors.csv", "factors", FACTOR_COLUMNS, rows)


def _checked(cfg):
    Lz = _specialized(cfg)
    rep = desired_structure_check(Lz, cfg.n_range[1])
    if not rep.passed:
        raise StructureViolation(rep.n_star, "; ".join(rep.notes))
    return Lz


def cmd_growth(cfg, args, out: Path):
    Lz = _checked(cfg)
    rep = theorem1_report(Lz, _n_values(cfg), args.workers, cfg.budget_ms)
    write_csv(out / "bounds.csv", "bounds T1", BOUND_COLUMNS, [r.cells() for r in rep.admissible])
    write_json(out / "constants.json", {"T1": rep.constants_json()})


def cmd_bounds(cfg, args, out: Path):
    Lz = _checked(cfg)
    panel = {}
    S = _ideal_set(cfg, Lz)
    rep = theorem2_report(Lz, S, _n_values(cfg), args.workers, cfg.budget_ms)
    panel["T2"] = rep.constants_json()
    write_csv(out / "bounds.csv", "bounds T2", BOUND_COLUMNS, [r.cells() for r in rep.admissible])
    if cfg.r is not None and cfg.eps is not None:
        primes = sorted({P.p for P in S})
        t3 = theorem3_bound(Lz, primes, cfg.r, cfg.eps, cfg.matveev_C, cfg.engine)
        panel["T3"] = {"constants": {k: c.as_json() for k, c in t3.constants.items()}, "engine": cfg.engine,
                       "S": primes, "r": cfg.r, "eps": _frac(cfg.eps)}
    write_json(out / "constants.json", panel)


def cmd_scan(cfg, args, out: Path):
    L = cfg.sequence()
    hits = scan_multi_dominant(L, cfg.M_max, args.workers)
    rows = [[h.m, h.j, h.tie_size, "two" if h.tie_size == 2 else "three_or_more"] for h in hits]
    write_csv(out / "scan.csv", f"scan M_max={cfg.M_max}", ["m", "j", "tie_size", "class"], rows)
    D_max = cfg.D_max if cfg.D_max is not None else 2 * L.d
    wrows = []
    for i in range(L.k):
        for j in range(i + 1, L.k):
            try:
                verdict = torsion_factor_check(L.alpha[i], L.alpha[j], D_max)
            except ValueError:
                # |alpha_i| = |alpha_j| identically: every shape divides the zero polynomial
                wrows.append([i + 1, j + 1, "", "", "", "identically_zero"])
                continue
            for w in verdict.witnesses:
                wrows.append([i + 1, j + 1, w.r, w.s, to_text(w.u), w.shape])
    write_csv(out / "witnesses.csv", f"witnesses D_max={D_max}", ["i", "j", "r", "s", "u", "shape"], wrows)


def cmd_solve(cfg, args, out: Path):
    if cfg.r is None or cfg.eps is None:
        raise CycloLRSError("job.r and job.eps are required for solve")
    primes = [s for s in cfg.S if isinstance(s, int)]
    if not primes:
        raise EmptyS("job.S must list rational primes for solve")
    Lz = _specialized(cfg)
    lo, hi = cfg.n_range
    scfg = SUnitConfig(tuple(primes), cfg.r, cfg.eps, hi, cfg.height_cap, n_min=lo,
                       allow_negative=cfg.allow_negative, allow_zero=cfg.allow_zero)
    res = solve(Lz, scfg, args.workers)
    header = ["n", *(f"w{i}" for i in range(1, cfg.r + 1)), "independence"]
    rows = []
    for s in res.solutions:
        flag = "ok" if not s.independence_violations else ";".join(
            f"i={i}:{','.join(map(str, rel))}" for i, rel in s.independence_violations)
        rows.append([*s.as_row(), flag])
    write_csv(out / "solutions.csv", f"solutions r={cfg.r} eps={_frac(cfg.eps)}", header, rows)
    (out / "skipped.txt").write_text("".join(f"n={n}: {why}\n" for n, why in res.skipped))
    if res.cap_exceeded:
        n, window = res.cap_exceeded[0]
        raise CapExceeded(n, window, cfg.height_cap)


HANDLERS = {
    "terms": cmd_terms,
    "factor": cmd_factor,
    "growth": cmd_growth,
    "spart": cmd_spart,
    "scan": cmd_scan,
    "bounds": cmd_bounds,
    "solve": cmd_solve,
}


def run(command: str, cfg: JobConfig, args, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    try:
        HANDLERS[command](cfg, args, out)
    except StructureError as exc:
        log.error("%s", exc)
        return EXIT_STRUCTURE
    except BudgetError as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    except CycloLRSError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.workers < 1:
        log.error("--workers must be >= 1")
        return EXIT_USAGE
    try:
        cfg = parse_config(args.config)
        overrides = {}
        if args.precision is not None:
            overrides["precision"] = args.precision
        if args.n_max is not None:
            overrides["n_range"] = (cfg.n_range[0], args.n_max)
        if args.budget_ms is not None:
            overrides["budget_ms"] = args.budget_ms
        if overrides:
            from .config import validate

            cfg = dataclasses.replace(cfg, **overrides)
            validate(cfg)
    except CycloLRSError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    return run(args.command, cfg, args, Path(args.out))


if __name__ == "__main__":
    sys.exit(main())
