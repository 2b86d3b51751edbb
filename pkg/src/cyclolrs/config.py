"""JSON job configuration.

Layout::

    {
      "field":    {"M": 1},
      "sequence": {"f": [[["1"]], [["1"]]], "alpha": [[["3"], ["1"]], [["1"], ["1"]]]},
      "job":      {"zeta": [1, 1], "n_range": [0, 10], ...}
    }

A polynomial is a list of coefficients (lowest degree first); a coefficient is the
list of its power-basis coordinates in Q(zeta_M), or a bare rational.  Rationals
are integers or "p/q" strings; floats are refused because they are not exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from .cyclo import parse_rational
from .errors import ParseError, ValidationError
from .lrs import ParamLRS

TOP_KEYS = {"field", "sequence", "job"}
FIELD_KEYS = {"M"}
SEQUENCE_KEYS = {"f", "alpha"}


@dataclass(frozen=True)
class JobConfig:
    M: int
    f: tuple  # polynomials as tuples of coordinate tuples (Fractions)
    alpha: tuple
    zeta: tuple = (1, 1)
    n_range: tuple = (0, 10)
    S: tuple = ()  # rational primes (int) or prime-ideal selectors "p:f:e:g0,g1"
    r: Optional[int] = None
    eps: Optional[Fraction] = None
    M_max: int = 12
    D_max: Optional[int] = None
    precision: int = 128
    height_cap: int = 10**12
    budget_ms: Optional[int] = None
    matveev_C: Optional[Fraction] = None
    engine: str = "linear_form"
    allow_negative: bool = True
    allow_zero: bool = False

    def sequence(self) -> ParamLRS:
        return ParamLRS.from_coefficients(self.f, self.alpha, self.M)


JOB_KEYS = {f.name for f in fields(JobConfig)} - {"M", "f", "alpha"}


def _where(path: str) -> str:
    return path or "<root>"


def _expect(cond: bool, path: str, msg: str):
    if not cond:
        raise ParseError(f"{_where(path)}: {msg}")


def _rational(v: Any, path: str) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise ParseError(f"{path}: rationals must be integers or 'p/q' strings, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return parse_rational(v)
        except (ValueError, ZeroDivisionError, ParseError) as exc:
            raise ParseError(f"{path}: bad rational {v!r}") from exc
    raise ParseError(f"{path}: expected a rational, got {type(v).__name__}")


def _int(v: Any, path: str) -> int:
    _expect(isinstance(v, int) and not isinstance(v, bool), path, f"expected an integer, got {v!r}")
    return v


def _polys(v: Any, path: str) -> tuple:
    _expect(isinstance(v, list) and v, path, "expected a non-empty list of polynomials")
    out = []
    for i, poly in enumerate(v):
        p = f"{path}[{i}]"
        _expect(isinstance(poly, list) and poly, p, "a polynomial is a non-empty coefficient list")
        coeffs = []
        for j, c in enumerate(poly):
            q = f"{p}[{j}]"
            if not isinstance(c, list):
                coeffs.append((_rational(c, q),))  # a bare rational is shorthand for [c]
                continue
            _expect(bool(c), q, "a coefficient is a non-empty coordinate list")
            coeffs.append(tuple(_rational(x, f"{q}[{k}]") for k, x in enumerate(c)))
        out.append(tuple(coeffs))
    return tuple(out)


def _reject_unknown(obj: dict, allowed: set, path: str):
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ParseError(f"{_where(path)}: unknown key(s) {', '.join(extra)}")


def parse_config_obj(obj: Any) -> JobConfig:
    _expect(isinstance(obj, dict), "", "top level must be a JSON object")
    _reject_unknown(obj, TOP_KEYS, "")
    for key in ("field", "sequence"):
        _expect(key in obj, "", f"missing '{key}'")
    fld, seq, job = obj["field"], obj["sequence"], obj.get("job", {})
    for name, part in (("field", fld), ("sequence", seq), ("job", job)):
        _expect(isinstance(part, dict), name, "must be an object")
    _reject_unknown(fld, FIELD_KEYS, "field")
    _reject_unknown(seq, SEQUENCE_KEYS, "sequence")
    _reject_unknown(job, JOB_KEYS, "job")
    M = _int(fld.get("M", 1), "field.M")
    if M < 1:
        raise ValidationError("field.M must be >= 1")
    for key in SEQUENCE_KEYS:
        _expect(key in seq, "sequence", f"missing '{key}'")
    kw: dict = {"M": M, "f": _polys(seq["f"], "sequence.f"), "alpha": _polys(seq["alpha"], "sequence.alpha")}

    if "zeta" in job:
        z = job["zeta"]
        _expect(isinstance(z, list) and len(z) == 2, "job.zeta", "expected [m, j]")
        kw["zeta"] = (_int(z[0], "job.zeta[0]"), _int(z[1], "job.zeta[1]"))
    if "n_range" in job:
        z = job["n_range"]
        _expect(isinstance(z, list) and len(z) == 2, "job.n_range", "expected [lo, hi]")
        kw["n_range"] = (_int(z[0], "job.n_range[0]"), _int(z[1], "job.n_range[1]"))
    if "S" in job:
        z = job["S"]
        _expect(isinstance(z, list), "job.S", "expected a list")
        items = []
        for i, s in enumerate(z):
            if isinstance(s, str):
                _expect(s.count(":") == 3, f"job.S[{i}]", "ideal selector must read p:f:e:g0,g1,...")
                items.append(s)
            else:
                items.append(_int(s, f"job.S[{i}]"))
        kw["S"] = tuple(items)
    for key in ("r", "M_max", "D_max", "precision", "height_cap", "budget_ms"):
        if key in job and job[key] is not None:
            kw[key] = _int(job[key], f"job.{key}")
    for key in ("eps", "matveev_C"):
        if key in job and job[key] is not None:
            kw[key] = _rational(job[key], f"job.{key}")
    if "engine" in job:
        _expect(job["engine"] in ("linear_form", "explicit"), "job.engine", "expected 'linear_form' or 'explicit'")
        kw["engine"] = job["engine"]
    for key in ("allow_negative", "allow_zero"):
        if key in job:
            _expect(isinstance(job[key], bool), f"job.{key}", "expected true/false")
            kw[key] = job[key]
    cfg = JobConfig(**kw)
    validate(cfg)
    return cfg


def validate(cfg: JobConfig):
    m, j = cfg.zeta
    if m < 1:
        raise ValidationError("job.zeta: order m must be >= 1")
    lo, hi = cfg.n_range
    if lo < 0 or hi < lo:
        raise ValidationError("job.n_range: need 0 <= lo <= hi")
    if cfg.r is not None and cfg.r < 1:
        raise ValidationError("job.r must be >= 1")
    if cfg.eps is not None and cfg.eps <= 0:
        raise ValidationError("job.eps must be positive")
    if cfg.M_max < 1:
        raise ValidationError("job.M_max must be >= 1")
    if cfg.D_max is not None and cfg.D_max < 1:
        raise ValidationError("job.D_max must be >= 1")
    if cfg.precision < 16:
        raise ValidationError("job.precision must be >= 16 bits")
    if cfg.height_cap < 1:
        raise ValidationError("job.height_cap must be >= 1")
    if cfg.budget_ms is not None and cfg.budget_ms <= 0:
        raise ValidationError("job.budget_ms must be positive")
    if cfg.matveev_C is not None and cfg.matveev_C <= 0:
        raise ValidationError("job.matveev_C must be positive")
    # materializing the sequence checks the polynomial preconditions
    cfg.sequence()


def parse_config_text(text: str) -> JobConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config_obj(obj)


def parse_config(path) -> JobConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{p}: {exc.strerror}") from exc
    return parse_config_text(text)


def _rat_text(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def serialize(cfg: JobConfig) -> dict:
    def polys(ps):
        return [[[_rat_text(c) for c in coeff] for coeff in p] for p in ps]

    defaults = JobConfig(cfg.M, cfg.f, cfg.alpha)
    job: dict = {}
    for name in sorted(JOB_KEYS):
        v = getattr(cfg, name)
        if v == getattr(defaults, name) and name not in ("zeta", "n_range"):
            continue
        if isinstance(v, Fraction):
            v = _rat_text(v)
        elif isinstance(v, tuple):
            v = list(v)
        job[name] = v
    return {"field": {"M": cfg.M}, "sequence": {"f": polys(cfg.f), "alpha": polys(cfg.alpha)}, "job": job}


def dumps(cfg: JobConfig) -> str:
    return json.dumps(serialize(cfg), indent=2, sort_keys=True) + "\n"
