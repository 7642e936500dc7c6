"""Per-pair verification, report serialization, and the on-disk cache."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .cupsolver import build_system, e_value, e_vector, solve
from .errors import (BoundaryDegenerate, MultiplicityFailure, NoEisensteinCongruence,
                     NotIrregular, UnknownFormat)
from .fp_linalg import in_span, rref
from .irregular import is_irregular_pair, scan_irregular
from .modsym import build_space, eisenstein_line

log = logging.getLogger(__name__)

MATCH = "MATCH"
MISMATCH = "MISMATCH"
INDETERMINATE_CUP = "INDETERMINATE_CUP"
INDETERMINATE_MS = "INDETERMINATE_MS"
NO_CONGRUENCE = "NO_CONGRUENCE"
ERROR = "ERROR"
STATUSES = (MATCH, MISMATCH, INDETERMINATE_CUP, INDETERMINATE_MS, NO_CONGRUENCE, ERROR)
DETERMINATE = (MATCH, MISMATCH)

CSV_HEADER = ["p", "k", "status", "dim_solution", "dim_E", "lambda", "w", "E0", "e1"]


@dataclass
class VerifyOptions:
    min_prime: int = 0
    steinberg_only: bool = False


@dataclass
class VerificationReport:
    p: int
    k: int
    status: str
    dim_solution: int = 0
    dim_E: int = 0
    lambda_: Optional[int] = None
    w: list = field(default_factory=list)
    E_basis: list = field(default_factory=list)
    e1: int = 0
    version: str = __version__
    ms: dict = field(default_factory=lambda: {"dim_M_plus": 0, "dim_S_plus": 0, "hecke_primes": []})
    cup: dict = field(default_factory=lambda: {"dim_steinberg": 0, "dim_steinberg_a_only": 0,
                                               "hecke_primes": []})
    options: dict = field(default_factory=lambda: asdict(VerifyOptions()))
    message: Optional[str] = None
    timings: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> dict:
        d = {
            "p": self.p,
            "k": self.k,
            "status": self.status,
            "dim_solution": self.dim_solution,
            "dim_E": self.dim_E,
            "lambda": self.lambda_,
            "w": list(self.w),
            "E_basis": [list(v) for v in self.E_basis],
            "e1": self.e1,
            "version": self.version,
            "ms": dict(self.ms),
            "cup": dict(self.cup),
            "options": dict(self.options),
            "message": self.message,
        }
        if timings:
            d["timings"] = dict(self.timings)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        d = dict(d)
        d["lambda_"] = d.pop("lambda")
        return cls(**d)


def compare(E_basis, w, p: int) -> tuple[str, Optional[int]]:
    """Projective comparison of the cup line with the Eisenstein vector."""
    if len(E_basis) != 1:
        return INDETERMINATE_CUP, None
    w = np.asarray(w, dtype=np.int64) % p
    if not w.any():
        return MISMATCH, None
    coeffs = in_span([w], E_basis[0], p)
    if coeffs is None or coeffs[0] == 0:
        return MISMATCH, None
    return MATCH, int(coeffs[0])


def _cup_side(p: int, k: int, options: VerifyOptions, report: VerificationReport) -> list:
    system = build_system(p, k)
    sol = solve(system, eisenstein=not options.steinberg_only, min_prime=options.min_prime)
    a_only = solve(system.restrict(["steinberg"]), eisenstein=False)
    report.dim_solution = sol.dimension
    report.cup = {
        "dim_steinberg": sol.steinberg_dimension,
        "dim_steinberg_a_only": a_only.dimension,
        "hecke_primes": list(sol.hecke_primes),
    }
    if not sol.basis:
        return []
    # e_1 rides along as a trailing column so it never picks the pivot.
    ext = np.array([e_vector(f, p, k) + [e_value(f, 1, p, k)] for f in sol.basis])
    red, pivots = rref(ext, p)
    E = [red[r, :-1].copy() for r, c in enumerate(pivots) if c < ext.shape[1] - 1]
    report.e1 = int(red[0, -1]) if pivots else 0
    report.dim_E = len(E)
    report.E_basis = [[int(x) for x in v] for v in E]
    return E


def verify_pair(p: int, k: int, options: Optional[VerifyOptions] = None) -> VerificationReport:
    """Compare the cup-product line with the Eisenstein period vector for (p, k)."""
    options = options or VerifyOptions()
    if not is_irregular_pair(p, k):
        raise NotIrregular(f"({p},{k}) is not an irregular pair")
    report = VerificationReport(p=p, k=k, status=ERROR, options=asdict(options))

    t0 = time.perf_counter()
    E = _cup_side(p, k, options, report)
    t1 = time.perf_counter()
    ms_status = None
    try:
        space = build_space(p, k)
        report.ms.update(dim_M_plus=space.dim_M_plus, dim_S_plus=space.dim_S_plus)
        if not space.dimension_guard_ok:
            ms_status = INDETERMINATE_MS
            report.message = (f"dim S_k^+ = {space.dim_S_plus}, expected {space.expected_cusp_dim}")
        else:
            line = eisenstein_line(space, min_prime=options.min_prime)
            report.w = list(line.w)
            report.ms["hecke_primes"] = list(line.hecke_primes)
    except BoundaryDegenerate as exc:
        ms_status, report.message = INDETERMINATE_MS, str(exc)
    except MultiplicityFailure as exc:
        ms_status, report.message = INDETERMINATE_MS, str(exc)
    except NoEisensteinCongruence as exc:
        ms_status, report.message = NO_CONGRUENCE, str(exc)
    t2 = time.perf_counter()
    report.timings = {"cup": round(t1 - t0, 4), "ms": round(t2 - t1, 4)}

    if ms_status is not None:
        report.status = ms_status
    else:
        report.status, report.lambda_ = compare(E, report.w, p)
    return report


def _safe_verify(args) -> VerificationReport:
    p, k, options, cache = args
    try:
        return cached_verify(p, k, options, cache)
    except Exception as exc:  # failure isolation: one pair never sinks a scan
        log.exception("pair (%d,%d) failed", p, k)
        return VerificationReport(p=p, k=k, status=ERROR, options=asdict(options),
                                  message=f"{type(exc).__name__}: {exc}")


def scan_verify(p_max: int, jobs: int = 1, options: Optional[VerifyOptions] = None,
                cache: Optional[Path] = None) -> list[VerificationReport]:
    """One report per irregular pair with p <= p_max, ordered by (p, k)."""
    options = options or VerifyOptions()
    work = [(pr.p, pr.k, options, cache) for pr in scan_irregular(p_max)]
    if jobs <= 1 or len(work) <= 1:
        reports = [_safe_verify(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_safe_verify, work))
    return sorted(reports, key=lambda r: (r.p, r.k))


# -- cache -----------------------------------------------------------------

def cache_path(cache: Path, p: int, k: int) -> Path:
    return Path(cache) / str(p) / f"{k}.json"


def load_cached(cache: Path, p: int, k: int, options: VerifyOptions) -> Optional[VerificationReport]:
    path = cache_path(cache, p, k)
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if data.get("version") != __version__ or data.get("options") != asdict(options):
        return None
    return VerificationReport.from_dict(data)


def store_cached(cache: Path, report: VerificationReport) -> None:
    path = cache_path(cache, report.p, report.k)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{report.k}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def cached_verify(p: int, k: int, options: Optional[VerifyOptions] = None,
                  cache: Optional[Path] = None) -> VerificationReport:
    options = options or VerifyOptions()
    if cache is not None:
        hit = load_cached(cache, p, k, options)
        if hit is not None:
            log.debug("cache hit (%d,%d)", p, k)
            return hit
    report = verify_pair(p, k, options)
    if cache is not None and report.status != ERROR:
        store_cached(cache, report)
    return report


# -- serialization ---------------------------------------------------------

def _join(vec) -> str:
    return ";".join(str(int(x)) for x in vec)


def emit_report(reports, fmt: str = "json", timings: bool = True) -> bytes:
    if fmt == "json":
        return json.dumps([r.to_dict(timings=timings) for r in reports], indent=2).encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow([
                r.p, r.k, r.status, r.dim_solution, r.dim_E,
                "" if r.lambda_ is None else r.lambda_,
                _join(r.w), _join(r.E_basis[0]) if r.E_basis else "", r.e1,
            ])
        return buf.getvalue().encode()
    raise UnknownFormat(f"unknown report format {fmt!r}")


def parse_reports(data: bytes, fmt: str = "json") -> list[VerificationReport]:
    if fmt != "json":
        raise UnknownFormat(f"cannot parse format {fmt!r}")
    parsed = json.loads(data)
    if isinstance(parsed, dict):
        parsed = [parsed]
    return [VerificationReport.from_dict(d) for d in parsed]
