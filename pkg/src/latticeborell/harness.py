"""Experiment orchestration: config parsing, sweeps, report emission.

Every experiment maps a JSON config to a list of report rows plus an overall
pass flag.  Rows are plain dicts with deterministic key order and floats
canonicalized to 12 significant digits, so a rerun with the same config and
seed emits byte-identical files under any thread count.  A precondition
failure in one sweep row is recorded in that row and never aborts the sweep.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import borell
from .bodies import ConvexBody, GeometryError, body_from_dict
from .borell import (
    C_REF,
    BorellConstants,
    InequalityReport,
    c0,
    c0_upper_bound,
    cq_estimate,
    shell_count,
    lemma32_shell_bound,
    verify_discrete_bm,
    verify_discrete_borell,
    verify_meanwidth_discrete,
)
from .continuous import axis_moment, volume
from .lattice import enumerate_cached, moment, projection_distribution
from .sampling import RngStream, mean_width_centroid, random_polytope_mean_width

EXPERIMENTS = (
    "enumerate",
    "borell",
    "cq",
    "brunn-minkowski",
    "meanwidth",
    "convergence",
    "counterexample",
    "shell-bound",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    body: dict = None
    body_L: dict = None
    sweeps: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    seed: int = 0
    out: str = None
    fmt: str = "json-lines"
    mode: str = None
    tolerances: dict = field(default_factory=dict)
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        for key, vals in self.sweeps.items():
            if not isinstance(vals, list) or not vals:
                raise ConfigError(f"sweep {key!r} must be a nonempty list")
        lam = self.sweeps.get("lam")
        if lam:
            vals = [float(Fraction(v)) if isinstance(v, str) else float(v)
                    for v in lam]
            if any(a >= b for a, b in zip(vals, vals[1:])):
                raise ConfigError("lam sweep must be strictly increasing")
        for key, v in self.budgets.items():
            if int(v) <= 0:
                raise ConfigError(f"budget {key!r} must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        known = {"experiment", "body", "bodies", "sweeps", "budgets", "seed",
                 "out", "format", "mode", "tolerances", "threads"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        bodies = d.get("bodies") or {}
        return ExperimentConfig(
            experiment=d["experiment"],
            body=d.get("body") or bodies.get("K"),
            body_L=bodies.get("L"),
            sweeps=d.get("sweeps", {}),
            budgets=d.get("budgets", {}),
            seed=int(d.get("seed", 0)),
            out=d.get("out"),
            fmt=d.get("format", "json-lines"),
            mode=d.get("mode"),
            tolerances=d.get("tolerances", {}),
            threads=int(d.get("threads", 1)),
        )

    @staticmethod
    def from_json_file(path) -> "ExperimentConfig":
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))

    def make_body(self) -> ConvexBody:
        if self.body is None:
            raise ConfigError("config needs a body")
        return body_from_dict(self.body)

    def make_body_L(self) -> ConvexBody:
        if self.body_L is None:
            raise ConfigError("this experiment needs bodies.K and bodies.L")
        return body_from_dict(self.body_L)


# ---------------------------------------------------------------------------
# float canonicalization + report emission


def _canon(value):
    """Round floats to 12 significant digits so reports round-trip exactly."""
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if math.isfinite(value):
            return float(f"{value:.12g}")
        return value
    if isinstance(value, dict):
        return {k: _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    return value


def canonical_rows(rows) -> list:
    return [_canon(dict(r)) for r in rows]


def emit_report(rows, fmt: str, path) -> None:
    """Write rows as JSON lines or CSV with a deterministic field order."""
    if not rows:
        raise ValueError("no rows to emit")
    rows = canonical_rows(rows)
    try:
        if fmt == "json-lines":
            with open(path, "w") as fh:
                for r in rows:
                    fh.write(json.dumps(r, separators=(",", ":")) + "\n")
        elif fmt == "csv":
            cols = []
            for r in rows:
                for k in r:
                    if k not in cols:
                        cols.append(k)
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(cols)
                for r in rows:
                    w.writerow([_cell(r.get(k)) for k in cols])
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as e:
        raise IOError(f"cannot write report to {path}: {e}") from e


def _cell(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    if isinstance(v, float):
        return f"{v:.12g}"
    return v


def report_lines(rows) -> str:
    buf = io.StringIO()
    for r in canonical_rows(rows):
        buf.write(json.dumps(r, separators=(",", ":")) + "\n")
    return buf.getvalue()


def summary_csv_rows(reports) -> list:
    """Compact (body, p, q, N, implied_constant, pass) summary of reports."""
    out = []
    for rep in reports:
        ctx = rep.context
        out.append({
            "name": rep.name,
            "body": json.dumps(ctx.get("body") or ctx.get("K"), separators=(",", ":")),
            "p": ctx.get("p"),
            "q": ctx.get("q"),
            "N": ctx.get("N"),
            "implied_constant": rep.implied_constant,
            "pass": rep.passed,
        })
    return out


# ---------------------------------------------------------------------------
# experiments


def _parallel_rows(tasks, threads: int):
    """Evaluate index-tagged thunks, merging results back in index order."""
    if threads <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(t) for t in tasks]
        return [f.result() for f in futs]


def _row_guard(fn):
    """Run one sweep row; on a domain error, return an error-marked row."""
    try:
        return fn()
    except GeometryError as e:
        return {"error": f"{type(e).__name__}: {e}"}


def run_enumerate(cfg: ExperimentConfig):
    body = cfg.make_body()
    ps = enumerate_cached(body)
    row = {
        "body": body.describe(),
        "count": ps.count,
        "ambiguous_count": ps.ambiguous_count,
        "max_abs_projection": int(ps.max_abs_projection()) if ps.count else 0,
    }
    if ps.count:
        dist = projection_distribution(body)
        for p in cfg.sweeps.get("p", [1, 2]):
            row[f"moment_root_p{p}"] = float(moment(dist, p).root)
    return [row], True


def run_borell(cfg: ExperimentConfig):
    body = cfg.make_body()
    c_ref = float(cfg.tolerances.get("c_ref", C_REF))
    ps = cfg.sweeps.get("p", [1, 1.5, 2, 4, 8])
    qs = cfg.sweeps.get("q", ps)
    rows, ok = [], True

    def make(p, q):
        def job():
            def run():
                rep = verify_discrete_borell(body, p, q, c_ref=c_ref)
                return {"p": float(p), "q": float(q),
                        "m_p": rep.context["m_p"], "m_q": rep.context["m_q"],
                        "c0": rep.context["c0"],
                        "holder_lower": rep.context["holder_lower"],
                        "implied_constant": rep.implied_constant,
                        "pass": rep.passed}
            return _row_guard(run)
        return job

    tasks = [make(p, q) for p in ps for q in qs if float(p) <= float(q)]
    rows = _parallel_rows(tasks, cfg.threads)
    ok = all(r.get("pass", False) for r in rows if "error" not in r) and rows
    return rows, bool(ok)


def run_cq(cfg: ExperimentConfig):
    body = cfg.make_body()
    q = cfg.sweeps.get("q", [2])[0]
    budgets = cfg.sweeps.get("rotations", [int(cfg.budgets.get("rotations", 16))])
    grid = int(cfg.budgets.get("p_grid_size", 6))
    rows = []
    for rot in budgets:
        def run(rot=rot):
            bc = cq_estimate(body, q, rotations=int(rot), p_grid_size=grid,
                             seed=cfg.seed)
            return {"q": float(q), "rotations": int(rot),
                    "cq_estimate": bc.cq_estimate, "c0_identity": bc.c0,
                    "argmax_p": bc.argmax_p,
                    "argmax_rotation": bc.argmax_rotation,
                    "caveat": bc.caveat}
        rows.append(_row_guard(run))
    return rows, all("error" not in r for r in rows)


def run_brunn_minkowski(cfg: ExperimentConfig):
    K = cfg.make_body()
    L = cfg.make_body_L()
    lams = cfg.sweeps.get("lam", [0.5])

    def make(lam):
        def job():
            def run():
                rep = verify_discrete_bm(K, L, _rat(lam))
                return {"lam": float(_rat(lam)), "G_K": rep.context["G_K"],
                        "G_L": rep.context["G_L"], "G_M": rep.context["G_M"],
                        "lhs": rep.lhs, "rhs": rep.rhs, "pass": rep.passed}
            return _row_guard(run)
        return job

    rows = _parallel_rows([make(l) for l in lams], cfg.threads)
    ok = all(r.get("pass", False) for r in rows if "error" not in r)
    return rows, bool(ok)


def _rat(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float) and v != int(v):
        return Fraction(v).limit_denominator(10 ** 6)
    return v


def run_convergence(cfg: ExperimentConfig):
    body = cfg.make_body()
    lams = cfg.sweeps.get("lam")
    if not lams or len(lams) < 3:
        raise ConfigError("convergence needs a lam sweep with >= 3 values")
    ps = cfg.sweeps.get("p", [1])
    with_cq = bool(cfg.budgets.get("cq_rotations", 0))
    q = cfg.sweeps.get("q", [2])[0]
    try:
        vol = volume(body)
    except GeometryError:
        vol = None

    def make(lam):
        def job():
            def run():
                from .bodies import Scaled

                lamr = _rat(lam)
                scaled = Scaled(lamr, body)
                row = {"lam": float(lamr)}
                dist = projection_distribution(scaled)
                for p in ps:
                    row[f"c0_p{p}"] = float(c0(scaled, p))
                if with_cq:
                    bc = cq_estimate(scaled, q,
                                     rotations=int(cfg.budgets["cq_rotations"]),
                                     p_grid_size=int(cfg.budgets.get("p_grid_size", 4)),
                                     seed=cfg.seed)
                    row["cq_estimate"] = bc.cq_estimate
                ge = enumerate_cached(scaled)
                row["count"] = ge.count
                row["count_over_lam_n"] = ge.count / float(lamr) ** body.n
                if vol is not None:
                    row["volume"] = vol
                for p in ps:
                    scaled_moment = float(moment(dist, p).root) / float(lamr)
                    row[f"scaled_moment_root_p{p}"] = scaled_moment
                    try:
                        row[f"continuous_moment_root_p{p}"] = axis_moment(body, p)
                    except GeometryError:
                        pass
                return row
            return _row_guard(run)
        return job

    rows = _parallel_rows([make(l) for l in lams], cfg.threads)
    good = [r for r in rows if "error" not in r]
    diag = {"diagnostic": "trend"}
    ok = len(good) >= 2
    if ok:
        for p in ps:
            key = f"c0_p{p}"
            first, last = good[0].get(key), good[-1].get(key)
            if first is not None and last is not None:
                diag[f"c0_gap_first_p{p}"] = first - 1.0
                diag[f"c0_gap_last_p{p}"] = last - 1.0
                ok = ok and (last - 1.0) <= (first - 1.0)
        if vol is not None:
            diag["count_ratio_gap_last"] = abs(good[-1]["count_over_lam_n"] - vol)
    rows.append(diag)
    return rows, bool(ok)


def run_counterexample(cfg: ExperimentConfig):
    from .bodies import counterexample_body

    n = int(cfg.budgets.get("dimension", 2))
    lams = cfg.sweeps.get("lam", [4, 16, 64])
    p = cfg.sweeps.get("p", [1])[0]
    q = cfg.sweeps.get("q", [2])[0]
    c_ref = float(cfg.tolerances.get("c_ref", C_REF))

    def make(lam):
        def job():
            def run():
                lamr = _rat(lam)
                body = counterexample_body(lamr, n)
                dist = projection_distribution(body)
                mp = float(moment(dist, p).root)
                mq = float(moment(dist, q).root)
                c0v = float(c0(body, p))
                raw_ratio = mq / mp
                normalized = mq / ((float(q) / float(p)) * c0v * mp)
                return {"lam": float(lamr), "m_p": mp, "m_q": mq,
                        "raw_ratio": raw_ratio, "c0": c0v,
                        "normalized_ratio": normalized,
                        "normalized_ok": normalized <= c_ref}
            return _row_guard(run)
        return job

    rows = _parallel_rows([make(l) for l in lams], cfg.threads)
    good = [r for r in rows if "error" not in r]
    ratios = [r["raw_ratio"] for r in good]
    increasing = all(a < b for a, b in zip(ratios, ratios[1:]))
    bounded = all(r["normalized_ok"] for r in good)
    rows.append({"diagnostic": "trend", "raw_ratio_increasing": increasing,
                 "normalized_bounded": bounded})
    return rows, bool(increasing and bounded and good)


def run_meanwidth(cfg: ExperimentConfig):
    body = cfg.make_body()
    mode = cfg.mode or "sandwich"
    Ns = cfg.sweeps.get("N")
    if not Ns:
        raise ConfigError("meanwidth needs an N sweep")
    if mode in ("discrete-upper", "discrete-lower"):
        rots = int(cfg.budgets.get("rotations", 64))
        q = cfg.sweeps.get("q", [None])[0]
        rows = []
        for i, N in enumerate(Ns):
            def run(N=N):
                rep = verify_meanwidth_discrete(
                    body, int(N), mode.split("-")[1], q=q, rotations=rots,
                    seed=cfg.seed,
                    cq_rotations=int(cfg.budgets.get("cq_rotations", 16)))
                return {"N": int(N), "A_expected_max": rep.context["avg_expected_max"],
                        "B_moment_root": rep.context["avg_moment_root"],
                        "implied_constant": rep.implied_constant,
                        "pass": rep.passed}
            rows.append(_row_guard(run))
        ok = all(r.get("pass", False) for r in rows if "error" not in r)
        return rows, bool(ok)

    if any(int(N) < 3 for N in Ns):
        raise ConfigError("sandwich sweep needs N >= 3")
    pts = int(cfg.budgets.get("point_samples", 10000))
    dirs = int(cfg.budgets.get("direction_samples", 1000))
    lo_band = float(cfg.tolerances.get("band_lo", 0.05))
    hi_band = float(cfg.tolerances.get("band_hi", 20.0))
    root = RngStream(cfg.seed)

    def make(i, N):
        def job():
            def run():
                N_i = int(N)
                reps = max(int(cfg.budgets.get("replicates", max(8, pts // N_i))), 2)
                ew = random_polytope_mean_width(body, N_i, reps, dirs,
                                                root.substream(2 * i))
                wz = mean_width_centroid(body, math.log(N_i), dirs,
                                         root.substream(2 * i + 1), pts)
                ratio = ew.value / wz.value
                return {"N": N_i, "ew_value": ew.value, "ew_stderr": ew.stderr,
                        "wz_value": wz.value, "wz_stderr": wz.stderr,
                        "ratio": ratio,
                        "in_band": lo_band <= ratio <= hi_band}
            return _row_guard(run)
        return job

    rows = _parallel_rows([make(i, N) for i, N in enumerate(Ns)], cfg.threads)
    good = [r for r in rows if "error" not in r]
    in_band = all(r["in_band"] for r in good)
    ratios = [r["ratio"] for r in good]
    log_range = (max(math.log(r) for r in ratios) - min(math.log(r) for r in ratios)
                 if ratios else 0.0)
    monotone = all(
        b["ew_value"] >= a["ew_value"] - 3.0 * (a["ew_stderr"] + b["ew_stderr"])
        for a, b in zip(good, good[1:])
    )
    rows.append({"diagnostic": "trend", "in_band": in_band,
                 "log_ratio_range": log_range,
                 "log_range_ok": log_range <= math.log(10.0),
                 "ew_monotone_3sigma": monotone})
    return rows, bool(in_band and monotone and log_range <= math.log(10.0) and good)


def run_shell_bound(cfg: ExperimentConfig):
    from .bodies import Ball

    radii_sweep = cfg.sweeps.get("r", [4, 8, 20])
    ts = cfg.sweeps.get("t", [0.25, 0.5])
    n = int(cfg.budgets.get("dimension", 2))
    p = cfg.sweeps.get("p", [1])[0]
    rows, ok = [], True
    for r in radii_sweep:
        for t in ts:
            def run(r=r, t=t):
                body = Ball(_rat(r), n)
                count = shell_count(body, _rat(t))
                bound = lemma32_shell_bound(body, float(t))
                c0v = float(c0(body, p))
                cb, _ = c0_upper_bound(body, p)
                return {"r": float(r), "t": float(t), "shell_count": count,
                        "shell_bound": bound, "c0": c0v, "c0_bound": cb,
                        "pass": count <= bound and c0v <= cb}
            rows.append(_row_guard(run))
    ok = all(r.get("pass", False) for r in rows if "error" not in r)
    return rows, bool(ok)


_RUNNERS = {
    "enumerate": run_enumerate,
    "borell": run_borell,
    "cq": run_cq,
    "brunn-minkowski": run_brunn_minkowski,
    "meanwidth": run_meanwidth,
    "convergence": run_convergence,
    "counterexample": run_counterexample,
    "shell-bound": run_shell_bound,
}


def run_experiment(cfg: ExperimentConfig):
    """Dispatch one experiment; returns (rows, all_checks_passed)."""
    rows, ok = _RUNNERS[cfg.experiment](cfg)
    return canonical_rows(rows), ok
