"""Scenario runner: draw channels, build, verify, measure, compare to bounds."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .linalg import RANK_TOL_FACTOR, SPAN_TOL
from .metrics import db_to_linear, default_grid_db, rate_report, sdof_slope
from .network import (
    EVE,
    NetworkSpec,
    Variant,
    blind_switch_pattern,
    build_switching_channels,
    draw_varying_channels,
)
from .schemes import (
    MU_N_CAP,
    Scheme,
    asymptotic_dims,
    build_asymptotic_ana,
    build_blind_ana,
    build_mx2_ana,
    effective_channels,
)
from .verify import check_alignment

CSV_HEADER = [
    "scheme", "M", "K", "n", "seed", "trial", "P_db", "receiver", "rate_bps",
    "leakage_bps", "delta", "slope", "lower_bound", "upper_bound", "within", "config_hash",
]

LEAKAGE_SLOPE_TOL = 0.02


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    scheme: str = "mx2"
    M: int = 2
    K: int = 2
    n: int = 1
    include_eve: bool = True
    seed: int = 0
    trials: int = 1
    P_grid_db: list = field(default_factory=default_grid_db)
    align_tol: float = SPAN_TOL
    rank_factor: float = RANK_TOL_FACTOR
    slope_tol: float = 0.05
    experimental_blind: bool = False
    workers: int = 1
    out: str | None = None

    def validate(self):
        try:
            scheme = Scheme(self.scheme)
        except ValueError:
            raise ConfigError(f"unknown scheme {self.scheme!r}") from None
        if self.M < 2 or self.K < 2:
            raise ConfigError(f"need M >= 2 and K >= 2, got M={self.M}, K={self.K}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        grid = list(self.P_grid_db)
        if len(grid) < 3 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("P grid needs at least 3 strictly ascending points")
        if grid[-1] - grid[0] < 20:
            raise ConfigError("P grid must span at least 20 dB")
        if scheme in (Scheme.MX2, Scheme.BLIND) and self.K != 2:
            raise ConfigError(f"scheme {scheme.value} requires K = 2")
        if scheme is Scheme.BLIND and self.M > 3 and not self.experimental_blind:
            raise ConfigError("blind scheme with M > 3 needs --experimental-blind-m")
        if scheme is Scheme.ASYMPTOTIC:
            if self.n < 1:
                raise ConfigError("n must be >= 1")
            _, mu_n = asymptotic_dims(self.M, self.K, self.n, self.include_eve)
            if mu_n > MU_N_CAP:
                raise ConfigError(f"mu_n = {mu_n} exceeds the cap of {MU_N_CAP}")
        return self

    @property
    def scheme_enum(self):
        return Scheme(self.scheme)

    def identity(self):
        d = dataclasses.asdict(self)
        for key in ("out", "workers"):
            d.pop(key)
        if self.scheme_enum is not Scheme.ASYMPTOTIC:
            d.pop("n")
            d.pop("include_eve")
        d["P_grid_db"] = [float(x) for x in d["P_grid_db"]]
        return d

    def config_hash(self):
        blob = json.dumps(self.identity(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


def scheme_targets(cfg):
    """``(network target, network upper bound)`` as exact fractions."""
    M, K = cfg.M, cfg.K
    scheme = cfg.scheme_enum
    if scheme is Scheme.MX2:
        return bounds.sdof_lower_xncm(M, 2), bounds.sdof_upper_xncm(M, 2)
    if scheme is Scheme.ASYMPTOTIC:
        gamma, _ = asymptotic_dims(M, K, cfg.n, cfg.include_eve)
        target = bounds.achieved_sdof_finite_n(M, K, cfg.n, gamma)
        upper = bounds.sdof_upper_xncm_ee(M, K) if cfg.include_eve else bounds.sdof_upper_xncm(M, K)
        return target, upper
    return K * bounds.blind_per_receiver(M, K), bounds.sdof_upper_xncm(M, K)


def build_trial(cfg, seed):
    """Draw channels and build the plan for one trial seed."""
    scheme = cfg.scheme_enum
    M, K = cfg.M, cfg.K
    if scheme is Scheme.MX2:
        ch = draw_varying_channels(NetworkSpec(M, 2, Variant.XNCM_VARYING, L=M), seed)
        plan = build_mx2_ana(ch, M, seed)
    elif scheme is Scheme.ASYMPTOTIC:
        _, mu_n = asymptotic_dims(M, K, cfg.n, cfg.include_eve)
        variant = Variant.XNCM_EXTERNAL_EVE if cfg.include_eve else Variant.XNCM_VARYING
        ch = draw_varying_channels(NetworkSpec(M, K, variant, L=mu_n), seed)
        plan = build_asymptotic_ana(ch, M, K, cfg.n, include_eve=cfg.include_eve, seed=seed)
    else:
        ch = build_switching_channels(M, K, blind_switch_pattern(M, K), seed)
        plan = build_blind_ana(ch, M, K, experimental=cfg.experimental_blind)
    return ch, plan


@dataclass
class Comparison:
    measured: float
    lower: float
    upper: float
    within: bool


@dataclass
class TrialResult:
    trial: int
    seed: int
    alignment: object
    reports: list = field(default_factory=list)
    rate_slopes: dict = field(default_factory=dict)
    leakage_slopes: dict = field(default_factory=dict)
    comparisons: dict = field(default_factory=dict)

    @property
    def aborted(self):
        return not self.alignment.overall_pass

    def summary(self):
        return {
            "trial": self.trial,
            "seed": self.seed,
            "alignment_pass": self.alignment.overall_pass,
            "max_residual": self.alignment.max_residual,
            "rate_slopes": {str(k): v.slope for k, v in self.rate_slopes.items()},
            "leakage_slopes": {str(k): v.slope for k, v in self.leakage_slopes.items()},
            "comparisons": {str(k): dataclasses.asdict(v) for k, v in self.comparisons.items()},
        }


def _compare(measured, lower, upper, tol):
    return Comparison(measured, float(lower), float(upper), bool(lower - tol <= measured <= upper + tol))


def run_trial(cfg, trial):
    seed = cfg.seed + trial
    try:
        ch, plan = build_trial(cfg, seed)
    except ValueError as exc:
        raise RuntimeError(f"trial {trial} (seed {seed}): {exc}") from exc
    report = check_alignment(plan, ch, span_tol=cfg.align_tol, rank_factor=cfg.rank_factor)
    res = TrialResult(trial, seed, report)
    if res.aborted:
        return res
    eff = effective_channels(plan, ch)
    powers = db_to_linear(cfg.P_grid_db)
    res.reports = [rate_report(eff, float(P)) for P in powers]

    target, upper = scheme_targets(cfg)
    K = cfg.K
    for k in range(1, K + 1):
        est = sdof_slope([(r.P, r.rates[k]) for r in res.reports])
        res.rate_slopes[k] = est
        res.comparisons[k] = _compare(est.slope, target / K, upper, cfg.slope_tol)
    net = sdof_slope([(r.P, r.network_rate) for r in res.reports])
    res.rate_slopes["network"] = net
    res.comparisons["network"] = _compare(net.slope, target, upper, cfg.slope_tol)
    for obs in eff.observers:
        est = sdof_slope([(r.P, r.leakage[obs]) for r in res.reports])
        res.leakage_slopes[obs] = est
        if obs == EVE:
            res.comparisons[EVE] = _compare(est.slope, 0.0, 0.0, LEAKAGE_SLOPE_TOL)
    return res


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    trials: list

    def completed(self):
        return [t for t in self.trials if not t.aborted]

    def aggregate(self):
        done = self.completed()
        out = {"trials": len(self.trials), "aborted": len(self.trials) - len(done)}
        if not done:
            return out
        keys = list(done[0].rate_slopes)
        for key in keys:
            vals = np.array([t.rate_slopes[key].slope for t in done])
            out[f"slope_{key}"] = {"mean": float(vals.mean()), "min": float(vals.min()), "max": float(vals.max())}
        leak = np.array([max(t.leakage_slopes[o].slope for o in t.leakage_slopes) for t in done])
        out["max_leakage_slope"] = float(leak.max())
        out["all_within"] = all(c.within for t in done for c in t.comparisons.values())
        return out

    def to_dict(self):
        return {
            "config": self.config.identity(),
            "config_hash": self.config.config_hash(),
            "aggregate": self.aggregate(),
            "trials": [t.summary() for t in self.trials],
        }

    def rows(self):
        cfg = self.config
        h = cfg.config_hash()
        target, upper = scheme_targets(cfg)
        n = cfg.n if cfg.scheme_enum is Scheme.ASYMPTOTIC else ""
        out = []
        for t in self.completed():
            for P_db, rep in zip(cfg.P_grid_db, t.reports):
                receivers = list(range(1, cfg.K + 1))
                if EVE in rep.leakage:
                    receivers.append(EVE)
                for rx in receivers + ["network"]:
                    if rx == "network":
                        rate = rep.network_rate
                        leak = max(rep.leakage.values())
                        delta = min(rep.delta.values())
                    elif rx == EVE:
                        rate, leak, delta = 0.0, rep.leakage[EVE], rep.delta[EVE]
                    else:
                        rate, leak, delta = rep.rates[rx], rep.leakage[rx], rep.delta[rx]
                    slope = (t.leakage_slopes[EVE] if rx == EVE else t.rate_slopes[rx]).slope
                    cmp = t.comparisons[rx]
                    out.append([
                        cfg.scheme, cfg.M, cfg.K, n, t.seed, t.trial, _fmt(P_db), rx,
                        _fmt(rate), _fmt(leak), _fmt(delta), _fmt(slope),
                        _fmt(cmp.lower), _fmt(cmp.upper), int(cmp.within), h,
                    ])
        return out


def _fmt(x):
    return f"{float(x):.10g}"


def run_scenario(cfg):
    """Run every trial of ``cfg``; trials execute concurrently, results keep trial order."""
    cfg.validate()
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            trials = list(pool.map(lambda i: run_trial(cfg, i), range(cfg.trials)))
    else:
        trials = [run_trial(cfg, i) for i in range(cfg.trials)]
    return ScenarioResult(cfg, trials)


SWEEPABLE = ("M", "K", "n")


def sweep(template, vary):
    """Run ``template`` at every point of the cartesian product in ``vary``.

    ``vary`` is a sequence of ``(name, values)`` pairs over ``M``, ``K`` or ``n``.
    An empty ``vary`` runs the template once.
    """
    vary = list(vary)
    for name, _ in vary:
        if name not in SWEEPABLE:
            raise ConfigError(f"cannot sweep over {name!r}; choose from {SWEEPABLE}")
    names = [name for name, _ in vary]
    results = []
    for point in itertools.product(*[list(vals) for _, vals in vary]):
        cfg = template.replace(**dict(zip(names, point)))
        results.append(run_scenario(cfg))
    return results


def write_csv(results, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for res in results:
        w.writerows(res.rows())


def csv_text(results):
    buf = io.StringIO()
    write_csv(results, buf)
    return buf.getvalue()
