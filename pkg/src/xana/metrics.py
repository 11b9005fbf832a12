"""Gaussian rates, leakage, equivocation and high-SNR slope estimates.

All information quantities are in bits. Rates reported against a plan are
divided by the extension length so they are per channel use (slot).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import EVE

DELTA_CLAMP_TOL = 1e-12


class MetricError(ValueError):
    pass


def _weighted_stack(groups, rows=None):
    """Stack ``G_g * sqrt(p_g)`` column-wise; ``groups`` holds ``(G, powers)`` pairs."""
    mats = []
    for G, p in groups:
        G = np.asarray(G, dtype=complex)
        if G.ndim == 1:
            G = G[:, None]
        p = np.broadcast_to(np.asarray(p, dtype=float), (G.shape[1],))
        if np.any(p < 0):
            raise MetricError("stream powers must be nonnegative")
        if rows is not None and G.shape[0] != rows:
            raise MetricError(f"row count {G.shape[0]} differs from {rows}")
        rows = G.shape[0]
        mats.append(G * np.sqrt(p)[None, :])
    return mats, rows


def log2det_noise_plus(mats, noise_power=1.0):
    """``log2 det(I + sum W W^H / noise)`` via the singular values of ``[W ...]``."""
    if not mats:
        return 0.0
    W = np.hstack(mats) / np.sqrt(noise_power)
    if W.size == 0:
        return 0.0
    if not np.all(np.isfinite(W)):
        raise MetricError("non-finite entries in effective channel; cannot form covariance")
    try:
        s = np.linalg.svd(W, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK non-convergence
        norms = np.linalg.norm(W, axis=0)
        raise MetricError(
            f"SVD failed on {W.shape} covariance factor (column norms {norms.min():.3e}..{norms.max():.3e})"
        ) from exc
    return float(np.sum(np.log2(1.0 + s**2)))


def gaussian_mi(target_groups, other_groups, noise_power=1.0):
    """Mutual information between Gaussian target streams and the received vector.

    Parameters
    ----------
    target_groups, other_groups : list of (matrix, powers)
        Effective channel blocks with per-stream powers (scalar or one per
        column). Non-target groups act as Gaussian interference.
    noise_power : float
        Variance of the white receiver noise.

    Returns
    -------
    float
        ``log2det(I + R_all) - log2det(I + R_other)``, never negative.
    """
    if not target_groups:
        return 0.0
    if noise_power <= 0:
        raise MetricError("noise power must be positive")
    tmats, rows = _weighted_stack(target_groups)
    omats, _ = _weighted_stack(other_groups, rows)
    mi = log2det_noise_plus(tmats + omats, noise_power) - log2det_noise_plus(omats, noise_power)
    return max(mi, 0.0)


def _groups_at(eff, obs, names, P):
    plan = eff.plan
    return [(eff[obs][n], P * plan.group(n).power_share) for n in names]


def receiver_rate(eff, k, P):
    """Sum rate of the messages intended for ``k``, other streams as noise, per slot."""
    sig = eff.signal_names(k)
    others = eff.interference_names(k)
    mi = gaussian_mi(_groups_at(eff, k, sig, P), _groups_at(eff, k, others, P))
    return mi / eff.L


def unintended_messages(eff, observer):
    """Names of message groups not intended for ``observer`` (all of them for eve)."""
    return [g.name for g in eff.plan.message_groups if g.intended_rx != observer]


def leakage(eff, observer, targets, P):
    """Information about the ``targets`` message groups at ``observer``, per slot."""
    targets = list(targets)
    if not targets:
        raise MetricError("empty target message set")
    plan = eff.plan
    for name in targets:
        g = plan.group(name)
        if not g.is_message:
            raise MetricError(f"{name} is not a message group")
        if observer != EVE and g.intended_rx == observer:
            raise MetricError(f"{name} is intended for observer {observer}; leakage is undefined")
    others = [g.name for g in plan.groups if g.name not in set(targets)]
    mi = gaussian_mi(_groups_at(eff, observer, targets, P), _groups_at(eff, observer, others, P))
    return mi / eff.L


def target_rate(eff, targets, P):
    """Gaussian rate of ``targets`` at their intended receivers, per slot.

    Each intended receiver decodes its own target groups jointly with all other
    streams treated as noise; contributions are summed over receivers.
    """
    plan = eff.plan
    by_rx = {}
    for name in targets:
        by_rx.setdefault(plan.group(name).intended_rx, []).append(name)
    total = 0.0
    for rx, names in by_rx.items():
        others = [g.name for g in plan.groups if g.name not in set(names)]
        total += gaussian_mi(_groups_at(eff, rx, names, P), _groups_at(eff, rx, others, P))
    return total / eff.L


def equivocation_fraction(eff, observer, targets, P):
    """``1 - leakage / rate`` of the targets, clamped to ``[0, 1]``."""
    targets = list(targets)
    leak = leakage(eff, observer, targets, P)
    rate = target_rate(eff, targets, P)
    if rate <= 0:
        raise MetricError("equivocation is only defined for targets with positive rate")
    return delta_from(leak, rate)


def delta_from(leak, rate):
    # leakage can exceed the surrogate rate at low SNR, hence the clamp
    delta = 1.0 - leak / rate
    if abs(delta) < DELTA_CLAMP_TOL:
        delta = 0.0
    return float(min(max(delta, 0.0), 1.0))


@dataclass
class RateReport:
    P: float
    rates: dict
    leakage: dict
    delta: dict = field(default_factory=dict)

    @property
    def network_rate(self):
        return float(sum(self.rates.values()))


def rate_report(eff, P):
    """Per-receiver rates plus leakage/equivocation of unintended messages at every observer."""
    K = eff.plan.dims["K"]
    rates = {k: (receiver_rate(eff, k, P) if P > 0 else 0.0) for k in range(1, K + 1)}
    leaks, deltas = {}, {}
    for obs in eff.observers:
        targets = unintended_messages(eff, obs)
        if P <= 0:
            leaks[obs] = 0.0
            deltas[obs] = 1.0
            continue
        leaks[obs] = leakage(eff, obs, targets, P)
        rate = target_rate(eff, targets, P)
        deltas[obs] = delta_from(leaks[obs], rate) if rate > 0 else float("nan")
    return RateReport(P, rates, leaks, deltas)


@dataclass
class SdofEstimate:
    slope: float
    intercept: float
    r_squared: float
    grid: list


def sdof_slope(points, min_span_db=20.0):
    """Least-squares slope of rate versus ``log2 P``.

    ``points`` is a sequence of ``(P, rate)`` with ``P`` strictly increasing,
    at least three points spanning ``min_span_db``.
    """
    pts = [(float(p), float(r)) for p, r in points]
    if len(pts) < 3:
        raise MetricError(f"need at least 3 grid points, got {len(pts)}")
    P = np.array([p for p, _ in pts])
    R = np.array([r for _, r in pts])
    if np.any(P <= 0) or np.any(np.diff(P) <= 0):
        raise MetricError("powers must be positive and strictly increasing")
    if 10 * np.log10(P[-1] / P[0]) < min_span_db - 1e-9:
        raise MetricError(f"grid spans less than {min_span_db} dB")
    x = np.log2(P)
    slope, intercept = np.polyfit(x, R, 1)
    resid = R - (slope * x + intercept)
    ss_tot = float(np.sum((R - R.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return SdofEstimate(float(slope), float(intercept), float(min(max(r2, 0.0), 1.0)), pts)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def default_grid_db(pmin_db=60.0, pmax_db=120.0, points=7):
    return np.linspace(pmin_db, pmax_db, points).tolist()
