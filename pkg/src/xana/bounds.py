"""Closed-form secure-DOF bounds, in exact rational arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _check(M, K):
    if int(M) != M or int(K) != K or M < 2 or K < 2:
        raise ValueError(f"need integers M, K >= 2, got M={M}, K={K}")


def sdof_upper_xncm(M, K):
    """``K(M-1) / (K+M-2)``: converse for the network with confidential messages."""
    _check(M, K)
    return Fraction(K * (M - 1), K + M - 2)


def sdof_lower_xncm(M, K):
    """Achievable value: tight ``2(M-1)/M`` for two receivers, else ``K(M-1)/(K+M-1)``."""
    _check(M, K)
    if K == 2:
        return Fraction(2 * (M - 1), M)
    return Fraction(K * (M - 1), K + M - 1)


def sdof_upper_xncm_ee(M, K):
    """``K(M-1) / (K+M-2+1/M)``: converse with an external eavesdropper."""
    _check(M, K)
    return Fraction(K * (M - 1)) / (K + M - 2 + Fraction(1, M))


def sdof_lower_xncm_ee(M, K):
    _check(M, K)
    return Fraction(K * (M - 1), K + M - 1)


def achieved_sdof_finite_n(M, K, n, gamma=None):
    """SDOF of the asymptotic scheme at a finite ``n``.

    ``gamma`` defaults to ``K(M-1)``, the relation count with an eavesdropper.
    """
    _check(M, K)
    if int(n) != n or n < 1:
        raise ValueError(f"need integer n >= 1, got {n}")
    if gamma is None:
        gamma = K * (M - 1)
    num = K * (M - 1) * n**gamma
    return Fraction(num, K * (n + 1) ** gamma + (M - 1) * n**gamma)


def blind_per_receiver(M, K):
    _check(M, K)
    return Fraction(M - 1, M + K - 1)


@dataclass(frozen=True)
class BoundSet:
    M: int
    K: int
    upper_xncm: Fraction
    lower_xncm: Fraction
    upper_xncm_ee: Fraction
    lower_xncm_ee: Fraction
    finite_n_achieved: Fraction | None = None

    @property
    def tight(self):
        return self.upper_xncm == self.lower_xncm


def bound_set(M, K, n=None):
    return BoundSet(
        M,
        K,
        sdof_upper_xncm(M, K),
        sdof_lower_xncm(M, K),
        sdof_upper_xncm_ee(M, K),
        sdof_lower_xncm_ee(M, K),
        achieved_sdof_finite_n(M, K, n) if n is not None else None,
    )


def format_table(bs):
    rows = [
        ("upper (XNCM)", bs.upper_xncm),
        ("lower (XNCM)", bs.lower_xncm),
        ("upper (XNCM-EE)", bs.upper_xncm_ee),
        ("lower (XNCM-EE)", bs.lower_xncm_ee),
    ]
    if bs.finite_n_achieved is not None:
        rows.append(("achieved (finite n)", bs.finite_n_achieved))
    lines = [f"M={bs.M} K={bs.K} tight={'yes' if bs.tight else 'no'}", f"{'bound':<22}{'exact':>10}{'decimal':>12}"]
    for label, val in rows:
        lines.append(f"{label:<22}{str(val):>10}{float(val):>12.6f}")
    return "\n".join(lines)
