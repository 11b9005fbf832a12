"""Independent audit of a plan's alignment relations and rank conditions."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import RANK_TOL_FACTOR, SPAN_TOL, numeric_rank, span_contained
from .network import EVE
from .schemes import Scheme, effective_channels


@dataclass
class Relation:
    description: str
    residual: float
    contained: bool


@dataclass
class RankCheck:
    name: str
    rank: int
    expected: int

    @property
    def ok(self):
        return self.rank == self.expected


@dataclass
class AlignmentReport:
    relations: list = field(default_factory=list)
    ranks: list = field(default_factory=list)

    @property
    def overall_pass(self):
        return all(r.contained for r in self.relations) and all(r.ok for r in self.ranks)

    @property
    def max_residual(self):
        return max((r.residual for r in self.relations), default=0.0)

    def to_dict(self):
        return {
            "relations": [asdict(r) for r in self.relations],
            "ranks": [dict(asdict(r), ok=r.ok) for r in self.ranks],
            "overall_pass": self.overall_pass,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def table(self):
        lines = [f"{'check':<58}{'value':>14}  result"]
        for r in self.relations:
            lines.append(f"{r.description:<58}{r.residual:>14.3e}  {'PASS' if r.contained else 'FAIL'}")
        for r in self.ranks:
            lines.append(f"{'rank ' + r.name:<58}{f'{r.rank}/{r.expected}':>14}  {'PASS' if r.ok else 'FAIL'}")
        lines.append(f"overall: {'PASS' if self.overall_pass else 'FAIL'}")
        return "\n".join(lines)


def check_alignment(plan, channels, span_tol=SPAN_TOL, rank_factor=RANK_TOL_FACTOR):
    """Audit every alignment relation and expected rank demanded by ``plan``.

    Effective channels are recomposed from ``channels`` here rather than taken
    from the builder, so a tampered or mismatched plan is caught.
    """
    eff = effective_channels(plan, channels)
    report = AlignmentReport()

    def contain(desc, B, A):
        ok, res = span_contained(B, A, tol=span_tol, rank_factor=rank_factor)
        report.relations.append(Relation(desc, res, bool(ok)))

    def rank(name, A, expected):
        report.ranks.append(RankCheck(name, numeric_rank(A, factor=rank_factor), int(expected)))

    dims = plan.dims
    if plan.scheme is Scheme.MX2:
        M = dims["M"]
        for k in (1, 2):
            other = 3 - k
            noise = eff[k]["Phi[1]"]
            for j in range(2, M + 1):
                contain(f"rx{k}: H{k}{j} Phi[{other},{j}] < H{k}1 Phi[1]", eff[k][f"Phi[{other},{j}]"], noise)
        for k in (1, 2):
            rank(f"Lambda[{k}]", eff.composite(k), M)
    elif plan.scheme is Scheme.ASYMPTOTIC:
        M, K, mu_n = dims["M"], dims["K"], dims["mu_n"]
        observers = list(range(1, K + 1)) + ([EVE] if dims["include_eve"] else [])
        for j in range(1, K + 1):
            for k in observers:
                if k == j:
                    continue
                noise = eff[k][f"Phi[{j},1]"]
                for m in range(2, M + 1):
                    contain(f"block {j} @ {k}: H{k}{m} Phi[{j},{m}] < H{k}1 Phi[{j},1]", eff[k][f"Phi[{j},{m}]"], noise)
        for k in range(1, K + 1):
            rank(f"C[{k}]", eff.composite(k), mu_n)
    elif plan.scheme is Scheme.BLIND:
        M, alpha = dims["M"], dims["alpha"]
        for k in (1, 2):
            j = 3 - k
            Q = np.hstack([eff[k][f"mu[{j}]"], eff[k][f"nu[{j}]"]])
            Qbar = eff[k][f"nu[{j}]"]
            G = eff.composite(k)
            rank(f"G[{k}]", G, M * alpha)
            rank(f"Q[{j}] at rx{k}", Q, alpha)
            rank(f"H{k} Phi[{j}] V_nu", Qbar, alpha)
            rank(f"[G[{k}] Q[{j}]] at rx{k}", np.hstack([G, Q]), M * alpha + alpha)
            contain(f"rx{k}: H{k} Phi[{j}] V_mu < H{k} Phi[{j}] V_nu", eff[k][f"mu[{j}]"], Qbar)
    else:
        raise ValueError(f"unknown scheme {plan.scheme!r}")
    return report
