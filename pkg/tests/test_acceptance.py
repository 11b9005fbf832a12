"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import time
from fractions import Fraction

import numpy as np
import pytest

from xana.bounds import (
    achieved_sdof_finite_n,
    sdof_lower_xncm,
    sdof_lower_xncm_ee,
    sdof_upper_xncm,
    sdof_upper_xncm_ee,
)
from xana.cli import main
from xana.harness import ScenarioConfig, run_scenario
from xana.linalg import PreconditionError, noise_dominance
from xana.metrics import gaussian_mi
from xana.schemes import asymptotic_dims, blind_beamformers

from conftest import crandn, record
from test_metrics import random_groups
from test_schemes import PAPER_PHI_M2, PAPER_PHI_M3, PAPER_V_M3

pytestmark = pytest.mark.acceptance

ALIGN_TOL = 1e-8
SLOPE_TOL = 0.05
LEAK_TOL = 0.02


def test_c1_bounds_exact():
    t0 = time.perf_counter()
    failures = []
    for M in range(2, 9):
        for K in range(2, 9):
            # oracle: the same formulas rearranged over a common denominator
            up = Fraction(K * M - K, K + M - 2)
            lo = Fraction(2 * M - 2, M) if K == 2 else Fraction(K * M - K, K + M - 1)
            up_ee = Fraction((K * M - K) * M, M * (K + M - 2) + 1)
            got = (sdof_upper_xncm(M, K), sdof_lower_xncm(M, K), sdof_upper_xncm_ee(M, K))
            if got != (up, lo, up_ee):
                failures.append((M, K, got))
            if not sdof_lower_xncm_ee(M, K) <= sdof_upper_xncm_ee(M, K) <= sdof_upper_xncm(M, K):
                failures.append((M, K, "order"))
            for n in (1, 2, 3):
                g = K * (M - 1)
                want = Fraction(K * (M - 1) * n**g, K * (n + 1) ** g + (M - 1) * n**g)
                if achieved_sdof_finite_n(M, K, n) != want:
                    failures.append((M, K, n))
    corner = sdof_upper_xncm(2, 2) == sdof_lower_xncm(2, 2) == 1
    elapsed = time.perf_counter() - t0
    ok = not failures and corner and elapsed < 1.0
    record("C1 bounds exactness", ok, f"failures={len(failures)} (2,2)->1:{corner} t={elapsed:.3f}s")
    assert ok, failures[:5]


@pytest.mark.parametrize("M", [2, 3, 4, 5])
def test_c2_mx2(M, request):
    t0 = time.perf_counter()
    seeds = 1000
    res = run_scenario(ScenarioConfig(scheme="mx2", M=M, trials=seeds))
    residuals = [r.residual for t in res.trials for r in t.alignment.relations]
    full_rank = sum(all(r.ok for r in t.alignment.ranks) for t in res.trials)
    done = res.completed()
    target = 2 * (M - 1) / M
    slope_err = max(abs(t.rate_slopes["network"].slope - target) for t in done)
    leak = max(abs(t.leakage_slopes[k].slope) for t in done for k in (1, 2))
    delta = min(t.reports[-1].delta[k] for t in done for k in (1, 2))
    elapsed = time.perf_counter() - t0
    ok = (
        max(residuals) < ALIGN_TOL
        and full_rank >= 999
        and slope_err <= SLOPE_TOL
        and leak < LEAK_TOL
        and delta >= 0.9
        and elapsed < 120
    )
    record(
        f"C2 Mx2 M={M}",
        ok,
        f"max_res={max(residuals):.1e} rank={full_rank}/{seeds} |slope-{target:.3f}|<={slope_err:.1e} "
        f"leak<={leak:.1e} delta>={delta:.3f} t={elapsed:.1f}s",
    )
    assert ok


@pytest.mark.parametrize("M,K,n", [(2, 2, 1), (2, 2, 2), (3, 2, 1), (2, 3, 1)])
def test_c3_asymptotic(M, K, n):
    t0 = time.perf_counter()
    seeds = 100
    res = run_scenario(ScenarioConfig(scheme="asymptotic", M=M, K=K, n=n, trials=seeds))
    gamma, mu_n = asymptotic_dims(M, K, n)
    counts_ok = all(len(t.alignment.relations) == K * gamma for t in res.trials)
    max_res = max(r.residual for t in res.trials for r in t.alignment.relations)
    full_rank = sum(all(r.ok and r.expected == mu_n for r in t.alignment.ranks) for t in res.trials)
    done = res.completed()
    target = K * (M - 1) * n**gamma / mu_n
    slope_err = max(abs(t.rate_slopes["network"].slope - target) for t in done)
    leak = max(abs(s.slope) for t in done for s in t.leakage_slopes.values())
    has_eve = all("eve" in t.leakage_slopes for t in done)
    elapsed = time.perf_counter() - t0
    ok = (
        counts_ok
        and max_res < ALIGN_TOL
        and full_rank >= 99
        and slope_err <= SLOPE_TOL
        and leak < LEAK_TOL
        and has_eve
        and elapsed < 300
    )
    record(
        f"C3 asymptotic (M,K,n)=({M},{K},{n})",
        ok,
        f"relations={K * gamma} max_res={max_res:.1e} rank={full_rank}/{seeds} "
        f"|slope-{target:.4f}|<={slope_err:.1e} leak<={leak:.1e} t={elapsed:.1f}s",
    )
    assert ok


def test_c4_blind():
    t0 = time.perf_counter()
    phis2, V2 = blind_beamformers(2)
    phis3, V3 = blind_beamformers(3)
    exact = (
        all(np.array_equal(phis2[k], PAPER_PHI_M2[k]) for k in (1, 2))
        and all(np.array_equal(phis3[k], PAPER_PHI_M3[k]) for k in (1, 2))
        and np.array_equal(V3, PAPER_V_M3)
    )
    details = [f"exact={exact}"]
    ok = exact
    for M in (2, 3):
        draws = 1000
        res = run_scenario(ScenarioConfig(scheme="blind", M=M, trials=draws))
        rank_ok = sum(all(r.ok for r in t.alignment.ranks) for t in res.trials)
        done = res.completed()
        target = (M - 1) / (M + 1)
        slope_err = max(abs(t.rate_slopes[k].slope - target) for t in done for k in (1, 2))
        leak = max(abs(s.slope) for t in done for s in t.leakage_slopes.values())
        ok = ok and rank_ok >= 999 and slope_err <= SLOPE_TOL and leak < LEAK_TOL
        details.append(f"M={M}: rank={rank_ok}/{draws} |slope-{target:.3f}|<={slope_err:.1e} leak<={leak:.1e}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    record("C4 blind", ok, " ".join(details) + f" t={elapsed:.1f}s")
    assert ok


def test_c5_noise_dominance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    true_count = 0
    for _ in range(1000):
        rows = int(rng.integers(2, 9))
        cols = int(rng.integers(1, rows + 1))
        rank = int(rng.integers(1, cols + 1))
        A = crandn(rng, rows, rank) @ crandn(rng, rank, cols)
        Bs = [A @ crandn(rng, cols, int(rng.integers(1, cols + 1))) for _ in range(int(rng.integers(1, 4)))]
        lam = rng.uniform(0, 10, len(Bs)).tolist()
        true_count += bool(noise_dominance(A, Bs, lam))
    raised = 0
    for _ in range(100):
        rows = int(rng.integers(3, 9))
        cols = int(rng.integers(1, rows))
        A = crandn(rng, rows, cols)
        try:
            noise_dominance(A, [crandn(rng, rows, 1)], [1.0])
        except PreconditionError:
            raised += 1
    elapsed = time.perf_counter() - t0
    ok = true_count == 1000 and raised == 100 and elapsed < 10
    record("C5 noise dominance", ok, f"in-span true={true_count}/1000 out-of-span errors={raised}/100 t={elapsed:.2f}s")
    assert ok


def test_c6_metrics_consistency():
    rng = np.random.default_rng(7)
    chain = 0.0
    for _ in range(100):
        rows = int(rng.integers(1, 7))
        S, T, O = (random_groups(rng, rows, 2) for _ in range(3))
        joint = gaussian_mi(S + T, O)
        chain = max(
            chain,
            abs(joint - gaussian_mi(S, T + O) - gaussian_mi(T, O)),
            abs(joint - gaussian_mi(T, S + O) - gaussian_mi(S, O)),
        )
    monotone = 0
    for _ in range(100):
        rows = int(rng.integers(1, 7))
        t, o = random_groups(rng, rows, 2), random_groups(rng, rows, 2)
        base = gaussian_mi(t, o)
        i = int(rng.integers(0, 2))
        t[i] = (t[i][0], t[i][1] * (1 + rng.uniform(0.1, 10)))
        monotone += gaussian_mi(t, o) >= base - 1e-12
    one = np.array([[1.0]])
    scalar = abs(gaussian_mi([(one, 100.0)], [(one, 100.0)]) - np.log2(201 / 101))
    ok = chain < 1e-9 and monotone == 100 and scalar < 1e-12
    record("C6 metrics self-consistency", ok, f"chain={chain:.1e} monotone={monotone}/100 scalar_err={scalar:.1e}")
    assert ok


def test_c7_determinism(tmp_path):
    cases = [
        ["run", "--scheme", "mx2", "--M", "3", "--trials", "3", "--seed", "5"],
        ["run", "--scheme", "asymptotic", "--M", "2", "--K", "3", "--n", "1", "--seed", "2", "--workers", "2"],
        ["run", "--scheme", "blind", "--M", "3", "--trials", "2", "--seed", "9"],
        ["sweep", "--scheme", "mx2", "--vary", "M=2,3,4", "--seed", "1"],
    ]
    identical = 0
    for i, args in enumerate(cases):
        outs = []
        for rep in range(2):
            path = tmp_path / f"c{i}_{rep}.csv"
            assert main(args + ["--out", str(path)]) == 0
            outs.append(path.read_bytes())
        identical += outs[0] == outs[1] and len(outs[0]) > 0
    ok = identical == len(cases)
    record("C7 determinism", ok, f"byte-identical {identical}/{len(cases)} CLI runs")
    assert ok
