"""Acceptance criteria, each checked at its stated tolerance.

Every test records a PASS/FAIL line through ``record_criterion``; the lines are
printed together in the "acceptance criteria" section of the pytest summary.
"""

import math
import subprocess
import sys
import time
import warnings

import numpy as np

from ncsqueeze import sweep
from ncsqueeze.beamsplitter import make_config, mix_with_vacuum
from ncsqueeze.entanglement import (
    entropy_of_state,
    entropy_quadruple_sum_oracle,
    jacobi_eigenvalues,
    linear_entropy,
    reduce_over_d,
)
from ncsqueeze.model import DeformedOscillator
from ncsqueeze.states import (
    StateSpec,
    TruncationWarning,
    build_state,
    closed_form_I,
    converge_truncation,
    fock_state,
    ho_squeezed,
    nc_squeezed,
    recurrence_I,
)

ALPHAS = (0.0, 0.5, 1.0, 2.0)
ZETAS = (0.25, 0.75)


def test_01_single_photon(record_criterion):
    bs = make_config()
    res = entropy_of_state(fock_state(1), bs, von_neumann=True)
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        entropy_of_state(fock_state(1), bs, von_neumann=True)
        best = min(best, time.perf_counter() - t0)
    dS, dV = abs(res.linear_entropy - 0.5), abs(res.von_neumann - 1.0)
    ok = dS <= 1e-12 and dV <= 1e-9 and best < 1e-3
    record_criterion(1, "single-photon benchmark", ok,
                     f"|dS|={dS:.2g} |dS_vN|={dV:.2g} t={best * 1e3:.3f} ms")
    assert ok


def test_02_coherent_classicality(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        vec, converged = converge_truncation(StateSpec("nc_coherent", alpha, 0, DeformedOscillator(0.0)), 1e-10)
        assert converged
        worst = max(worst, entropy_of_state(vec, make_config()).linear_entropy)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 1.0
    record_criterion(2, "coherent classicality at tau=0", ok, f"max S={worst:.2g} t={elapsed:.3f} s")
    assert ok


def test_03_recurrence_vs_hypergeometric(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for tau in (0.1, 0.5):
        model = DeformedOscillator(tau)
        for zeta in ZETAS:
            for alpha in ALPHAS:
                vals = recurrence_I(alpha, zeta, model, 30).values
                for n in range(31):
                    ref = closed_form_I(alpha, zeta, model, n)
                    worst = max(worst, abs(vals[n] - ref) / max(abs(ref), 1e-300))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 1.0
    record_criterion(3, "recurrence vs hypergeometric", ok, f"max rel dev={worst:.2g} t={elapsed:.3f} s")
    assert ok


def test_04_tau_zero_reduction(record_criterion):
    model = DeformedOscillator(0.0)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for zeta in ZETAS:
            for alpha in ALPHAS:
                a = nc_squeezed(alpha, zeta, model, 40).coeffs
                b = ho_squeezed(alpha, zeta, 40).coeffs
                worst = max(worst, float(np.max(np.abs(a - b))))
    ok = worst <= 1e-9
    record_criterion(4, "tau=0 Hermite reduction", ok, f"max |dc|={worst:.2g}")
    assert ok


def test_05_oracle_equivalence(record_criterion):
    t0 = time.perf_counter()
    bs = make_config()
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for alpha in (0.5, 1.0, 2.0):
            spec = StateSpec("nc_squeezed", alpha, 0.5, DeformedOscillator(0.5))
            matrix = entropy_of_state(build_state(spec, 10), bs).linear_entropy
            worst = max(worst, abs(matrix - entropy_quadruple_sum_oracle(spec, bs, 10)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10.0
    record_criterion(5, "matrix path vs quadruple sum", ok, f"max |dS|={worst:.2g} t={elapsed:.3f} s")
    assert ok


def test_06_fig2_ordering(record_criterion):
    t0 = time.perf_counter()
    min_gap, total = math.inf, 0
    for name in ("fig2a", "fig2b"):
        _, rows = sweep.run_figure(name)
        assert all(r["error"] is None for r in rows)
        total += len(rows)
        min_gap = min(min_gap, min(r["S_nc"] - r["S_ho"] for r in rows))
    elapsed = time.perf_counter() - t0
    ok = min_gap > 1e-12 and total == 2 * 61 and elapsed < 120.0
    record_criterion(6, "deformed squeezed above ordinary (fig2)", ok,
                     f"min S_nc-S_ho={min_gap:.3g} over {total} points t={elapsed:.2f} s")
    assert ok


def test_07_fig3_monotone_and_saturating(record_criterion):
    cfg = sweep.SweepConfig("nc_squeezed", (0.5, 1.0, 2.0), 0.5, "0:1:0.05", levels=10)
    rows = sweep.run_sweep(cfg)
    taus = sweep.grid_range(0, 1, 0.05)
    failures = []
    for alpha in (0.5, 1.0, 2.0):
        S = [r["linear_entropy"] for r in rows if r["alpha"] == alpha]
        assert len(S) == len(taus) == 21
        diffs = np.diff(S)
        quarter = len(diffs) // 4
        if diffs.min() < -1e-9:
            failures.append(f"a={alpha}: min dS={diffs.min():.3g}")
        early, late = diffs[:quarter].max(), diffs[-quarter:]
        if not np.all(late < early):
            failures.append(f"a={alpha}: late max {late.max():.3g} >= early max {early:.3g}")
    ok = not failures
    record_criterion(7, "fig3 monotone in tau and saturating", ok, "; ".join(failures))
    assert ok, failures


def test_08_fig1_coherent_ordering(record_criterion):
    def S(tau):
        vec = build_state(StateSpec("nc_coherent", 1.0, 0, DeformedOscillator(tau)), 20)
        return entropy_of_state(vec, make_config()).linear_entropy

    s0, s1, s3, s5 = S(0.0), S(0.1), S(0.3), S(0.5)
    ok = s3 > s1 > s0 and s0 <= 1e-6 and s5 > 0
    record_criterion(8, "fig1 coherent-state ordering", ok,
                     f"S(0)={s0:.2g} S(.1)={s1:.3g} S(.3)={s3:.3g} S(.5)={s5:.3g}")
    assert ok


def test_09_structural_properties(record_criterion):
    rng = np.random.default_rng(20240917)
    t0 = time.perf_counter()
    problems = []
    for trial in range(200):
        N = int(rng.integers(1, 13))
        c = rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1)
        c /= np.linalg.norm(c)
        theta, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        out = mix_with_vacuum(c, make_config(theta, phi))
        rho = reduce_over_d(out)
        e = rho.entries
        S = linear_entropy(rho).linear_entropy
        S0 = linear_entropy(reduce_over_d(mix_with_vacuum(c, make_config(theta, 0.0)))).linear_entropy
        anti = [math.fsum(abs(out.amps[q, n - q]) ** 2 for q in range(n + 1)) for n in range(N + 1)]
        checks = {
            "hermitian": np.max(np.abs(e - e.conj().T)) <= 1e-12,
            "trace": abs(rho.trace() - 1) <= 1e-12,
            "psd": jacobi_eigenvalues(e).min() >= -1e-10,
            "bounds": -1e-12 <= S <= 1 - 1 / (N + 1) + 1e-12,
            "phi": abs(S - S0) <= 1e-12,
            "antidiagonal": np.max(np.abs(np.array(anti) - np.abs(c) ** 2)) <= 1e-12,
        }
        problems += [f"#{trial} {k}" for k, v in checks.items() if not v]
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 30.0
    record_criterion(9, "structural properties over 200 random inputs", ok,
                     f"violations={len(problems)} t={elapsed:.2f} s")
    assert ok, problems[:10]


def test_10_figure_determinism(record_criterion, tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        proc = subprocess.run([sys.executable, "-m", "ncsqueeze", "figure", "fig3", "-o", str(path)],
                              capture_output=True, check=False)
        assert proc.returncode in (0, 3), proc.stderr
        outputs.append(path.read_bytes())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    record_criterion(10, "fig3 CSV byte-identical across runs", ok, f"{len(outputs[0])} bytes")
    assert ok
