"""Acceptance gate: each test covers one numbered criterion and prints a
single PASS/FAIL line with the measured quantity at its pinned tolerance.

The expensive N = 2000 eigendecompositions are computed once per module and
shared between the sweep-based criteria.
"""

import math
import time

import numpy as np
import pytest

from regg.graphs import sample_matching_model, sample_model
from regg.invariance import (mm_exact_invariance, pm_exact_uniformity,
                             um_exact_invariance)
from regg.law import SweepPlan, fit_envelope_constant, records_for_view
from regg.manifest import RunManifest
from regg.observables import delocalization_stats, density_mass
from regg.rng import stream
from regg.spectral import (EnvelopeParams, ResolventView, build_H, default_xi,
                           m_semicircle, resolvent_solve)
from regg.stability import (ExchangeableEnsemble, MartingaleSpec,
                            exchangeable_matrix_bound_check,
                            exchangeable_moment_bound_check,
                            exchangeable_moment_exact, exchangeable_moment_mc,
                            ladder_sweep, simulate_martingale_tails,
                            stability_sweep)


def report(number: int, name: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {number:2d} {name}: {status} ({detail})", flush=True)
    assert passed, f"criterion {number} ({name}): {detail}"


E_GRID = tuple(round(-2.4 + 0.2 * k, 12) for k in range(25))
SWEEP_SEEDS = (0, 1, 2, 3, 4)


def _sweep(n: int, d: int, seeds) -> dict:
    """Law records, fitted constants, and per-(E, eta) Gamma values for the
    permutation-model sweep protocol."""
    plan = SweepPlan(e_grid=E_GRID,
                     eta_grid=SweepPlan.dyadic_etas(n, 64 / n),
                     samples=1, offdiag_pairs=10000)
    xi = default_xi(n)
    params = EnvelopeParams.for_model(n, d, "permutation", xi=xi)
    records = []
    gammas = []  # (seed, E, eta, gamma)
    for seed in seeds:
        g = sample_model("permutation", n, d, stream(seed, 0))
        view = ResolventView(build_H(g, "permutation"), pair_seed=seed)
        records.extend(records_for_view(view, "permutation", n, d, seed, 0,
                                        plan, params))
        zs = np.array([complex(E, eta) for E in plan.e_grid
                       for eta in plan.eta_grid])
        w = 1.0 / (view.eigenvalues[None, :] - zs[:, None])
        vec = view.eigenvectors
        dmax = np.abs((vec * vec) @ w.T).max(axis=0)
        i, j = view._pair_sample
        omax = np.abs((vec[i] * vec[j]) @ w.T).max(axis=0)
        gam = np.maximum(1.0, np.maximum(dmax, omax))
        gammas.extend((seed, z.real, z.imag, float(gv))
                      for z, gv in zip(zs, gam))
    constants = fit_envelope_constant(records, xi)
    return {"plan": plan, "xi": xi, "records": records, "gammas": gammas,
            "constants": constants}


@pytest.fixture(scope="module")
def sweep_2000():
    return _sweep(2000, 40, SWEEP_SEEDS)


@pytest.fixture(scope="module")
def views_2000_d30():
    views = []
    for seed in range(5):
        g = sample_model("permutation", 2000, 30, stream(seed, 0))
        views.append(ResolventView(build_H(g, "permutation")))
    return views


def test_criterion_1_exact_switching_invariance():
    start = time.monotonic()
    reports = [mm_exact_invariance(4), mm_exact_invariance(6),
               um_exact_invariance(6, 3), pm_exact_uniformity(4)]
    elapsed = time.monotonic() - start
    ok = all(r.exact_equal for r in reports) and elapsed < 120
    detail = (f"mm N=4/6, um N=6 d=3, pm N=4 all exact; "
              f"{elapsed:.1f}s < 120s")
    report(1, "exact-switching-invariance", ok, detail)


def test_criterion_2_ward_and_resolvent_consistency():
    rng = stream(100, 0)
    worst_ward = 0.0
    worst_solve = 0.0
    pairs = 0
    for gi in range(10):
        model = ("permutation", "matching", "uniform")[gi % 3]
        n = 2 * int(rng.integers(20, 151))  # even n fits every model's parity
        d = 4 if model != "uniform" else 3
        g = sample_model(model, n, d, rng)
        h = build_H(g, model)
        view = ResolventView(h)
        for _ in range(5):
            z = complex(rng.uniform(-2.5, 2.5), rng.uniform(0.05, 2.0))
            gm = view.full(z)
            ward = np.abs((np.abs(gm) ** 2).sum(axis=1)
                          - gm.diagonal().imag / z.imag)
            scale = np.abs(gm.diagonal().imag / z.imag).max()
            worst_ward = max(worst_ward, float(ward.max()) / scale)
            oracle = resolvent_solve(h.entries, z)
            worst_solve = max(worst_solve,
                              float(np.abs(gm - oracle).max()))
            pairs += 1
    ok = worst_ward <= 1e-10 and worst_solve <= 1e-8 and pairs == 50
    detail = (f"{pairs} (graph,z) pairs: Ward rel err {worst_ward:.2e} <= 1e-10, "
              f"eigen-vs-solve {worst_solve:.2e} <= 1e-8")
    report(2, "ward-identity-and-resolvent", ok, detail)


def test_criterion_3_semicircle_transform():
    rng = stream(101, 0)
    es = rng.uniform(-5, 5, size=10000)
    etas = np.exp(rng.uniform(math.log(1e-6), math.log(10), size=10000))
    worst = 0.0
    ok_domain = True
    for e, eta in zip(es, etas):
        z = complex(e, eta)
        m = m_semicircle(z)
        worst = max(worst, abs(m * m + z * m + 1))
        ok_domain = ok_domain and m.imag > 0 and abs(m) <= 1 + 1e-12
    fixed = abs(m_semicircle(1j) - 0.6180339887j) <= 1e-9
    ok = worst <= 1e-12 and ok_domain and fixed
    detail = (f"10^4-point residual {worst:.2e} <= 1e-12, m(i) pinned to 1e-9, "
              f"|m|<=1 and Im m>0 everywhere: {ok_domain}")
    report(3, "semicircle-stieltjes-transform", ok, detail)


def test_criterion_4_gamma_dyadic_monotonicity(sweep_2000):
    by_key = {(s, E, eta): g for s, E, eta, g in sweep_2000["gammas"]}
    violations = 0
    checked = 0
    etas = sweep_2000["plan"].eta_grid
    for (s, E, eta), g in by_key.items():
        half = eta / 2
        if (s, E, half) in by_key:
            checked += 1
            if by_key[(s, E, half)] > 2.0 * g + 1e-12:
                violations += 1
    ok = violations == 0 and checked == len(SWEEP_SEEDS) * len(E_GRID) * (len(etas) - 1)
    detail = f"{checked} dyadic ladder steps, {violations} violations"
    report(4, "gamma-halving-monotonicity", ok, detail)


def test_criterion_5_local_law_envelope(sweep_2000):
    start = time.monotonic()
    c2000 = sweep_2000["constants"]
    scale = {500: _sweep(500, 40, SWEEP_SEEDS)["constants"],
             1000: _sweep(1000, 40, SWEEP_SEEDS)["constants"],
             2000: c2000}
    elapsed = time.monotonic() - start
    stable = True
    for key in ("C_diag", "C_offdiag"):
        vals = [scale[n][key] for n in (500, 1000, 2000)]
        stable = stable and max(vals) <= 2.0 * min(vals)
    ok = (c2000["C_diag"] <= 10 and c2000["C_offdiag"] <= 10 and stable
          and elapsed < 1800)
    detail = (f"N=2000: C_diag={c2000['C_diag']:.3f} <= 10, "
              f"C_offdiag={c2000['C_offdiag']:.3f} <= 10; "
              f"2x-stable across N in (500,1000,2000): {stable}")
    report(5, "local-law-envelope", ok, detail)


def test_criterion_6_delocalization(views_2000_d30):
    bound = 10 * math.log(2000) ** 2
    worst = max(delocalization_stats(v)["normalized"] for v in views_2000_d30)
    ok = worst <= bound
    detail = f"N max v^2 = {worst:.2f} <= 10 (log N)^2 = {bound:.2f}, 5 seeds"
    report(6, "eigenvector-delocalization", ok, detail)


def test_criterion_7_kesten_mckay_histogram():
    n, d = 5000, 3
    edges = [round(-2.2 + 0.1 * k, 12) for k in range(45)]
    rhos = [density_mass(a, b, d) for a, b in zip(edges, edges[1:])]
    tvs = []
    for seed in range(3):
        g = sample_matching_model(n, d, stream(seed, 0))
        lam = np.linalg.eigvalsh(g.adj / math.sqrt(d - 1))
        tv = 0.0
        for (a, b), rho in zip(zip(edges, edges[1:]), rhos):
            nu = float(np.count_nonzero((lam >= a) & (lam < b))) / n
            tv += abs(nu - rho)
        tvs.append(tv)
    mean_tv = sum(tvs) / len(tvs)
    ok = mean_tv <= 0.03
    detail = (f"matching model d=3 N=5000, mean bin-TV {mean_tv:.4f} <= 0.03 "
              f"over 3 seeds")
    report(7, "kesten-mckay-density", ok, detail)


def test_criterion_8_quadratic_stability():
    start = time.monotonic()
    sweep = stability_sweep(npoints=10000, seed=0)
    ladder = ladder_sweep(ntracks=200, seed=1)
    elapsed = time.monotonic() - start
    ok = sweep["pass"] and ladder["pass"] and elapsed < 10
    detail = (f"10^4 points within 3F (worst ratio {sweep['worst_ratio']:.3f}), "
              f"ladder constant 10 (worst {ladder['worst_ratio']:.3f}); "
              f"{elapsed:.1f}s < 10s")
    report(8, "self-consistent-stability", ok, detail)


def test_criterion_9_arcsinh_tail_bound():
    spec = MartingaleSpec(step_bound=1.0, variances=(1.0,) * 100)
    out = simulate_martingale_tails(spec, runs=1000000, seed=0,
                                    xi_grid=(5.0, 10.0, 20.0, 30.0, 40.0, 50.0))
    worst = max((row["empirical"] / row["bound"] for row in out["rows"]
                 if row["bound"] > 0), default=0.0)
    detail = (f"10^6 runs, 100 steps: empirical <= bound at all xi "
              f"(worst ratio {worst:.3f})")
    report(9, "martingale-arcsinh-tails", out["pass"], detail)


def test_criterion_10_exchangeable_moments():
    vec = ExchangeableEnsemble((0.5, -0.5, 0.25, -0.25, 0.0, 0.0),
                               base_vector=(3.0, 1.0, -2.0, 0.5, 0.0, -1.0))
    mat_rows = tuple(tuple(float((i * 7 + j * 3) % 5 - 2) for j in range(6))
                     for i in range(6))
    sym = tuple(tuple((mat_rows[i][j] + mat_rows[j][i]) / 2 for j in range(6))
                for i in range(6))
    mat = ExchangeableEnsemble((0.5, -0.5, 0.25, -0.25, 0.0, 0.0),
                               base_matrix=sym)
    mc_ok = True
    for ens, p in ((vec, 2), (vec, 4), (vec, 6), (mat, 2), (mat, 4)):
        exact = float(exchangeable_moment_exact(ens, p))
        mean, se = exchangeable_moment_mc(ens, p, samples=200000, seed=p)
        mc_ok = mc_ok and abs(mean - exact) <= 4 * se
    bound_ok = all(exchangeable_moment_bound_check(vec, p, C=16.0)["pass"]
                   for p in (2, 4, 6))
    bound_ok = bound_ok and all(
        exchangeable_matrix_bound_check(mat, p, C=16.0)["pass"]
        for p in (2, 4, 6))
    ok = mc_ok and bound_ok
    detail = (f"exact-vs-MC within 4 SE: {mc_ok}; "
              f"vector+matrix bounds at C=16: {bound_ok}")
    report(10, "exchangeable-moment-bounds", ok, detail)


def test_criterion_11_que_flatness(views_2000_d30):
    n, size = 2000, 200
    bound = 10 * math.log(n) ** 4 * math.sqrt(size) / n
    a = np.zeros(n)
    a[:size] = 1.0
    a -= size / n
    worst = 0.0
    for view in views_2000_d30[:3]:
        stats = a @ (view.eigenvectors ** 2)
        worst = max(worst, float(np.abs(stats).max()))
    ok = worst <= bound
    detail = (f"max |sum_I v^2 - |I|/N| = {worst:.4f} <= {bound:.4f}, "
              f"all eigenvectors, 3 seeds")
    report(11, "que-eigenvector-flatness", ok, detail)


def test_criterion_12_manifest_rerun_reproducibility(tmp_path):
    from regg.cli import EXIT_OK, main, rerun_manifest

    out = tmp_path / "law.csv"
    argv = ["lawsweep", "--model", "permutation", "--n", "150", "--d", "10",
            "--seed", "13", "--samples", "2", "--e-min", "-1", "--e-max", "1",
            "--e-step", "0.5", "--eta-min", "0.4", "--out", str(out)]
    assert main(argv) == EXIT_OK
    redo = tmp_path / "law-rerun.csv"
    code = rerun_manifest(str(out) + ".manifest.json", {str(out): str(redo)})
    law_same = code == EXIT_OK and out.read_bytes() == redo.read_bytes()

    eig = tmp_path / "deloc.csv"
    argv = ["eigen", "--mode", "deloc", "--model", "matching", "--n", "150",
            "--d", "3", "--seed", "13", "--samples", "2", "--out", str(eig)]
    assert main(argv) == EXIT_OK
    eig2 = tmp_path / "deloc-rerun.csv"
    code = rerun_manifest(str(eig) + ".manifest.json", {str(eig): str(eig2)})
    eig_same = code == EXIT_OK and eig.read_bytes() == eig2.read_bytes()

    hashes_match = (
        RunManifest.load(str(out) + ".manifest.json").outputs[str(out)]
        == RunManifest.load(str(redo) + ".manifest.json").outputs[str(redo)])
    ok = law_same and eig_same and hashes_match
    detail = (f"lawsweep rerun byte-identical: {law_same}; "
              f"eigen rerun byte-identical: {eig_same}")
    report(12, "manifest-rerun-reproducibility", ok, detail)
