"""Acceptance criteria 1–10 at their stated tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""
import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from bdgkit import ansatz as an
from bdgkit.chart import PolarPoint, forward, frame_defects, inverse
from bdgkit.curvature import (Perturbation, appendix_h2_h3, check_supersolution, expansion_factor,
                              fit_a0, mean_curvature_closed, mean_curvature_uv, sector_grid,
                              threshold_radius)
from bdgkit.geometry import BlockSymmetric, Plane, ProfileSurface, Sphere, curvature_spectrum
from bdgkit.graph_solver import sandwich_check, solve_dirichlet
from bdgkit.jacobi import jacobi_supersolution_check, kernel_convergence, solve_outer
from bdgkit.profile import HALF, QUARTER, solve_phi
from bdgkit.reports import read_csv_body


def _finish(record, ac, results: dict, elapsed: float, limit: float):
    results["runtime"] = (elapsed < limit, f"{elapsed:.1f}s<{limit:g}s")
    ok = all(v[0] for v in results.values())
    record(ac, ok, "; ".join(f"{k}={v[1]}" for k, v in results.items()))
    failed = [k for k, v in results.items() if not v[0]]
    assert ok, f"AC{ac} failed: {failed}"


def test_ac1_angular_ode(record):
    t0 = time.perf_counter()
    p = solve_phi(512)
    inv = p.invariants()
    elapsed = time.perf_counter() - t0
    e1 = abs(p.phi[0] - np.pi / 2)
    e2 = abs(p.dphi[0] + 3)
    e3 = abs(p.dphi[-1] + 7 / 4)
    viol = inv["riccati_lower_violations"] + inv["riccati_upper_violations"]
    _finish(record, 1, {
        "phi_wall": (e1 <= 1e-6, f"{e1:.1e}"),
        "dphi_wall": (e2 <= 1e-3, f"{e2:.1e}"),
        "dphi_axis": (e3 <= 1e-6, f"{e3:.1e}"),
        "riccati_violations": (viol == 0, str(viol)),
    }, elapsed, 1.0)


def test_ac2_chart(record, profile):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240101)
    n = 10_000
    r = np.exp(rng.uniform(0.0, np.log(1e3), n))
    th = rng.uniform(QUARTER + 1e-3, HALF - 1e-3, n)
    p = PolarPoint(r, th)
    back = inverse(forward(p, profile), profile)
    rel = float(np.max(np.maximum(np.abs(back.r / r - 1), np.abs(back.theta / th - 1))))
    orth = float(np.max(np.abs(frame_defects(p, profile, 1e-4).cosine)))
    elapsed = time.perf_counter() - t0
    _finish(record, 2, {
        "roundtrip": (rel <= 1e-8, f"{rel:.1e}"),
        "orthogonality": (orth <= 1e-5, f"{orth:.1e}"),
    }, elapsed, 5.0)


def test_ac3_minimality(record, profile):
    t0 = time.perf_counter()
    peaks, mins = [], []
    for n in (80, 159):
        R, TH = sector_grid(5.0, 200.0, n, 16)
        H = mean_curvature_closed(PolarPoint(R, TH), profile)
        mins.append(float(np.min(H)))
        peaks.append(float(np.max(R ** 5 * np.abs(H))))
    elapsed = time.perf_counter() - t0
    drift = abs(peaks[1] / peaks[0] - 1)
    _finish(record, 3, {
        "min_H": (min(mins) >= -1e-8, f"{min(mins):.1e}"),
        "r5H_stability": (drift <= 0.1, f"{drift:.1e}"),
    }, elapsed, 10.0)


def test_ac4_supersolutions(record, profile):
    t0 = time.perf_counter()
    res = {}
    for kind in ("tilde_F0", "const", "tanh"):
        a0 = fit_a0(profile, kind, 0.2, 10.0, 500.0)
        rep = check_supersolution(profile, kind, 0.2, 10.0, threshold_radius(kind, a0, 10.0, 0.2), 500.0)
        res[kind] = (rep.verdict and rep.routes_agree, f"worst={rep.worst_violation:.1e}")
    p = PolarPoint(np.array([3.0, 5.0, 20.0, 100.0, 5.0]), np.array([1.2, 1.0, 1.4, 1.1, 1.5]))
    pert = Perturbation("tilde_F0", 0.2)
    amps = np.array([-0.2, -0.1, 0.0, 0.1, 0.2])
    vals = np.array([mean_curvature_closed(p, profile, pert, a) / expansion_factor(p, profile, pert, a)
                     for a in amps])
    coef = np.linalg.lstsq(np.vander(amps, 4, increasing=True), vals, rcond=None)[0]
    h2, h3 = appendix_h2_h3(p, profile, 0.2)
    e2, e3 = np.max(np.abs(h2 / coef[2] - 1)), np.max(np.abs(h3 / coef[3] - 1))
    res["H2"] = (e2 <= 1e-6, f"{e2:.1e}")
    res["H3"] = (e3 <= 1e-6, f"{e3:.1e}")
    _finish(record, 4, res, time.perf_counter() - t0, 30.0)


def test_ac5_dirichlet_sandwich(record, profile):
    t0 = time.perf_counter()
    fld = solve_dirichlet(20.0, profile, nr=200, ntheta=200)
    sw = sandwich_check(fld, 0.2)
    elapsed = time.perf_counter() - t0
    _finish(record, 5, {
        "lower": (sw.lower_margin >= -sw.slack, f"{sw.lower_margin:.1e}"),
        "upper": (sw.upper_margin >= -sw.slack, f"{sw.upper_margin:.1e}"),
        "C": (np.isfinite(sw.C), f"{sw.C:.3g}"),
        "newton": (fld.iterations <= 15, str(fld.iterations)),
    }, elapsed, 120.0)


def test_ac6_geometry(record, profile):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    rho = 10.0
    u, v = rng.uniform(0.5, 4.0, (2, 20))
    sp = curvature_spectrum(Sphere(rho), u, v)
    e_sph = float(np.max(np.abs(sp.kappas * rho - 1)))
    r = rng.uniform(2.0, 20.0, 100)
    th = rng.uniform(QUARTER + 0.05, HALF - 0.05, 100)
    surf = BlockSymmetric(ProfileSurface(profile))
    uu, vv = r * np.cos(th), r * np.sin(th)
    Hs = curvature_spectrum(surf, uu, vv).H
    F = lambda a, b: surf.derivs(a, b).val  # noqa: E731
    e1 = np.abs(mean_curvature_uv(F, uu, vv, 1e-2) - Hs)
    e2 = np.abs(mean_curvature_uv(F, uu, vv, 5e-3) - Hs)
    order = float(np.min(np.log2(e1 / e2)))
    spl = solve_dirichlet(20.0, profile, nr=100, ntheta=100).surface()
    a, b = r * np.cos(th) * 0.7, r * np.sin(th) * 0.7
    s1 = curvature_spectrum(spl, a, b)
    s2 = curvature_spectrum(spl, b, a)
    anti = float(np.max(np.abs(s1.sum_cubes + s2.sum_cubes) / s1.A_sq ** 1.5))
    elapsed = time.perf_counter() - t0
    _finish(record, 6, {
        "sphere": (e_sph <= 1e-8, f"{e_sph:.1e}"),
        "H_order": (order >= 1.8, f"{order:.2f}"),
        "antisymmetry": (anti <= 1e-9, f"{anti:.1e}"),
    }, elapsed, 5.0)


@pytest.fixture(scope="module")
def surface60(profile):
    t0 = time.perf_counter()
    surf = solve_dirichlet(60.0, profile, nr=200, ntheta=100).surface()
    return surf, time.perf_counter() - t0


def test_ac7_corrector_projection(record, surface60):
    surf, t_solve = surface60
    t0 = time.perf_counter()
    shape = an.w1_shape()
    z = np.linspace(-8, 8, 1601)
    h = 1e-3
    d2 = (shape(z + h) - 2 * shape(z) + shape(z - h)) / h ** 2
    ode = float(np.max(np.abs(d2 + an.df(an.Heteroclinic.w(z)) * shape(z) - z * an.Heteroclinic.dw(z))))
    c0 = abs(an.c0_quadrature() - 2 * np.sqrt(2) / 3)
    flat = an.AnsatzField(an.AnsatzParams(alpha=0.1), Plane(), with_w1=True, shape=shape)
    fl = abs(an.project_residual(flat, (3.0, 4.0)).value)
    field_ = an.AnsatzField(an.AnsatzParams(alpha=0.1), surf, with_w1=True, shape=shape)
    ratios = [an.project_residual(field_, (30 * np.cos(t), 30 * np.sin(t))).ratio
              for t in np.linspace(1.0, 1.5, 10)]
    elapsed = time.perf_counter() - t0 + t_solve
    _finish(record, 7, {
        "w1_ode": (ode <= 1e-6, f"{ode:.1e}"),
        "c0": (c0 <= 1e-9, f"{c0:.1e}"),
        "flat": (fl <= 1e-12, f"{fl:.1e}"),
        "ratios": (0.8 <= min(ratios) and max(ratios) <= 1.2, f"[{min(ratios):.4f},{max(ratios):.4f}]"),
    }, elapsed, 30.0)


def test_ac8_residual_scaling(record, surface60):
    surf, t_solve = surface60
    t0 = time.perf_counter()
    shape = an.w1_shape()
    Rr, Tt = np.meshgrid([30.0, 35.0, 40.0], [1.0, 1.2, 1.4], indexing="ij")
    fp = np.stack([(Rr * np.cos(Tt)).ravel(), (Rr * np.sin(Tt)).ravel()], axis=-1)
    weights = ((3.0, 1.0), (2.0, 0.5))
    alphas = [0.2, 0.1, 0.05]
    norms = {w: [] for w in weights}
    for a in alphas:
        rep = an.residual(an.AnsatzField(an.AnsatzParams(alpha=a), surf, False, shape), fp, weights=weights)
        for w in weights:
            norms[w].append(rep.norm(*w))
    elapsed = time.perf_counter() - t0 + t_solve
    res = {}
    for w in weights:
        s = an.scaling_slope(alphas, norms[w])
        res[f"slope(nu={w[0]:g},sigma={w[1]:g})"] = (1.8 <= s <= 2.2, f"{s:.3f}")
    _finish(record, 8, res, elapsed, 120.0)


def test_ac9_jacobi(record, profile):
    t0 = time.perf_counter()
    ks = kernel_convergence(profile, 10.0, (100, 200, 400))
    rep = jacobi_supersolution_check(profile, -0.5, 0.5, 20.0, 500.0)
    man = solve_outer(profile, "manufactured", R0=2.0, R=100.0)
    ratios = [solve_outer(profile, "decay", R0=2.0, R=R).norm_ratio for R in (50.0, 100.0, 200.0)]
    spread = max(ratios) / min(ratios) - 1
    elapsed = time.perf_counter() - t0
    merr = man.extra["manufactured_error"]
    _finish(record, 9, {
        "kernel_order": (ks.order >= 1.8, f"{ks.order:.2f}"),
        "lemma": (rep.verdict, f"C={rep.extra['C_fit']:.3g}"),
        "manufactured": (merr <= 1e-6, f"{merr:.1e}"),
        "ratio_spread": (spread <= 0.2, f"{spread:.3f}"),
    }, elapsed, 120.0)


def test_ac10_determinism(record, tmp_path):
    t0 = time.perf_counter()
    dirs, codes = [tmp_path / "run1", tmp_path / "run2"], []
    for d in dirs:
        env = dict(os.environ, BDGKIT_OUTPUT_DIR=str(d))
        codes.append(subprocess.run([sys.executable, "-m", "bdgkit", "all"], env=env,
                                    capture_output=True, text=True).returncode)
    names = sorted(p.name for p in dirs[0].iterdir())
    same_names = names == sorted(p.name for p in dirs[1].iterdir())
    diff = []
    for n in names:
        a, b = dirs[0] / n, dirs[1] / n
        if n.endswith(".csv"):
            if read_csv_body(a) != read_csv_body(b):
                diff.append(n)
        elif a.read_bytes() != b.read_bytes():
            diff.append(n)
    reports = [json.loads((dirs[0] / n).read_text()) for n in names if n.endswith(".json")]
    elapsed = time.perf_counter() - t0
    _finish(record, 10, {
        "exit_codes": (codes == [0, 0], str(codes)),
        "identical": (same_names and not diff, f"{len(names)} files, {len(diff)} differ"),
        "all_passed": (all(r["passed"] for r in reports), f"{len(reports)} reports"),
    }, elapsed, 600.0)
