"""Verification suites, artifact writers and plot-data export.

Each suite returns a :class:`SuiteVerdict` and writes a CSV table plus a JSON
verdict into the output directory.  CSV files start with one ``# generated``
comment line (the only place a timestamp appears); JSON has sorted keys and
no timestamps, so reruns of one configuration give identical bodies.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BdgError, MissingArtifact

PLOT_COLUMNS = ("suite", "series", "x", "y")


# --- writers --------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def csv_text(header, rows) -> str:
    """CSV body (no comment line)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header, rows=None, body: str | None = None) -> Path:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    text = body if body is not None else csv_text(header, rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(f"# generated by bdgkit {__version__} at {stamp}\n" + text)
    return path


def read_csv_body(path: Path) -> str:
    """CSV text without the ``# generated`` line."""
    lines = Path(path).read_text().splitlines(keepends=True)
    return "".join(lines[1:] if lines and lines[0].startswith("# generated") else lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


# --- verdicts -------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float
    limit: float
    op: str  # "le" or "ge"

    @property
    def margin(self) -> float:
        v, lim = float(self.value), float(self.limit)
        if not math.isfinite(v):
            return -math.inf
        return lim - v if self.op == "le" else v - lim

    @property
    def passed(self) -> bool:
        return self.margin >= 0

    def as_dict(self) -> dict:
        return dict(value=self.value, limit=self.limit, op=self.op, margin=self.margin, passed=self.passed)


@dataclass
class SuiteVerdict:
    suite: str
    passed: bool
    worst_margin: float
    artifacts: list
    seconds: float
    status: str = "pass"  # pass | fail | error
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    error: str = ""

    def summary(self) -> dict:
        """Persisted form; wall-clock time is left out to keep reruns identical."""
        return dict(suite=self.suite, passed=self.passed, status=self.status,
                    worst_margin=self.worst_margin, artifacts=[Path(a).name for a in self.artifacts],
                    checks=self.checks, info=self.info, error=self.error)


class _Suite:
    def __init__(self, name: str, out: Path):
        self.name = name
        self.out = Path(out)
        self.checks: list[Check] = []
        self.info: dict = {}
        self.plot: list = []
        self.artifacts: list[Path] = []

    def check(self, name, value, limit, op="le"):
        self.checks.append(Check(name, float(value), float(limit), op))

    def series(self, name, x, y):
        self.plot.append(dict(series=name, x=[float(v) for v in x], y=[float(v) for v in y]))

    def csv(self, fname, header, rows=None, body=None):
        self.artifacts.append(write_csv(self.out / fname, header, rows, body))

    def finish(self, t0: float) -> SuiteVerdict:
        checks = {c.name: c.as_dict() for c in self.checks}
        worst = min((c.margin for c in self.checks), default=0.0)
        passed = all(c.passed for c in self.checks)
        v = SuiteVerdict(self.name, passed, worst, [], time.perf_counter() - t0,
                         "pass" if passed else "fail", checks, self.info)
        path = self.out / f"{self.name}.json"
        doc = v.summary()
        doc["artifacts"] = [p.name for p in self.artifacts] + [path.name]
        doc["plot"] = self.plot
        write_json(path, doc)
        v.artifacts = self.artifacts + [path]
        return v


# --- suites ---------------------------------------------------------------------------

def _profile(cfg):
    from .profile import solve_phi
    return solve_phi(cfg["profile"]["n_nodes"], cfg["profile"]["tol"])


def suite_profile(cfg, out):
    s = _Suite("profile", out)
    prof = _profile(cfg)
    inv = prof.invariants()
    s.info.update(inv)
    s.check("phi_wall_err", inv["phi_wall_err"], 1e-6)
    s.check("phi_axis_err", inv["phi_axis_err"], 1e-6)
    s.check("dphi_wall_err", inv["dphi_wall_err"], 1e-3)
    s.check("dphi_axis_err", inv["dphi_axis_err"], 1e-6)
    s.check("riccati_lower_violations", inv["riccati_lower_violations"], 0)
    s.check("riccati_upper_violations", inv["riccati_upper_violations"], 0)
    s.check("dphi_min_margin", inv["dphi_min_margin"], 0.0, "ge")
    s.check("g_min", inv["g_min"], 0.0, "ge")
    s.check("upper_cos_margin", inv["upper_cos_margin"], 0.0, "ge")
    rows = zip(prof.nodes, prof.phi, prof.dphi, prof.psi, prof.g, prof.dg)
    s.csv("profile.csv", ["theta", "phi", "dphi", "psi", "g", "dg"], rows)
    s.series("g", prof.nodes, prof.g)
    s.series("phi", prof.nodes, prof.phi)
    return s


def suite_coords(cfg, out):
    from .chart import PolarPoint, forward, frame_defects, inverse
    from .profile import HALF, QUARTER
    c = cfg["coords"]
    s = _Suite("coords", out)
    prof = _profile(cfg)
    rng = np.random.default_rng(c["seed"])
    n = int(c["n_samples"])
    r = np.exp(rng.uniform(np.log(c["rmin"]), np.log(c["rmax"]), n))
    th = rng.uniform(QUARTER + 1e-3, HALF - 1e-3, n)
    p = PolarPoint(r, th)
    back = inverse(forward(p, prof), prof)
    rel = np.maximum(np.abs(back.r / r - 1), np.abs(back.theta / th - 1))
    fd = frame_defects(p, prof, c["h_fd"])
    s.check("roundtrip_rel_err", np.max(rel), c["roundtrip_tol"])
    s.check("orthogonality_defect", np.max(np.abs(fd.cosine)), c["orth_tol"])
    s.info.update(norm_t_defect=float(np.max(np.abs(fd.norm_t))),
                  norm_s_defect=float(np.max(np.abs(fd.norm_s))),
                  det_defect=float(np.max(np.abs(fd.det))))
    s.csv("coords.csv", ["r", "theta", "roundtrip_rel_err", "cosine_defect"],
          zip(r, th, rel, fd.cosine))
    return s


def suite_curvature(cfg, out, kinds=None, rmin=None):
    from .chart import PolarPoint
    from .curvature import (Perturbation, a_expansion, appendix_h2_h3, check_supersolution,
                            expansion_factor, fit_a0, mean_curvature_closed, sector_grid,
                            threshold_radius)
    c = cfg["curvature"]
    s = _Suite("curvature", out)
    prof = _profile(cfg)
    sigma, A = c["sigma"], c["amp"]
    rows = []
    for kind in kinds or c["kinds"]:
        a0 = fit_a0(prof, kind, sigma, A, c["rmax"])
        lo = rmin if rmin is not None else threshold_radius(kind, a0, A, sigma)
        rep = check_supersolution(prof, kind, sigma, A, lo, c["rmax"], c["n_r"], c["n_theta"])
        s.check(f"{kind}_worst_violation", rep.worst_violation, 0.0)
        s.check(f"{kind}_routes_agree", float(rep.routes_agree), 1.0, "ge")
        s.info[f"{kind}_a0"] = a0
        s.info[f"{kind}_rmin"] = lo
        s.info[f"{kind}_max_value"] = rep.extra["max_value"]
        rows += [(kind, q.r, q.theta, q.value, q.value_fd) for q in rep.samples]
    s.csv("curvature_samples.csv", ["kind", "r", "theta", "H", "H_fd"], rows)
    # minimality of F₀ with r-halving on a fixed interior θ set
    m = int(c["minimality_n"])
    peaks = []
    for n in (m, 2 * m - 1):
        R, TH = sector_grid(c["minimality_rmin"], c["minimality_rmax"], n, 16)
        H = mean_curvature_closed(PolarPoint(R, TH), prof)
        s.check(f"minimality_min_H_n{n}", np.min(H), -c["minimality_tol"], "ge")
        peaks.append(float(np.max(R ** 5 * np.abs(H))))
    s.info["r5H_peaks"] = peaks
    # halving θ as well moves the first node toward the wall, where H ~ y^{-2/3}
    R, TH = sector_grid(c["minimality_rmin"], c["minimality_rmax"], 2 * m - 1, 31)
    s.info["r5H_peak_theta_halved"] = float(np.max(R ** 5 * np.abs(mean_curvature_closed(PolarPoint(R, TH), prof))))
    s.check("minimality_r5H_stability", abs(peaks[1] / peaks[0] - 1), c["minimality_stability"])
    # appendix closed forms against a cubic fit in A of the exact mean curvature
    p = PolarPoint(np.array([3.0, 5.0, 20.0, 100.0, 5.0]), np.array([1.2, 1.0, 1.4, 1.1, 1.5]))
    pert = Perturbation("tilde_F0", sigma)
    amps = np.array([-0.2, -0.1, 0.0, 0.1, 0.2])
    vals = np.array([mean_curvature_closed(p, prof, pert, a) / expansion_factor(p, prof, pert, a) for a in amps])
    coef = np.linalg.lstsq(np.vander(amps, 4, increasing=True), vals, rcond=None)[0]
    h2, h3 = appendix_h2_h3(p, prof, sigma)
    e2, e3 = np.max(np.abs(h2 / coef[2] - 1)), np.max(np.abs(h3 / coef[3] - 1))
    s.check("appendix_H2_rel_err", e2, c["appendix_tol"])
    s.check("appendix_H3_rel_err", e3, c["appendix_tol"])
    p2, p3 = appendix_h2_h3(p, prof, sigma, alt_signs=True)
    s.info["alt_signs_H2_rel_err"] = float(np.max(np.abs(p2 / coef[2] - 1)))
    s.info["alt_signs_H3_rel_err"] = float(np.max(np.abs(p3 / coef[3] - 1)))
    s.info["expansion_vs_fit"] = float(np.max(np.abs(a_expansion(p, prof, pert).H2 / coef[2] - 1)))
    return s


def suite_graph(cfg, out):
    from .curvature import fit_a0
    from .graph_solver import sandwich_check, solve_dirichlet, tilde_bound_check
    g = cfg["graph"]
    s = _Suite("graph", out)
    prof = _profile(cfg)
    fld = solve_dirichlet(g["R"], prof, nr=g["nr"], ntheta=g["ntheta"], tol=g["tol"],
                          grading=g["grading"], correction=g["correction"])
    sw = sandwich_check(fld, g["sigma"], R0=g["R0"])
    s.check("newton_iterations", fld.iterations, g["max_iterations"])
    s.check("lower_margin", sw.lower_margin, -sw.slack, "ge")
    s.check("upper_margin", sw.upper_margin, -sw.slack, "ge")
    a0 = fit_a0(prof, "tilde_F0", g["sigma"], 10.0, 500.0)
    tb = tilde_bound_check(fld, g["sigma"], a0)
    s.check("tilde_bound_margin", tb["margin"], 0.0, "ge")
    s.info.update(C=sw.C, slack=sw.slack, R0=sw.R0, sigma=sw.sigma, history=fld.history,
                  roundoff_floor=fld.roundoff_floor, A_tilde=tb["A_tilde"], a0=tb["a0"])
    s.csv("graph_field.csv", None, body=fld.to_csv())
    mid = fld.mesh.shape[1] // 2
    s.series("D_mid_theta", fld.mesh.r, fld.D[:, mid])
    return s


def suite_geometry(cfg, out):
    from .chart import PolarPoint
    from .curvature import mean_curvature_uv
    from .geometry import (BlockSymmetric, Plane, ProfileSurface, Sphere, curvature_spectrum,
                           fermi_project)
    from .graph_solver import solve_dirichlet
    from .profile import HALF, QUARTER
    c = cfg["geometry"]
    s = _Suite("geometry", out)
    prof = _profile(cfg)
    rng = np.random.default_rng(c["seed"])
    rho = c["rho0"]
    # sphere and plane spectra
    u, v = rng.uniform(0.5, 0.4 * rho, (2, 20))
    sp = curvature_spectrum(Sphere(rho), u, v)
    err = max(np.max(np.abs(sp.kappas * rho - 1)), np.max(np.abs(sp.A_sq * rho ** 2 / 8 - 1)),
              np.max(np.abs(sp.sum_cubes * rho ** 3 / 8 - 1)))
    s.check("sphere_spectrum_rel_err", err, c["sphere_tol"])
    pl = curvature_spectrum(Plane(), u, v)
    s.check("plane_spectrum_abs", np.max(np.abs(pl.kappas)), 0.0)
    fc = fermi_project(np.array([1.0, 2.0, 0.7]), Plane())
    s.check("plane_fermi_z_err", abs(fc.z + 0.7), 1e-14)
    x = np.stack([u, v, rng.uniform(-1, 1, u.size)], axis=-1)
    fs = fermi_project(x, Sphere(rho), check_collar=False)
    zc = np.linalg.norm(x - np.array([0.0, 0.0, rho]), axis=-1) - rho
    s.check("sphere_fermi_z_err", np.max(np.abs(fs.z - zc)), 1e-10)
    # H-consistency against the divergence form at two steps
    n = int(c["n_random"])
    r = rng.uniform(2.0, 20.0, n)
    th = rng.uniform(QUARTER + 0.05, HALF - 0.05, n)
    surf = BlockSymmetric(ProfileSurface(prof))
    uu, vv = r * np.cos(th), r * np.sin(th)
    Hs = curvature_spectrum(surf, uu, vv).H
    F = lambda a, b: surf.derivs(a, b).val  # noqa: E731
    e1 = np.abs(mean_curvature_uv(F, uu, vv, 1e-2) - Hs)
    e2 = np.abs(mean_curvature_uv(F, uu, vv, 5e-3) - Hs)
    order = np.log2(e1 / e2)
    s.check("H_consistency_min_order", np.min(order), 1.8, "ge")
    s.info["H_consistency_max_err_h"] = float(np.max(e1))
    # antisymmetry of Σκ³ on the reconstructed solved graph
    fld = solve_dirichlet(20.0, prof, nr=100, ntheta=100)
    spl = fld.surface()
    rr, tt = rng.uniform(1.0, 15.0, n), rng.uniform(QUARTER, HALF, n)
    a, b = rr * np.cos(tt), rr * np.sin(tt)
    s1 = curvature_spectrum(spl, a, b)
    c2 = curvature_spectrum(spl, b, a).sum_cubes
    # relative to the natural size |A|³ of Σκ³ (which vanishes on the wall)
    s.check("antisymmetry_rel", np.max(np.abs(s1.sum_cubes + c2) / s1.A_sq ** 1.5), 1e-9)
    # decay envelope |Σκ³| ≤ C g^{σ₁}/r³ on F₀
    from .curvature import sector_grid
    R, TH = sector_grid(c["envelope_rmin"], c["envelope_rmax"], 24, 16)
    spec = curvature_spectrum(surf, R * np.cos(TH), R * np.sin(TH))
    g = prof.evaluate(TH).g
    q = np.abs(spec.sum_cubes) * R ** 3
    C = float(np.max(q / g ** c["sigma1"]))
    slope = float(np.polyfit(np.log(g[:, :4].ravel()), np.log(q[:, :4].ravel()), 1)[0])
    s.info.update(envelope_C=C, envelope_sigma1=c["sigma1"], wall_exponent=slope)
    s.check("envelope_C_finite", float(np.isfinite(C)), 1.0, "ge")
    s.series("r3_sum_cubes_mid", R[:, 8], q[:, 8])
    rows = zip(R.ravel(), TH.ravel(), spec.H.ravel(), spec.A_sq.ravel(), spec.sum_cubes.ravel())
    s.csv("geometry_f0_spectrum.csv", ["r", "theta", "H", "A_sq", "sum_cubes"], rows)
    return s


def suite_ansatz(cfg, out):
    from . import ansatz as an
    from .graph_solver import solve_dirichlet
    c = cfg["ansatz"]
    s = _Suite("ansatz", out)
    prof = _profile(cfg)
    shape = an.w1_shape()
    z = np.linspace(-8, 8, 1601)
    h = 1e-3
    B = shape(z)
    d2 = (shape(z + h) - 2 * B + shape(z - h)) / h ** 2
    res = np.max(np.abs(d2 + an.df(an.Heteroclinic.w(z)) * B - z * an.Heteroclinic.dw(z)))
    s.check("w1_ode_residual", res, 1e-6)
    s.check("w1_odd", np.max(np.abs(shape(z) + shape(-z))), 1e-10)
    s.check("c0_err", abs(an.c0_quadrature() - an.C0_EXACT), 1e-9)
    s.info.update(c1=an.c1_quadrature(), w1_decay_const=shape.decay_const, w1_decay_rate=shape.decay_rate)
    flat = an.AnsatzField(an.AnsatzParams(alpha=0.1), _plane(), with_w1=True, shape=shape)
    s.check("flat_projection", abs(an.project_residual(flat, (3.0, 4.0)).value), 1e-12)
    fld = solve_dirichlet(c["R"], prof, nr=c["nr"], ntheta=c["ntheta"])
    surf = fld.surface()
    Rr, Tt = np.meshgrid(c["radii"], c["thetas"], indexing="ij")
    fp = np.stack([(Rr * np.cos(Tt)).ravel(), (Rr * np.sin(Tt)).ravel()], axis=-1)
    weights = [tuple(w) for w in c["weights"]]
    norms = {w: [] for w in weights}
    for a in c["alphas"]:
        par = an.AnsatzParams(alpha=a, theta0=c["theta0"], delta=c["delta"])
        rep = an.residual(an.AnsatzField(par, surf, c["with_w1"], shape), fp, c["n_z"], c["h_fd"], weights)
        for w in weights:
            norms[w].append(rep.norm(*w))
        rows = [(a, rep.footprints[i, 0], rep.footprints[i, 1], zb, S)
                for i in range(len(fp)) for zb, S in zip(rep.zbar[i], rep.S[i])]
        s.csv(f"ansatz_residual_alpha_{a:g}.csv", ["alpha", "y_u", "y_v", "zbar", "S"], rows)
    lo, hi = c["slope_range"]
    for w in weights:
        slope = an.scaling_slope(c["alphas"], norms[w])
        tag = f"nu{w[0]:g}_sigma{w[1]:g}"
        s.check(f"slope_{tag}_low", slope, lo, "ge")
        s.check(f"slope_{tag}_high", slope, hi)
        s.info[f"norms_{tag}"] = norms[w]
        s.series(f"norm_{tag}", c["alphas"], norms[w])
    # projection identity
    par = an.AnsatzParams(alpha=c["projection_alpha"], theta0=c["theta0"], delta=c["delta"])
    af = an.AnsatzField(par, surf, True, shape)
    ths = np.linspace(1.0, 1.5, int(c["projection_samples"]))
    ratios = [an.project_residual(af, (c["projection_r"] * np.cos(t), c["projection_r"] * np.sin(t))).ratio
              for t in ths]
    s.check("projection_ratio_min", min(ratios), c["ratio_range"][0], "ge")
    s.check("projection_ratio_max", max(ratios), c["ratio_range"][1])
    s.info["projection_ratios"] = ratios
    s.series("projection_ratio", ths, ratios)
    return s


def _plane():
    from .geometry import Plane
    return Plane()


def suite_jacobi_check(cfg, out, s=None):
    from .jacobi import jacobi_supersolution_check
    j = cfg["jacobi"]
    s = s or _Suite("jacobi_check", out)
    prof = _profile(cfg)
    rows = []
    for variant in ("graded", "radial"):
        rep = jacobi_supersolution_check(prof, j["sigma"], j["sigma1"], j["rmin"], j["rmax"], variant=variant)
        s.check(f"{variant}_C_fit", rep.extra["C_fit"], 0.0, "ge")
        s.check(f"{variant}_routes_agree", float(rep.routes_agree), 1.0, "ge")
        s.info[f"{variant}_max_fd_rel_diff"] = rep.extra["max_fd_rel_diff"]
        rows += [(variant, q.r, q.theta, q.value, q.margin) for q in rep.samples]
    s.csv("jacobi_supersolution.csv", ["variant", "r", "theta", "value", "margin"], rows)
    return s


def suite_jacobi_solve(cfg, out, s=None, rhs=None, R=None, R0=None):
    from .jacobi import solve_outer
    j = cfg["jacobi"]
    s = s or _Suite("jacobi_solve", out)
    prof = _profile(cfg)
    R0 = j["R0"] if R0 is None else R0
    kw = dict(R0=R0, points_per_decade=j["points_per_decade"], ntheta=j["ntheta"], tol=j["tol"])
    if rhs is None:
        man = solve_outer(prof, "manufactured", R=j["R"], **kw)
        s.check("manufactured_error", man.extra["manufactured_error"], j["manufactured_tol"])
        zero = solve_outer(prof, "zero", R=j["R"], **kw)
        s.check("zero_rhs_max_h", float(np.max(np.abs(zero.h))), 0.0)
        sols = [solve_outer(prof, "decay", R=Rv, **kw) for Rv in j["R_values"]]
    else:
        sols = [solve_outer(prof, rhs, R=R or j["R"], **kw)]
    ratios = [q.norm_ratio for q in sols]
    rows = []
    for q in sols:
        s.check(f"certificate_R{q.mesh.r[-1]:g}", float(q.certificate), 1.0, "ge")
        rows.append((q.mesh.r[-1], q.norm_h, q.norm_f, q.norm_ratio, q.decay_exponent,
                     q.comparison_margin, q.residual))
    if len(sols) > 1 and max(ratios) > 0:
        s.check("norm_ratio_spread", max(ratios) / min(ratios) - 1, j["ratio_tol"])
    s.info["norm_ratios"] = ratios
    s.series("norm_ratio", [q.mesh.r[-1] for q in sols], ratios)
    s.csv("jacobi_outer.csv", ["R", "norm_h", "norm_f", "norm_ratio", "decay_exponent",
                               "comparison_margin", "residual"], rows)
    return s


def suite_jacobi(cfg, out):
    from .jacobi import kernel_convergence
    j = cfg["jacobi"]
    s = _Suite("jacobi", out)
    suite_jacobi_check(cfg, out, s)
    prof = _profile(cfg)
    ks = kernel_convergence(prof, j["kernel_R"], tuple(j["kernel_sizes"]), tuple(j["kernel_window"]))
    s.check("kernel_order", ks.order, j["kernel_min_order"], "ge")
    s.check("kernel_monotone", float(all(b < a for a, b in zip(ks.errors, ks.errors[1:]))), 1.0, "ge")
    s.info["kernel_errors"] = ks.errors
    s.series("kernel_error", ks.sizes, ks.errors)
    suite_jacobi_solve(cfg, out, s)
    return s


SUITE_FUNCS = {
    "profile": suite_profile,
    "coords": suite_coords,
    "curvature": suite_curvature,
    "graph": suite_graph,
    "geometry": suite_geometry,
    "ansatz": suite_ansatz,
    "jacobi": suite_jacobi,
    "jacobi_check": suite_jacobi_check,
    "jacobi_solve": suite_jacobi_solve,
}
ALL_SUITES = ("profile", "coords", "curvature", "graph", "geometry", "ansatz", "jacobi")


def run_suite(cfg: dict, suite: str, **kwargs) -> SuiteVerdict:
    """Run one suite, persist its artifacts and return the verdict.

    Solver and configuration errors inside the suite become an ``error``
    verdict whose JSON carries the diagnostic message.
    """
    if suite not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}")
    out = Path(cfg["output_dir"])
    t0 = time.perf_counter()
    try:
        s = SUITE_FUNCS[suite](cfg, out, **kwargs)
    except BdgError as exc:
        v = SuiteVerdict(suite, False, -math.inf, [], time.perf_counter() - t0, "error",
                         error=f"{type(exc).__name__}: {exc}")
        path = write_json(out / f"{suite}.json", v.summary())
        v.artifacts = [path]
        return v
    return s.finish(t0)


def emit_plotdata(paths, out_path: Path) -> Path:
    """Merge the ``plot`` series of suite JSON verdicts into one long-format CSV.

    Columns are ``suite, series, x, y``, one row per point.

    Raises
    ------
    MissingArtifact
        If ``paths`` is empty or a listed report does not exist.
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise MissingArtifact("no reports given")
    rows = []
    for p in paths:
        if not p.exists():
            raise MissingArtifact(f"report {p} does not exist")
        doc = json.loads(p.read_text())
        for ser in doc.get("plot", []):
            rows += [(doc.get("suite", p.stem), ser["series"], x, y) for x, y in zip(ser["x"], ser["y"])]
    return write_csv(Path(out_path), PLOT_COLUMNS, rows)
