"""Truncated Dirichlet problem for the block-symmetric minimal graph equation.

On the sector Γ_R = {r < R, π/4 < θ < π/2} the operator is discretized in
finite-volume form with the weight r⁷ s(θ), s = sin³θ cos³θ:

    r⁷ s H[F] = ∂_r(r⁷ s F_r/W) + ∂_θ(r⁵ s F_θ/W),   W² = 1 + F_r² + F_θ²/r².

Boundary data: F = F₀ on the arc r = R, F = 0 on the wall θ = π/4 and at
r = 0, and the natural (zero-flux) condition on the axis θ = π/2 where s
vanishes.  Newton iterates on the deviation D = F − F₀.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RectBivariateSpline
from scipy.sparse.linalg import splu

from .chart import PolarPoint
from .curvature import mean_curvature_f0
from .errors import LinearSolveFailure, NewtonDiverged
from .jets import Jet, change_variables
from .profile import HALF, QUARTER, AngularProfile

INTERIOR, WALL, AXIS, ARC, ORIGIN = 0, 1, 2, 3, 4
KIND_NAMES = {INTERIOR: "interior", WALL: "wall", AXIS: "axis", ARC: "arc", ORIGIN: "origin"}


def _s_antiderivative(theta):
    # ∫ sin³θ cos³θ dθ = (cos³2θ/3 − cos2θ)/16
    c = np.cos(2 * theta)
    return (c ** 3 / 3 - c) / 16


@dataclass(frozen=True)
class PolarMesh:
    """Tensor mesh with nodes r[0] = 0 < … < r[-1] = R and θ[0] < … < θ[-1]."""

    r: np.ndarray
    theta: np.ndarray

    @property
    def shape(self):
        return (self.r.size, self.theta.size)

    @property
    def R(self):
        return float(self.r[-1])


def polar_mesh(R: float, nr: int, ntheta: int, grading: float = 1.5,
               theta_range=(QUARTER, HALF)) -> PolarMesh:
    """Mesh with ``nr`` radial and ``ntheta`` angular nodes.

    Radial nodes are geometrically graded, r_i ∝ e^{λ i/n} − 1, with
    λ = ``grading`` (0 gives a uniform mesh).
    """
    if nr < 3 or ntheta < 3:
        raise ValueError("mesh needs at least 3 nodes per direction")
    x = np.linspace(0.0, 1.0, nr)
    r = R * x if grading == 0 else R * np.expm1(grading * x) / np.expm1(grading)
    r[0], r[-1] = 0.0, R
    theta = np.linspace(theta_range[0], theta_range[1], ntheta)
    return PolarMesh(r, theta)


class _Geometry:
    """Precomputed face and control-volume quantities of a mesh."""

    def __init__(self, mesh: PolarMesh):
        r, th = mesh.r, mesh.theta
        self.r, self.th = r, th
        self.dr = np.diff(r)
        self.dth = np.diff(th)
        rf = 0.5 * (r[1:] + r[:-1])
        tf = 0.5 * (th[1:] + th[:-1])
        self.rf, self.tf = rf, tf
        # control-volume bounds
        ra = np.concatenate([[r[0]], rf])
        rb = np.concatenate([rf, [r[-1]]])
        ta = np.concatenate([[th[0]], tf])
        tb = np.concatenate([tf, [th[-1]]])
        self.S = _s_antiderivative(tb) - _s_antiderivative(ta)  # ∫ s dθ per θ-CV
        self.M5 = (rb ** 6 - ra ** 6) / 6  # ∫ r⁵ dr per r-CV
        self.M7 = (rb ** 8 - ra ** 8) / 8  # ∫ r⁷ dr per r-CV
        self.s_tf = (np.sin(tf) * np.cos(tf)) ** 3
        self.vol = self.M7[:, None] * self.S[None, :]
        # central-difference spans
        self.r_span = np.concatenate([[np.nan], r[2:] - r[:-2], [np.nan]])
        self.t_span = np.concatenate([[np.nan], th[2:] - th[:-2], [np.nan]])


def _node_gradients(F, geo: _Geometry, neumann_lo: bool, neumann_hi: bool):
    """Nodal F_r, F_θ by central differences; one-sided or symmetric at ends."""
    Fr = np.empty_like(F)
    Fr[1:-1] = (F[2:] - F[:-2]) / geo.r_span[1:-1, None]
    Fr[0] = (F[1] - F[0]) / geo.dr[0]
    Fr[-1] = (F[-1] - F[-2]) / geo.dr[-1]
    Ft = np.empty_like(F)
    Ft[:, 1:-1] = (F[:, 2:] - F[:, :-2]) / geo.t_span[None, 1:-1]
    Ft[:, 0] = 0.0 if neumann_lo else (F[:, 1] - F[:, 0]) / geo.dth[0]
    Ft[:, -1] = 0.0 if neumann_hi else (F[:, -1] - F[:, -2]) / geo.dth[-1]
    return Fr, Ft


def _divergence(F, geo: _Geometry, neumann_lo: bool, neumann_hi: bool):
    """Integrated weighted divergence at every node (zero flux through θ ends)."""
    Fr_n, Ft_n = _node_gradients(F, geo, neumann_lo, neumann_hi)
    # radial faces (i+½, j)
    Fr = (F[1:] - F[:-1]) / geo.dr[:, None]
    Ft = 0.5 * (Ft_n[1:] + Ft_n[:-1])
    rf = geo.rf[:, None]
    W = np.sqrt(1 + Fr * Fr + (Ft / rf) ** 2)
    flux_r = rf ** 7 * Fr / W * geo.S[None, :]
    # angular faces (i, j+½)
    Ft2 = (F[:, 1:] - F[:, :-1]) / geo.dth[None, :]
    Fr2 = 0.5 * (Fr_n[:, 1:] + Fr_n[:, :-1])
    rr = np.where(geo.r == 0, 1.0, geo.r)[:, None]
    W2 = np.sqrt(1 + Fr2 * Fr2 + (Ft2 / rr) ** 2)
    flux_t = geo.s_tf[None, :] * Ft2 / W2 * geo.M5[:, None]
    div = np.zeros_like(F)
    div[:-1] += flux_r
    div[1:] -= flux_r
    div[:, :-1] += flux_t
    div[:, 1:] -= flux_t
    return div


def discrete_mean_curvature(F, mesh: PolarMesh, neumann_lo: bool = False,
                            neumann_hi: bool = True) -> np.ndarray:
    """Finite-volume H[F] at every node of ``mesh`` (meaningful at unknown nodes)."""
    geo = _Geometry(mesh)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _divergence(F, geo, neumann_lo, neumann_hi) / geo.vol


def node_kinds(mesh: PolarMesh) -> np.ndarray:
    kinds = np.full(mesh.shape, INTERIOR, dtype=int)
    if np.isclose(mesh.theta[-1], HALF):
        kinds[:, -1] = AXIS
    kinds[:, 0] = WALL
    kinds[-1, :] = ARC
    kinds[0, :] = ORIGIN
    return kinds


@dataclass(frozen=True)
class SmoothReference:
    """P = r³q(θ), q = −Σ c_k cos(2(2k+1)θ): odd across the wall, even on the axis.

    The coefficients are a least-squares fit of the profile g on [π/4, π/2].
    """

    coeffs: np.ndarray

    @classmethod
    def fit(cls, profile: AngularProfile, n_modes: int = 8, n_fit: int = 2001):
        th = np.linspace(QUARTER, HALF, n_fit)
        basis = -np.cos(2 * (2 * np.arange(n_modes)[None, :] + 1) * th[:, None])
        c, *_ = np.linalg.lstsq(basis, profile.evaluate(th).g, rcond=None)
        return cls(c)

    def q(self, theta, order: int = 0):
        theta = np.asarray(theta, dtype=float)
        w = 2 * (2 * np.arange(self.coeffs.size) + 1)
        arg = w * theta[..., None]
        # d^k/dθ^k of −cos(wθ)
        base = [-np.cos(arg), w * np.sin(arg), w ** 2 * np.cos(arg)][order]
        return base @ self.coeffs

    def value(self, r, theta):
        return np.asarray(r, dtype=float) ** 3 * self.q(theta)

    def mean_curvature(self, r, theta):
        """Exact weighted mean curvature of P in polar form.

        With a = P_r, b = P_θ/r and s = sin³θ cos³θ,
        H = 7a/(rW) + (a_r(1+b²) − ab b_r)/W³ + [(s′/s) b/W + (b_θ(1+a²) − ab a_θ)/W³]/r.
        """
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        q, dq, ddq = self.q(theta), self.q(theta, 1), self.q(theta, 2)
        a, b = 3 * r ** 2 * q, r ** 2 * dq
        a_r, b_r = 6 * r * q, 2 * r * dq
        a_t, b_t = 3 * r ** 2 * dq, r ** 2 * ddq
        W = np.sqrt(1 + a * a + b * b)
        W3 = W ** 3
        ds = 3 / np.tan(theta) - 3 * np.tan(theta)
        ang = np.where(np.isclose(theta, HALF), 3 * b_t / W, ds * b / W)  # axis: (s′/s)b → 3b_θ
        return (7 * a / (r * W) + (a_r * (1 + b * b) - a * b * b_r) / W3
                + (ang + (b_t * (1 + a * a) - a * b * a_t) / W3) / r)


def f0_on_mesh(mesh: PolarMesh, profile: AngularProfile) -> np.ndarray:
    g = profile.evaluate(mesh.theta).g
    return mesh.r[:, None] ** 3 * g[None, :]


@dataclass
class GraphField:
    """Discrete graph function over a polar sector mesh."""

    mesh: PolarMesh
    F: np.ndarray
    kinds: np.ndarray
    F0: np.ndarray
    history: list = field(default_factory=list)
    iterations: int = 0
    roundoff_floor: bool = False

    @property
    def D(self):
        return self.F - self.F0

    def mean_curvature(self) -> np.ndarray:
        return discrete_mean_curvature(self.F, self.mesh)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "theta", "F", "F0", "kind"])
        for i, rv in enumerate(self.mesh.r):
            for j, tv in enumerate(self.mesh.theta):
                w.writerow([f"{rv:.12e}", f"{tv:.12e}", f"{self.F[i, j]:.15e}",
                            f"{self.F0[i, j]:.15e}", KIND_NAMES[int(self.kinds[i, j])]])
        return buf.getvalue()

    def surface(self) -> "SplineSurface":
        return SplineSurface.from_field(self)


class _Coloring:
    """Nine-colour partition of a 3×3 stencil for compressed Jacobians."""

    def __init__(self, shape, unknown):
        n_r, n_t = shape
        I, J = np.meshgrid(np.arange(n_r), np.arange(n_t), indexing="ij")
        self.color = (I % 3) * 3 + (J % 3)
        self.idx = -np.ones(shape, dtype=int)
        self.idx[unknown] = np.arange(int(unknown.sum()))
        self.unknown = unknown
        self.rows_i, self.rows_j = np.nonzero(unknown)

    def columns_for(self, c):
        """For each unknown row, the unknown column of colour c in its 3×3 neighbourhood (or −1)."""
        ci, cj = divmod(c, 3)
        n_r, n_t = self.idx.shape
        # offset d ∈ {−1,0,1} with (i+d) % 3 == ci
        di = (ci - self.rows_i + 1) % 3 - 1
        dj = (cj - self.rows_j + 1) % 3 - 1
        ni, nj = self.rows_i + di, self.rows_j + dj
        ok = (ni >= 0) & (ni < n_r) & (nj >= 0) & (nj < n_t)
        col = np.full(self.rows_i.size, -1)
        col[ok] = self.idx[ni[ok], nj[ok]]
        return col


def _linearized_divergence(F, phi, geo: _Geometry, neumann_lo: bool, neumann_hi: bool):
    """Exact derivative of ``_divergence`` at F in the direction φ.

    On each face with P = F_r, Q = F_θ/r the flux derivatives are
    r⁷S[(1 + Q²)δP − PQ δQ]/W³ (radial) and r⁵s[(1 + P²)δQ − PQ δP] r/W³ (angular),
    which avoids the cancellation of differencing P/W when W is large.
    """
    Fr_n, Ft_n = _node_gradients(F, geo, neumann_lo, neumann_hi)
    pr_n, pt_n = _node_gradients(phi, geo, neumann_lo, neumann_hi)
    rf = geo.rf[:, None]
    P = (F[1:] - F[:-1]) / geo.dr[:, None]
    Q = 0.5 * (Ft_n[1:] + Ft_n[:-1]) / rf
    dP = (phi[1:] - phi[:-1]) / geo.dr[:, None]
    dQ = 0.5 * (pt_n[1:] + pt_n[:-1]) / rf
    W3 = (1 + P * P + Q * Q) ** 1.5
    flux_r = rf ** 7 * ((1 + Q * Q) * dP - P * Q * dQ) / W3 * geo.S[None, :]
    rr = np.where(geo.r == 0, 1.0, geo.r)[:, None]
    P2 = 0.5 * (Fr_n[:, 1:] + Fr_n[:, :-1])
    Q2 = (F[:, 1:] - F[:, :-1]) / geo.dth[None, :] / rr
    dP2 = 0.5 * (pr_n[:, 1:] + pr_n[:, :-1])
    dQ2 = (phi[:, 1:] - phi[:, :-1]) / geo.dth[None, :] / rr
    W3b = (1 + P2 * P2 + Q2 * Q2) ** 1.5
    flux_t = geo.s_tf[None, :] * rr * ((1 + P2 * P2) * dQ2 - P2 * Q2 * dP2) / W3b * geo.M5[:, None]
    div = np.zeros_like(F)
    div[:-1] += flux_r
    div[1:] -= flux_r
    div[:, :-1] += flux_t
    div[:, 1:] -= flux_t
    return div


def _jacobian(F, geo, unknown, coloring: _Coloring, neumann_hi, col_scale=None):
    """Sparse d(H_h)/dF on the unknown nodes, probed with nine colour vectors.

    ``col_scale`` (nodal array) right-multiplies by a diagonal, i.e. returns the
    matrix of φ ↦ H_h′[F](col_scale·φ).
    """
    rows, cols, vals = [], [], []
    rows_all = np.arange(coloring.rows_i.size)
    for c in range(9):
        probe = (unknown & (coloring.color == c)).astype(float)
        if not probe.any():
            continue
        if col_scale is not None:
            probe = probe * col_scale
        div = _linearized_divergence(F, probe, geo, False, neumann_hi)
        d = div[unknown] / geo.vol[unknown]
        col = coloring.columns_for(c)
        ok = col >= 0
        rows.append(rows_all[ok])
        cols.append(col[ok])
        vals.append(d[ok])
    n = rows_all.size
    return sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))


def linearized_mean_curvature(F, phi, mesh: PolarMesh, neumann_lo: bool = False,
                              neumann_hi: bool = True) -> np.ndarray:
    """H_h′[F](φ) at every node: the exact linearization of ``discrete_mean_curvature``."""
    geo = _Geometry(mesh)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _linearized_divergence(F, phi, geo, neumann_lo, neumann_hi) / geo.vol


def solve_dirichlet(R: float, profile: AngularProfile, nr: int = 200, ntheta: int = 200,
                    tol: float = 1e-9, max_iter: int = 30, grading: float = 1.5,
                    mesh: PolarMesh | None = None, correction: str = "f0",
                    n_modes: int = 8) -> GraphField:
    """Damped Newton for H[F] = 0 on Γ_R with F = F₀ on the arc.

    With ``defect_correction`` the discrete equation is
    H_h[F] − H_h[P] + H[P] = 0 for a smooth reference cone P = r³q(θ) close to
    F₀ (``SmoothReference``), with H[P] exact.  This removes the truncation
    error of the r³ growth, which dominates at large r where H[F] ~ r⁻⁵, and
    leaves only the error on F − P.  F₀ itself is not used because its wall
    singularity (g″ ~ (θ − π/4)^{−2/3}) would inject a rough source.

    Raises
    ------
    NewtonDiverged
        If the Armijo line search fails or ``max_iter`` is reached; carries the
        residual trace.
    LinearSolveFailure
        If the sparse Jacobian factorization fails.
    """
    if R <= 0 or tol <= 0:
        raise ValueError("R and tol must be positive")
    mesh = mesh or polar_mesh(R, nr, ntheta, grading)
    geo = _Geometry(mesh)
    kinds = node_kinds(mesh)
    unknown = (kinds == INTERIOR) | (kinds == AXIS)
    F0 = f0_on_mesh(mesh, profile)
    F = F0.copy()
    F[kinds == WALL] = 0.0
    F[kinds == ORIGIN] = 0.0
    coloring = _Coloring(mesh.shape, unknown)

    shift = np.zeros(int(unknown.sum()))
    Rg, Tg = np.meshgrid(mesh.r, mesh.theta, indexing="ij")
    if correction == "f0":
        exact = mean_curvature_f0(PolarPoint(Rg[unknown], Tg[unknown]), profile)
        shift = exact - (_divergence(F0, geo, False, True) / geo.vol)[unknown]
    elif correction == "smooth":
        ref = SmoothReference.fit(profile, n_modes)
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = ref.mean_curvature(Rg[unknown], Tg[unknown])
        shift = exact - (_divergence(ref.value(Rg, Tg), geo, False, True) / geo.vol)[unknown]
    elif correction != "none":
        raise ValueError(f"unknown correction {correction!r}")

    def residual(Fv):
        return (_divergence(Fv, geo, False, True) / geo.vol)[unknown] + shift

    res = residual(F)
    trace = [float(np.max(np.abs(res)))]
    it = 0
    floor = False
    while trace[-1] > tol and not floor:
        if it >= max_iter:
            raise NewtonDiverged(f"no convergence in {max_iter} iterations", trace)
        J = _jacobian(F, geo, unknown, coloring, True)
        try:
            step = splu(J).solve(-res)
        except RuntimeError as exc:
            raise LinearSolveFailure(str(exc)) from exc
        if not np.all(np.isfinite(step)):
            raise LinearSolveFailure("non-finite Newton step")
        norm0 = np.linalg.norm(res)
        lam = 1.0
        while True:
            trial = F.copy()
            trial[unknown] += lam * step
            res_t = residual(trial)
            if np.all(np.isfinite(res_t)) and np.linalg.norm(res_t) <= (1 - 1e-4 * lam) * norm0:
                break
            lam *= 0.5
            if lam < 1e-4:
                if np.max(np.abs(step)) <= 1e-12 * (1 + np.max(np.abs(F))):
                    floor = True  # residual already at rounding level
                    trial, res_t = F, res
                    break
                raise NewtonDiverged("line search failed", trace)
        if floor:
            break
        F, res = trial, res_t
        it += 1
        trace.append(float(np.max(np.abs(res))))
    return GraphField(mesh, F, kinds, F0, trace, it, floor)


# --- comparison certificates ----------------------------------------------------------

@dataclass
class SandwichReport:
    lower_margin: float
    upper_margin: float
    C: float
    R0: float
    sigma: float
    slack: float
    verdict: bool


def sandwich_check(field_: GraphField, sigma: float, R0: float = 2.0, slack: float | None = None,
                   C_max: float = 1e6) -> SandwichReport:
    """F₀ ≤ F_R ≤ F₀ + C tanh(F₀/r)/r^σ on r > R₀ with the smallest admissible C ≥ 1.

    ``slack`` defaults to 1e−6·h² with h the largest mesh spacing in r.
    """
    m = field_.mesh
    if slack is None:
        slack = 1e-6 * float(np.max(np.diff(m.r))) ** 2
    D = field_.F - field_.F0
    lower = float(np.min(D))
    r = m.r[:, None] * np.ones(m.shape)
    sel = (r > R0) & (field_.F0 > 0)
    weight = np.tanh(field_.F0[sel] / r[sel]) / r[sel] ** sigma
    ratio = D[sel] / weight
    C = max(1.0, float(np.max(ratio))) if ratio.size else 1.0
    upper = float(np.min(C * weight - D[sel])) if ratio.size else 0.0
    verdict = lower >= -slack and upper >= -slack and C <= C_max
    return SandwichReport(lower, upper, C, R0, sigma, slack, verdict)


def tilde_bound_check(field_: GraphField, sigma: float, a0: float) -> dict:
    """Fit Ã from the data on the first ring r ≥ a₀ and test F_R ≤ F₀ + ÃF₀/r^σ for r ≥ a₀."""
    m = field_.mesh
    D = field_.F - field_.F0
    i0 = int(np.searchsorted(m.r, a0))
    r = m.r[:, None] * np.ones(m.shape)
    pos = field_.F0 > 0
    ring = pos.copy()
    ring[:i0] = False
    ring[i0 + 1:] = False
    A_ring = float(np.max(D[ring] * r[ring] ** sigma / field_.F0[ring]))
    A_t = max(1.0, A_ring)
    sel = pos & (r >= m.r[i0])
    margin = float(np.min(A_t * field_.F0[sel] / r[sel] ** sigma - D[sel]))
    return dict(A_tilde=A_t, a0=float(m.r[i0]), margin=margin, verdict=margin >= 0)


# --- smooth reconstruction ------------------------------------------------------------

class SplineSurface:
    """Quintic tensor spline of a solved field on the block-symmetric extension.

    θ ∈ [π/4, π/2] is reflected oddly across π/4 and evenly across π/2, giving
    a spline on θ ∈ [−π/2, π] that is evaluated at θ = atan2(|v|, u) ∈ [0, π].
    """

    def __init__(self, r, theta, F):
        self.spline = RectBivariateSpline(r, theta, F, kx=5, ky=5, s=0)
        self.R = float(r[-1])

    @classmethod
    def from_field(cls, f: GraphField):
        th = f.mesh.theta
        if not (np.isclose(th[0], QUARTER) and np.isclose(th[-1], HALF)):
            raise ValueError("reconstruction needs the full sector π/4 ≤ θ ≤ π/2")
        F = f.F
        # [0, π/4): odd reflection; (π/2, π]: even reflection of the quarter
        t_low = HALF - th[::-1][:-1]
        F_low = -F[:, ::-1][:, :-1]
        quarter_t = np.concatenate([t_low, th])
        quarter_F = np.concatenate([F_low, F], axis=1)
        t_high = np.pi - quarter_t[::-1][1:]
        F_high = quarter_F[:, ::-1][:, 1:]
        # close the node set to [−π/2, π], symmetric about π/4, so the interpolant is exactly odd there
        t_neg = HALF - t_high[::-1]
        F_neg = -F_high[:, ::-1]
        t_all = np.concatenate([t_neg, quarter_t, t_high])
        F_all = np.concatenate([F_neg, quarter_F, F_high], axis=1)
        return cls(f.mesh.r, t_all, F_all)

    def polar_jet(self, r, theta) -> Jet:
        ev = self.spline.ev
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        val = ev(r, theta)
        d = np.stack([ev(r, theta, dx=1), ev(r, theta, dy=1)], axis=-1)
        dd = np.empty(val.shape + (2, 2))
        dd[..., 0, 0] = ev(r, theta, dx=2)
        dd[..., 1, 1] = ev(r, theta, dy=2)
        dd[..., 0, 1] = dd[..., 1, 0] = ev(r, theta, dx=1, dy=1)
        return Jet(val, d, dd)

    def derivs(self, u, v) -> Jet:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        sv = np.where(v < 0, -1.0, 1.0)
        r = np.hypot(u, v)
        th = np.arctan2(np.abs(v), u)
        f = self.polar_jet(r, th)
        R_ = Jet.variable(r, 0)
        T_ = Jet.variable(th, 1)
        out = change_variables(f, R_ * T_.cos(), R_ * T_.sin())
        # evenness in v
        out.d[..., 1] *= sv
        out.dd[..., 0, 1] *= sv
        out.dd[..., 1, 0] *= sv
        return out


def cauchy_in_R(fields: list[GraphField], r_window=(5.0, 10.0), n: int = 24) -> list[float]:
    """Max differences of successive solutions on a fixed window of the sector."""
    rr = np.linspace(*r_window, n)
    tt = np.linspace(QUARTER, HALF, n)
    Rg, Tg = np.meshgrid(rr, tt, indexing="ij")
    vals = []
    for f in fields:
        sp_ = RectBivariateSpline(f.mesh.r, f.mesh.theta, f.F, kx=3, ky=3, s=0)
        vals.append(sp_.ev(Rg, Tg))
    return [float(np.max(np.abs(b - a))) for a, b in zip(vals, vals[1:])]
