"""Weighted mean-curvature operator of block-symmetric graphs and its (t, s) forms.

For F = F(u, v) the operator is

    H[F] = (uv)⁻³ ∇·((uv)³ ∇F / W),    W = √(1 + |∇F|²).

Perturbations F = F₀ + Aφ are handled through second-order jets in (r, θ),
re-expressed in (t, s).  Three independent evaluation routes exist:

* the A-polynomial ``a_expansion`` (H₀ + AH₁ + A²H₂ + A³H₃),
* ``mean_curvature_closed``: exact (u, v) derivatives of F plugged into the
  non-divergence form,
* ``mean_curvature_ts_fd``: a conservative finite-difference discretization
  of the divergence form in (t, s).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .chart import ChartJets, PolarPoint, TSPoint, _trig_phi, forward, inverse, metrics
from .errors import BoundaryTooClose, GridTooCoarse
from .jets import Jet, change_variables
from .profile import HALF, QUARTER, AngularProfile

KINDS = ("tilde_F0", "const", "tanh", "beta", "power", "one")


@dataclass(frozen=True)
class Perturbation:
    """Perturbation φ(r, t) of F₀ used in F = F₀ + Aφ.

    kind
        ``tilde_F0``: t r^{−σ}; ``const``: r^{−σ}; ``tanh``: r^{−σ} tanh(t/r);
        ``beta``: r^{−σ}(1 − e^{−t/r}); ``power``: r^{σ} t^{σ₁}; ``one``: 1.
    """

    kind: str
    sigma: float = 0.0
    sigma1: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")

    def jet(self, cj: ChartJets) -> Jet:
        R, T, sg = cj.R, cj.T, self.sigma
        if self.kind == "tilde_F0":
            return T * R ** (-sg)
        if self.kind == "const":
            return R ** (-sg)
        if self.kind == "tanh":
            return R ** (-sg) * (T / R).tanh()
        if self.kind == "beta":
            return R ** (-sg) * (1.0 - (-(T / R)).exp())
        if self.kind == "power":
            return R ** sg * T ** self.sigma1
        return Jet(np.ones_like(R.val))

    def value(self, r, t):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        sg = self.sigma
        if self.kind == "tilde_F0":
            return t * r ** (-sg)
        if self.kind == "const":
            return r ** (-sg) + 0 * t
        if self.kind == "tanh":
            return r ** (-sg) * np.tanh(t / r)
        if self.kind == "beta":
            return r ** (-sg) * -np.expm1(-t / r)
        if self.kind == "power":
            return r ** sg * t ** self.sigma1
        return np.ones(np.broadcast_shapes(r.shape, t.shape))


class TSDerivatives(NamedTuple):
    t: np.ndarray
    s: np.ndarray
    tt: np.ndarray
    ts: np.ndarray
    ss: np.ndarray


def _ts(j: Jet) -> TSDerivatives:
    return TSDerivatives(j.d[..., 0], j.d[..., 1], j.dd[..., 0, 0], j.dd[..., 0, 1], j.dd[..., 1, 1])


class AExpansion(NamedTuple):
    H0: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray

    def total(self, A):
        return self.H0 + A * (self.H1 + A * (self.H2 + A * self.H3))

    def scale(self, A):
        """Sum of absolute term magnitudes, used as a relative slack reference."""
        a = abs(A)
        return np.abs(self.H0) + a * np.abs(self.H1) + a * a * np.abs(self.H2) + a ** 3 * np.abs(self.H3)


@dataclass
class _Context:
    """Chart jets plus the (t, s) derivatives of c₁ = |∇F₀|⁻² and m = ρ⁻²c₁."""

    cj: ChartJets
    c1: TSDerivatives = field(init=False)
    c1v: np.ndarray = field(init=False)
    m: TSDerivatives = field(init=False)
    mv: np.ndarray = field(init=False)

    def __post_init__(self):
        c1 = self.cj.to_ts(self.cj.c1)
        m = self.cj.to_ts(self.cj.rho_m2 * self.cj.c1)
        self.c1, self.c1v = _ts(c1), c1.val
        self.m, self.mv = _ts(m), m.val


def _context(profile, p: PolarPoint) -> _Context:
    return _Context(ChartJets(profile, p.r, p.theta))


def h0_closed_form(p: PolarPoint, profile: AngularProfile) -> np.ndarray:
    """−½∂_t|∇F₀|⁻² = r² cos²φ / (9t³) · [⅔ cos²φ + ⅓ sin²φ (φ′ + 3)]."""
    theta = np.asarray(p.theta, dtype=float)
    r = np.asarray(p.r, dtype=float)
    pv = profile.evaluate(theta)
    cos_phi, sin_phi = _trig_phi(pv)
    t = r ** 3 * pv.g
    c2 = cos_phi ** 2
    return r ** 2 * c2 / (9 * t ** 3) * (2 * c2 / 3 + sin_phi ** 2 * (pv.dphi + 3) / 3)


def h0_axis(r) -> np.ndarray:
    """Value of ``h0_closed_form`` on θ = π/2 (φ = 0, g = 1): (2/27) r⁻⁷."""
    return 2.0 / 27.0 * np.asarray(r, dtype=float) ** -7


def _expansion(ctx: _Context, f: TSDerivatives) -> AExpansion:
    c1, m, c1v, mv = ctx.c1, ctx.m, ctx.c1v, ctx.mv
    flux = mv * f.s  # ρ⁻² φ_s / |∇F₀|²
    dflux_s = m.s * f.s + mv * f.ss
    R1 = f.t ** 2 + mv * f.s ** 2
    R1_t = 2 * f.t * f.tt + m.t * f.s ** 2 + 2 * mv * f.s * f.ts
    R1_s = 2 * f.t * f.ts + m.s * f.s ** 2 + 2 * mv * f.s * f.ss
    H0 = -0.5 * c1.t
    H1 = c1v * f.tt - 0.5 * c1.t * f.t + (1 + c1v) * dflux_s - 0.5 * flux * c1.s
    H2 = f.t * f.tt - 0.5 * R1_t + 2 * f.t * dflux_s - flux * f.ts
    H3 = R1 * f.tt - 0.5 * f.t * R1_t + R1 * dflux_s - 0.5 * flux * R1_s
    return AExpansion(H0, H1, H2, H3)


def a_expansion(p: PolarPoint, profile: AngularProfile, pert: Perturbation) -> AExpansion:
    """Coefficients of |∇F₀|⁻¹ R^{3/2} H[F₀ + Aφ] as a cubic polynomial in A."""
    ctx = _context(profile, p)
    return _expansion(ctx, _ts(ctx.cj.to_ts(pert.jet(ctx.cj))))


def expansion_factor(p: PolarPoint, profile: AngularProfile, pert: Perturbation, A: float):
    """Positive factor |∇F₀| R^{−3/2} with H[F₀ + Aφ] = factor · Σ Aᵏ Hₖ."""
    ctx = _context(profile, p)
    f = _ts(ctx.cj.to_ts(pert.jet(ctx.cj)))
    R = 1 + ctx.c1v + 2 * A * f.t + A * A * (f.t ** 2 + ctx.mv * f.s ** 2)
    return ctx.cj.grad * R ** -1.5


def tilde_L0(pert: Perturbation, p: PolarPoint, profile: AngularProfile) -> np.ndarray:
    """|∇F₀| [∂_t(φ_t/|∇F₀|²) + ∂_s(ρ⁻² φ_s/|∇F₀|²)] in closed form."""
    ctx = _context(profile, p)
    f = _ts(ctx.cj.to_ts(pert.jet(ctx.cj)))
    inner = ctx.c1.t * f.t + ctx.c1v * f.tt + ctx.m.s * f.s + ctx.mv * f.ss
    return ctx.cj.grad * inner


def _uv_jet(cj: ChartJets, f: Jet) -> Jet:
    U = cj.R * cj.TH.cos()
    V = cj.R * cj.TH.sin()
    return change_variables(f, U, V)


def uv_derivatives(p: PolarPoint, profile: AngularProfile, pert: Perturbation | None = None,
                   A: float = 0.0) -> Jet:
    """Exact value, gradient and Hessian in (u, v) of F₀ + Aφ."""
    cj = ChartJets(profile, p.r, p.theta)
    F = cj.T
    if pert is not None and A != 0.0:
        F = F + A * pert.jet(cj)
    return _uv_jet(cj, F)


def mean_curvature_from_jet(F: Jet, u, v) -> np.ndarray:
    """H[F] from exact (u, v) derivatives via the non-divergence form."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    Fu, Fv = F.d[..., 0], F.d[..., 1]
    Fuu, Fuv, Fvv = F.dd[..., 0, 0], F.dd[..., 0, 1], F.dd[..., 1, 1]
    W2 = 1 + Fu ** 2 + Fv ** 2
    W = np.sqrt(W2)
    lap = ((1 + Fv ** 2) * Fuu - 2 * Fu * Fv * Fuv + (1 + Fu ** 2) * Fvv) / W2
    return (lap + 3 * (Fu / u + Fv / v)) / W


def mean_curvature_closed(p: PolarPoint, profile: AngularProfile, pert: Perturbation | None = None,
                          A: float = 0.0) -> np.ndarray:
    """H[F₀ + Aφ] from exact derivatives of the tabulated profile."""
    r = np.asarray(p.r, dtype=float)
    theta = np.asarray(p.theta, dtype=float)
    F = uv_derivatives(p, profile, pert, A)
    return mean_curvature_from_jet(F, r * np.cos(theta), r * np.sin(theta))


def mean_curvature_uv(F: Callable, u, v, h: float = 1e-3) -> np.ndarray:
    """Second-order finite-difference H[F] of a callable graph F(u, v).

    Fluxes are evaluated at half-points with the weights (u±h/2)³, (v±h/2)³.
    On u = 0 (or v = 0) the term 3F_u/(uW) is replaced by its limit 3F_uu/W.

    Raises
    ------
    BoundaryTooClose
        If 0 < u < h or 0 < v < h, so the stencil would cross an axis.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(((u > 0) & (u < h)) | ((v > 0) & (v < h))) or np.any((u < 0) | (v < 0)):
        raise BoundaryTooClose("stencil leaves the quadrant")

    def grad_at(uu, vv):
        Fu = (F(uu + h / 2, vv) - F(uu - h / 2, vv)) / h
        Fv = (F(uu, vv + h / 2) - F(uu, vv - h / 2)) / h
        return Fu, Fv

    def flux_u(uu, vv):
        # F_u/W at (uu, vv) with uu a half-point
        Fu = (F(uu + h / 2, vv) - F(uu - h / 2, vv)) / h
        Fv = (F(uu + h / 2, vv + h) - F(uu + h / 2, vv - h) + F(uu - h / 2, vv + h)
              - F(uu - h / 2, vv - h)) / (4 * h)
        return Fu / np.sqrt(1 + Fu ** 2 + Fv ** 2)

    def flux_v(uu, vv):
        Fv = (F(uu, vv + h / 2) - F(uu, vv - h / 2)) / h
        Fu = (F(uu + h, vv + h / 2) - F(uu - h, vv + h / 2) + F(uu + h, vv - h / 2)
              - F(uu - h, vv - h / 2)) / (4 * h)
        return Fv / np.sqrt(1 + Fu ** 2 + Fv ** 2)

    def weighted_div(x, flux, shift):
        # (1/x³) ∂_x(x³ flux), with the x = 0 limit 4 ∂_x flux
        up, dn = flux(*shift(+h / 2)), flux(*shift(-h / 2))
        plain = (up - dn) / h
        with np.errstate(divide="ignore", invalid="ignore"):
            weighted = ((x + h / 2) ** 3 * up - (x - h / 2) ** 3 * dn) / (h * x ** 3)
        return np.where(x == 0, 4 * plain, weighted)

    du = weighted_div(u, lambda a, b: flux_u(a, b), lambda d: (u + d, v))
    dv = weighted_div(v, lambda a, b: flux_v(a, b), lambda d: (u, v + d))
    return du + dv


def mean_curvature_ts_fd(p: PolarPoint, profile: AngularProfile, pert: Perturbation, A: float,
                         delta: float = 1e-3) -> np.ndarray:
    """H[F₀ + Aφ] by finite differences of the divergence form in (t, s).

        H = |∇F₀| [∂_t(F_t/√Q) + ∂_s(m F_s/√Q)],   Q = c₁ + F_t² + m F_s²,

    with relative steps ``delta``·t and ``delta``·s.  Because F₀ = t exactly,
    F_t/√Q − 1 is formed without cancellation.
    """
    r = np.atleast_1d(np.asarray(p.r, dtype=float))
    theta = np.atleast_1d(np.asarray(p.theta, dtype=float))
    r, theta = np.broadcast_arrays(r, theta)
    q0 = forward(PolarPoint(r, theta), profile)
    t0, s0 = q0.t, q0.s
    ht, hs = delta * t0, delta * s0

    def phi_at(dt, ds):
        tt, ss = t0 + dt * ht, s0 + ds * hs
        pp = inverse(TSPoint(tt, ss), profile)
        return A * pert.value(pp.r, tt)

    def coeff_at(dt, ds):
        tt, ss = t0 + dt * ht, s0 + ds * hs
        pp = inverse(TSPoint(tt, ss), profile)
        mt = metrics(pp, profile)
        c1 = 1.0 / mt.grad_F0_sq
        return c1, c1 / mt.rho ** 2

    P = {(i, j): phi_at(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)}

    def stable_flux(pt, qs, c1, m):
        X = c1 + 2 * pt + pt * pt + m * qs * qs
        sq = np.sqrt(1 + X)
        ft = (pt - X / (1 + sq)) / sq  # F_t/√Q − 1
        fs = m * qs / sq
        return ft, fs

    def t_face(sgn):
        pt = sgn * (P[(sgn, 0)] - P[(0, 0)]) / ht
        qs = (P[(sgn, 1)] + P[(0, 1)] - P[(sgn, -1)] - P[(0, -1)]) / (4 * hs)
        c1, m = coeff_at(0.5 * sgn, 0)
        return stable_flux(pt, qs, c1, m)[0]

    def s_face(sgn):
        qs = sgn * (P[(0, sgn)] - P[(0, 0)]) / hs
        pt = (P[(1, sgn)] + P[(1, 0)] - P[(-1, sgn)] - P[(-1, 0)]) / (4 * ht)
        c1, m = coeff_at(0, 0.5 * sgn)
        return stable_flux(pt, qs, c1, m)[1]

    div = (t_face(1) - t_face(-1)) / ht + (s_face(1) - s_face(-1)) / hs
    grad = np.sqrt(metrics(PolarPoint(r, theta), profile).grad_F0_sq)
    return (grad * div).reshape(np.shape(p.r) if np.ndim(p.r) else np.shape(p.theta) or (1,))


def tilde_L0_fd(pert: Perturbation, p: PolarPoint, profile: AngularProfile,
                delta: float = 1e-3) -> np.ndarray:
    """Finite-difference ``tilde_L0`` in (t, s) with relative steps."""
    r = np.atleast_1d(np.asarray(p.r, dtype=float))
    theta = np.atleast_1d(np.asarray(p.theta, dtype=float))
    r, theta = np.broadcast_arrays(r, theta)
    q0 = forward(PolarPoint(r, theta), profile)
    t0, s0 = q0.t, q0.s
    ht, hs = delta * t0, delta * s0

    def at(dt, ds):
        tt, ss = t0 + dt * ht, s0 + ds * hs
        pp = inverse(TSPoint(tt, ss), profile)
        mt = metrics(pp, profile)
        c1 = 1.0 / mt.grad_F0_sq
        return pert.value(pp.r, tt), c1, c1 / mt.rho ** 2

    f00 = at(0, 0)[0]
    ftp, c1tp, _ = at(1, 0)
    ftm, c1tm, _ = at(-1, 0)
    fsp, _, _ = at(0, 1)
    fsm, _, _ = at(0, -1)
    _, c1hp, _ = at(0.5, 0)
    _, c1hm, _ = at(-0.5, 0)
    _, _, mhp = at(0, 0.5)
    _, _, mhm = at(0, -0.5)
    dt_part = (c1hp * (ftp - f00) - c1hm * (f00 - ftm)) / ht ** 2
    ds_part = (mhp * (fsp - f00) - mhm * (f00 - fsm)) / hs ** 2
    grad = np.sqrt(metrics(PolarPoint(r, theta), profile).grad_F0_sq)
    return grad * (dt_part + ds_part)


def appendix_h2_h3(p: PolarPoint, profile: AngularProfile, sigma: float,
                   alt_signs: bool = False):
    """Closed forms of the A² and A³ coefficients for φ = t r^{−σ}.

    With ``alt_signs`` the two cross terms carry the opposite sign and, in the
    last term, one power of σ fewer; that variant disagrees with the expansion
    at O(σ) and is kept only for comparison.

    Returns
    -------
    (H2, H3) : tuple of ndarray
    """
    theta = np.asarray(p.theta, dtype=float)
    r = np.asarray(p.r, dtype=float)
    pv = profile.evaluate(theta)
    cos_phi, sin_phi = _trig_phi(pv)
    c, S, P, sg = cos_phi ** 2, sin_phi ** 2, pv.dphi, sigma
    cos2 = c - S
    t = r ** 3 * pv.g
    k = 7 + (2 * P - sg) * S
    den2 = 27 * t * r ** (2 * sg)
    sgn, pw = (1.0, 1) if alt_signs else (-1.0, 2)
    h2 = (sg ** 2 * S * c * (sg * c - cos2 * P)
          - 2 * sg * c * (3 - sg * c) * k
          + sgn * sg ** pw * c * S * (3 - sg * c + 2 * c * P)) / den2
    den3 = 81 * t * r ** (3 * sg)
    h3 = (sg ** 2 * S * c * (sg * c - 3 * cos2) * P
          - sg * c * (9 - 6 * sg * c + sg ** 2 * c) * k
          + sgn * sg ** 3 * S * c ** 2 * (sg * S + cos2 * P)
          + sgn * sg ** pw * S * c * (3 - sg * c) * (3 - sg * c + 2 * c * P)) / den3
    return h2, h3


# --- supersolution certificates -------------------------------------------------------

@dataclass(frozen=True)
class OperatorSample:
    r: float
    theta: float
    value: float
    margin: float
    value_fd: float


@dataclass
class SupersolutionReport:
    params: dict
    samples: list
    worst_violation: float
    routes_agree: bool
    verdict: bool
    extra: dict = field(default_factory=dict)


def sector_grid(rmin: float, rmax: float, n_r: int, n_theta: int):
    """Log-graded r nodes × interior Gauss–Chebyshev θ nodes on (π/4, π/2)."""
    r = np.geomspace(rmin, rmax, n_r)
    k = np.arange(n_theta)
    x = np.cos((2 * k + 1) * np.pi / (2 * n_theta))
    theta = QUARTER + (HALF - QUARTER) * (1 - x) / 2
    return np.meshgrid(r, theta, indexing="ij")


def threshold_radius(kind: str, a0: float, A: float, sigma: float) -> float:
    if kind == "const":
        return a0 * A ** (1.0 / (3 + sigma))
    if kind == "tanh":
        return a0 * A ** (1.0 / (1 + sigma))
    return a0


def check_supersolution(profile: AngularProfile, kind: str, sigma: float, A: float,
                        rmin: float, rmax: float, n_r: int = 24, n_theta: int = 16,
                        rel_slack: float = 1e-6, delta: float = 1e-3) -> SupersolutionReport:
    """Check H[F₀ + Aφ] ≤ 0 on a sector grid by two routes.

    The A-expansion gives the sign exactly up to the positive factor
    |∇F₀| R^{−3/2}; the (t, s) finite-difference route is independent.  A node
    is a violation when the expansion value exceeds ``rel_slack`` times the
    sum of absolute term magnitudes.

    Raises
    ------
    GridTooCoarse
        If the two routes disagree in sign at a node where both exceed the slack.
    """
    pert = Perturbation(kind, sigma)
    R, TH = sector_grid(rmin, rmax, n_r, n_theta)
    p = PolarPoint(R.ravel(), TH.ravel())
    ex = a_expansion(p, profile, pert)
    factor = expansion_factor(p, profile, pert, A)
    H_exp = factor * ex.total(A)
    slack = rel_slack * factor * ex.scale(A)
    H_fd = mean_curvature_ts_fd(p, profile, pert, A, delta=delta)
    # FD truncation is O(δ²) relative to the individual flux differences
    fd_slack = slack + 10 * delta ** 2 * np.abs(H_exp)
    disagree = ((H_exp > slack) & (H_fd < -fd_slack)) | ((H_exp < -slack) & (H_fd > fd_slack))
    if np.any(disagree):
        raise GridTooCoarse(f"expansion and finite-difference routes disagree at {int(disagree.sum())} nodes")
    excess = (H_exp - slack) / np.maximum(factor * ex.scale(A), 1e-300)
    worst = float(np.max(np.maximum(excess, 0.0)))
    samples = [OperatorSample(float(a), float(b), float(c), float(-c), float(d))
               for a, b, c, d in zip(p.r, p.theta, H_exp, H_fd)]
    verdict = worst == 0.0
    return SupersolutionReport(
        params=dict(kind=kind, sigma=sigma, A=A, rmin=rmin, rmax=rmax, n_r=n_r, n_theta=n_theta),
        samples=samples, worst_violation=worst, routes_agree=True, verdict=verdict,
        extra=dict(max_value=float(np.max(H_exp)), min_value=float(np.min(H_exp))),
    )


def fit_a0(profile: AngularProfile, kind: str, sigma: float, A: float, rmax: float,
           a0_start: float = 64.0, a0_stop: float = 0.25, factor: float = 2 ** -0.25,
           n_theta: int = 16) -> float:
    """Scan a₀ downward from ``a0_start`` and return the last value without a sign violation.

    Returns ``nan`` if even ``a0_start`` violates.
    """
    a0 = a0_start
    good = float("nan")
    pert = Perturbation(kind, sigma)
    while a0 >= a0_stop:
        r0 = threshold_radius(kind, a0, A, sigma)
        if r0 >= rmax:
            a0 *= factor
            continue
        R, TH = sector_grid(r0, min(rmax, 4 * r0), 6, n_theta)
        p = PolarPoint(R.ravel(), TH.ravel())
        ex = a_expansion(p, profile, pert)
        val = ex.total(A)
        if np.any(val > 1e-6 * ex.scale(A)):
            break
        good = a0
        a0 *= factor
    return good


def mean_curvature_f0(p: PolarPoint, profile: AngularProfile) -> np.ndarray:
    """H[F₀] = |∇F₀| (1 + |∇F₀|⁻²)^{−3/2} · (−½∂_t|∇F₀|⁻²), free of cancellation at large r.

    Uses the closed form of −½∂_t|∇F₀|⁻², so it is regular on the axis θ = π/2.
    """
    theta = np.asarray(p.theta, dtype=float)
    r = np.asarray(p.r, dtype=float)
    pv = profile.evaluate(theta)
    cos_phi, _ = _trig_phi(pv)
    grad = 3 * r ** 2 * pv.g / cos_phi
    return grad * (1 + grad ** -2) ** -1.5 * h0_closed_form(p, profile)
