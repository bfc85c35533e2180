"""Orthogonal (t, s) chart adapted to F₀ = r³ g(θ) on the sector π/4 < θ < π/2.

    t = r³ g(θ),    s = r⁷ sin³(2θ) sin φ(θ) / 56.

The inverse map eliminates log r and solves a single monotone equation in θ.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, OutOfChart
from .jets import Jet, change_variables
from .profile import HALF, QUARTER, AngularProfile

LOG56 = np.log(56.0)


@dataclass(frozen=True)
class PolarPoint:
    r: np.ndarray
    theta: np.ndarray


@dataclass(frozen=True)
class TSPoint:
    t: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class ChartMetrics:
    grad_F0_sq: np.ndarray
    rho: np.ndarray
    cos_phi: np.ndarray
    sin_phi: np.ndarray


@dataclass(frozen=True)
class FlowDerivatives:
    r_t: np.ndarray
    theta_t: np.ndarray
    r_s: np.ndarray
    theta_s: np.ndarray


def _sin2theta(theta):
    # evaluated from the nearer endpoint of the sector
    theta = np.asarray(theta, dtype=float)
    return np.where(theta < 3 * np.pi / 8, np.cos(2 * (theta - QUARTER)), np.sin(2 * (HALF - theta)))


def _trig_phi(pv):
    """(cos φ, sin φ) without cancellation at either end."""
    cos_phi = np.sin(pv.eps)
    sin_phi = np.where(pv.phi < 1.0, np.sin(pv.phi), np.cos(pv.eps))
    return cos_phi, sin_phi


def forward(p: PolarPoint, profile: AngularProfile) -> TSPoint:
    """(r, θ) → (t, s) by direct formula evaluation."""
    r = np.asarray(p.r, dtype=float)
    theta = np.asarray(p.theta, dtype=float)
    pv = profile.evaluate(theta)
    _, sin_phi = _trig_phi(pv)
    t = r ** 3 * pv.g
    s = r ** 7 * _sin2theta(theta) ** 3 * sin_phi / 56.0
    return TSPoint(t, s)


def _lambda(profile, theta):
    """Λ(θ) = 7 log g − 9 log sin2θ − 3 log sin φ + 3 log 56 and Λ′(θ); Λ is increasing."""
    pv = profile.evaluate(theta)
    cos_phi, sin_phi = _trig_phi(pv)
    sin2 = _sin2theta(theta)
    val = 7 * np.log(pv.g) - 9 * np.log(sin2) - 3 * np.log(sin_phi) + 3 * LOG56
    der = 21 * sin_phi / cos_phi - 18 * np.cos(2 * theta) / sin2 - 3 * cos_phi / sin_phi * pv.dphi
    return val, der


def inverse_bisect(q: TSPoint, profile: AngularProfile, tol: float = 1e-14) -> PolarPoint:
    """Reference inverse by plain bisection on Λ(θ) = 7 log t − 3 log s."""
    t = np.atleast_1d(np.asarray(q.t, dtype=float)).ravel()
    s = np.atleast_1d(np.asarray(q.s, dtype=float)).ravel()
    lam = 7 * np.log(t) - 3 * np.log(s)
    lo = np.full_like(t, QUARTER + 1e-12)
    hi = np.full_like(t, HALF - 1e-12)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        up = _lambda(profile, mid)[0] > lam
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    th = 0.5 * (lo + hi)
    r = np.cbrt(t / profile.evaluate(th).g)
    return PolarPoint(r.reshape(np.shape(q.t)), th.reshape(np.shape(q.t)))


def inverse(q: TSPoint, profile: AngularProfile, tol: float = 1e-12,
            max_iter: int = 100) -> PolarPoint:
    """(t, s) → (r, θ).

    Eliminating log r from the system (3 log r + log g = log t,
    7 log r + log(sin³2θ sin φ / 56) = log s) leaves the monotone scalar
    equation Λ(θ) = 7 log t − 3 log s, solved by Newton safeguarded with a
    shrinking bracket; then r = (t/g)^{1/3}.

    Raises
    ------
    OutOfChart
        If any point has t ≤ 0 or s ≤ 0.
    NonConvergence
        If the iteration does not reach ``tol`` within ``max_iter`` steps.
    """
    t = np.asarray(q.t, dtype=float)
    s = np.asarray(q.s, dtype=float)
    shape = np.broadcast_shapes(t.shape, s.shape)
    t, s = np.broadcast_to(t, shape).ravel(), np.broadcast_to(s, shape).ravel()
    if np.any(t <= 0) or np.any(s <= 0):
        raise OutOfChart("t = 0 or s = 0 lies on the chart boundary")
    lam = 7 * np.log(t) - 3 * np.log(s)
    lo = np.full_like(t, QUARTER)
    hi = np.full_like(t, HALF)
    theta = np.full_like(t, HALF - 0.1)
    done = np.zeros(t.size, dtype=bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        th = theta[act]
        with np.errstate(divide="ignore", invalid="ignore"):
            val, der = _lambda(profile, th)
        res = val - lam[act]
        up = res > 0
        hi[act] = np.where(up, th, hi[act])
        lo[act] = np.where(up, lo[act], th)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = th - res / der
        ok = np.isfinite(nxt) & (nxt >= lo[act]) & (nxt <= hi[act])
        nxt = np.where(ok, nxt, 0.5 * (lo[act] + hi[act]))
        conv = (np.abs(res) < tol) | (np.abs(nxt - th) < 1e-15) | (hi[act] - lo[act] < 4e-16)
        theta[act] = np.where(np.abs(res) < tol, th, nxt)
        done[act[conv]] = True
    if not np.all(done):
        raise NonConvergence("inverse chart map did not converge")
    r = np.cbrt(t / profile.evaluate(theta).g)
    return PolarPoint(r.reshape(shape), theta.reshape(shape))


def metrics(p: PolarPoint, profile: AngularProfile) -> ChartMetrics:
    r = np.asarray(p.r, dtype=float)
    theta = np.asarray(p.theta, dtype=float)
    pv = profile.evaluate(theta)
    cos_phi, sin_phi = _trig_phi(pv)
    grad_sq = r ** 4 * (9 * pv.g ** 2 + pv.dg ** 2)
    rho = 8.0 / (r ** 6 * _sin2theta(theta) ** 3)
    return ChartMetrics(grad_sq, rho, cos_phi, sin_phi)


def flow_derivatives(p: PolarPoint, profile: AngularProfile) -> FlowDerivatives:
    """Closed-form partial derivatives of (r, θ) with respect to (t, s)."""
    r = np.asarray(p.r, dtype=float)
    theta = np.asarray(p.theta, dtype=float)
    pv = profile.evaluate(theta)
    cos_phi, sin_phi = _trig_phi(pv)
    ts = forward(p, profile)
    sin2phi = 2 * sin_phi * cos_phi
    with np.errstate(divide="ignore", invalid="ignore"):
        r_s = r * sin_phi ** 2 / (7 * ts.s)
        th_s = -sin2phi / (14 * ts.s)
    return FlowDerivatives(r * cos_phi ** 2 / (3 * ts.t), sin2phi / (6 * ts.t), r_s, th_s)


class ChartJets:
    """Second-order jets in (r, θ) of the chart and its metric coefficients.

    Attributes
    ----------
    R, TH, G, PHI, COSPHI, SINPHI, T, S : Jet
        Base variables and profile quantities.
    c1 : Jet
        |∇F₀|⁻² = cos²φ / (9 r⁴ g²).
    rho_m2 : Jet
        ρ⁻² = (uv)⁶.
    grad : ndarray
        |∇F₀| (value only).
    """

    def __init__(self, profile: AngularProfile, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        r, theta = np.broadcast_arrays(r, theta)
        pv = profile.evaluate(theta)
        self.pv = pv
        sh = r.shape
        self.R = Jet.variable(r, 0)
        self.TH = Jet.variable(theta, 1)

        def prof_jet(v, dv, ddv):
            d = np.zeros(sh + (2,))
            dd = np.zeros(sh + (2, 2))
            d[..., 1] = dv
            dd[..., 1, 1] = ddv
            return Jet(v, d, dd)

        self.G = prof_jet(pv.g, pv.dg, pv.ddg)
        self.PHI = prof_jet(pv.phi, pv.dphi, pv.ddphi)
        cos_phi, sin_phi = _trig_phi(pv)
        self.COSPHI = self.PHI.apply(cos_phi, -sin_phi, -cos_phi)
        self.SINPHI = self.PHI.apply(sin_phi, cos_phi, -sin_phi)
        sin2 = prof_jet(_sin2theta(theta), 2 * np.cos(2 * theta), -4 * _sin2theta(theta))
        self.SIN2 = sin2
        self.T = self.R ** 3 * self.G
        self.S = self.R ** 7 * sin2 ** 3 * self.SINPHI / 56.0
        self.c1 = self.COSPHI * self.COSPHI / (9.0 * self.R ** 4 * self.G * self.G)
        self.rho_m2 = self.R ** 12 * sin2 ** 6 / 64.0
        self.grad = 3 * r ** 2 * pv.g / self.COSPHI.val

    def to_ts(self, f: Jet) -> Jet:
        """Re-express a jet in (r, θ) as a jet in (t, s)."""
        return change_variables(f, self.T, self.S)


@dataclass(frozen=True)
class FrameDefects:
    cosine: np.ndarray  # ⟨u_t, u_s⟩ / (|u_t| |u_s|)
    norm_t: np.ndarray  # ⟨u_t, u_t⟩ |∇F₀|² − 1
    norm_s: np.ndarray  # ⟨u_s, u_s⟩ / ρ² − 1
    det: np.ndarray  # det u′ · |∇F₀| / ρ + 1


def frame_defects(p: PolarPoint, profile: AngularProfile, h: float = 1e-4) -> FrameDefects:
    """Tangent frame of the inverse map by centred differences with relative steps h·t, h·s.

    Frame identities (all defects vanish up to O(h²)): ⟨u_t, u_s⟩ = 0,
    ⟨u_t, u_t⟩ = |∇F₀|⁻², ⟨u_s, u_s⟩ = ρ², det(u_t, u_s) = −ρ/|∇F₀|.
    """
    q = forward(p, profile)

    def uv(t, s):
        pp = inverse(TSPoint(t, s), profile)
        return np.stack([pp.r * np.cos(pp.theta), pp.r * np.sin(pp.theta)], axis=-1)

    dt, ds = h * q.t, h * q.s
    ut = (uv(q.t + dt, q.s) - uv(q.t - dt, q.s)) / (2 * dt)[..., None]
    us = (uv(q.t, q.s + ds) - uv(q.t, q.s - ds)) / (2 * ds)[..., None]
    m = metrics(p, profile)
    dot = np.sum(ut * us, axis=-1)
    nt, ns = np.sum(ut * ut, axis=-1), np.sum(us * us, axis=-1)
    det = ut[..., 0] * us[..., 1] - ut[..., 1] * us[..., 0]
    grad = np.sqrt(m.grad_F0_sq)
    return FrameDefects(dot / np.sqrt(nt * ns), nt * m.grad_F0_sq - 1, ns / m.rho ** 2 - 1,
                        det * grad / m.rho + 1)
