"""Allen–Cahn ansatz 𝚠 (+ corrector 𝚠₁) around a scaled block-symmetric graph.

Coordinates are the reduced (u, v, x₉) of ℝ⁹ = ℝ⁴ × ℝ⁴ × ℝ; the Laplacian of a
block-symmetric field is

    Δ = ∂_uu + ∂_vv + ∂₉₉ + (3/u)∂_u + (3/v)∂_v.

The scaled graph is Γ_α = α⁻¹Γ with Fermi coordinates x = y + z n(y),
n = (∇F_α, −1)/W.  The ansatz uses the upward distance ζ = −z, so 𝚠 → +1
above the graph and increases in x₉.  Then Δζ = −Σκᵢ/(1 − ζκᵢ),
S[w(ζ)] = w′(ζ)(H + ζ|A|² + ζ²Σκᵢ³ + …) and the corrector solves
B″ + f′(w)B = z̄w′ with w₁ = |A_α|²B.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import comb

from .errors import QuadratureFailure, StencilOutOfDomain
from .geometry import FermiCoords, Scaled, Surface, curvature_spectrum, fermi_project, spectrum_from_jet

SQRT2 = np.sqrt(2.0)
C0_EXACT = 2 * SQRT2 / 3
C1_EXACT = SQRT2 * (np.pi ** 2 - 6) / 9
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


class Heteroclinic:
    """w(ζ) = tanh(ζ/√2), the odd solution of w″ + w − w³ = 0."""

    @staticmethod
    def w(z):
        return np.tanh(np.asarray(z, dtype=float) / SQRT2)

    @staticmethod
    def dw(z):
        q = np.exp(-SQRT2 * np.abs(np.asarray(z, dtype=float)))
        return 2 * SQRT2 * q / (1 + q) ** 2

    @staticmethod
    def ddw(z):
        return -SQRT2 * Heteroclinic.w(z) * Heteroclinic.dw(z)


def f(u):
    return u - u ** 3


def df(u):
    return 1 - 3 * u ** 2


# --- corrector shape ----------------------------------------------------------

def _log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2 * ax)) - np.log(2.0)


_G_MINUS_INF = 2 * np.log(2.0) / 3 - 1.0 / 6


def _inner_core(sigma):
    """I(σ) = ∫_{−∞}^σ η w′(η)² dη from the antiderivative of x sech⁴x."""
    x = np.asarray(sigma, dtype=float) / SQRT2
    t = np.tanh(x)
    G = x * (t - t ** 3 / 3) - 2 * _log_cosh(x) / 3 - t * t / 6
    return G - _G_MINUS_INF


def _ratio_tail(sigma, n_terms: int = 16):
    """I(σ)/w′(σ)² for |σ| large via the series of w′² = 8e^{−2√2σ}(1 + e^{−√2σ})^{−4}."""
    s = np.abs(np.asarray(sigma, dtype=float))
    q = np.exp(-SQRT2 * s)
    acc = np.zeros_like(s)
    for k in range(n_terms):
        beta = (2 + k) * SQRT2
        acc += (-1) ** k * comb(k + 3, 3) * q ** k * (s / beta + 1 / beta ** 2)
    return -(1 + q) ** 4 * acc


def inner_ratio(sigma, split: float = 4.0):
    """J(σ) = I(σ)/w′(σ)², split into closed-form core and asymptotic tail at |σ| = ``split``."""
    sigma = np.asarray(sigma, dtype=float)
    core = np.abs(sigma) <= split
    out = np.empty_like(sigma)
    sc = sigma[core]
    out[core] = _inner_core(sc) / Heteroclinic.dw(sc) ** 2
    out[~core] = _ratio_tail(sigma[~core])
    return out


@dataclass
class W1Shape:
    """Odd corrector profile B with w₁ = |A|²B.

    B(z̄) = w′(z̄) c(z̄), c(z̄) = ∫₀^{z̄} J(σ) dσ, evaluated by 64-point
    Gauss–Legendre quadrature of the smooth even integrand J.
    """

    z: np.ndarray
    B: np.ndarray
    split: float
    decay_rate: float
    decay_const: float
    meta: dict = field(default_factory=dict)

    @staticmethod
    def c(zbar):
        zbar = np.asarray(zbar, dtype=float)
        half = 0.5 * zbar[..., None]
        nodes = half * (_GL_X + 1)
        val = np.sum(_GL_W * inner_ratio(nodes), axis=-1) * half[..., 0]
        if not np.all(np.isfinite(val)):
            raise QuadratureFailure("corrector quadrature produced non-finite values")
        return val

    def __call__(self, zbar, order: int = 0):
        zbar = np.asarray(zbar, dtype=float)
        c = self.c(zbar)
        if order == 0:
            return Heteroclinic.dw(zbar) * c
        if order == 1:
            return Heteroclinic.ddw(zbar) * c + Heteroclinic.dw(zbar) * inner_ratio(zbar)
        if order == 2:
            B = Heteroclinic.dw(zbar) * c
            return zbar * Heteroclinic.dw(zbar) - df(Heteroclinic.w(zbar)) * B
        raise ValueError("order must be 0, 1 or 2")


def solvability_integral() -> float:
    """∫ z̄ w′(z̄)² dz̄ (zero by oddness)."""
    val, _ = quad(lambda z: z * Heteroclinic.dw(z) ** 2, -np.inf, np.inf, epsabs=1e-14)
    return val


def w1_shape(z_max: float = 12.0, n: int = 481, tol: float = 1e-8, decay_rate: float = 1.0) -> W1Shape:
    """Tabulate B on [−z_max, z_max] after asserting the solvability condition.

    Raises
    ------
    QuadratureFailure
        If the solvability integral exceeds ``tol`` or the quadrature fails.
    """
    if z_max < 10 or tol > 1e-8:
        raise ValueError("need z_max ≥ 10 and tol ≤ 1e−8")
    sol = solvability_integral()
    if abs(sol) > tol:
        raise QuadratureFailure(f"solvability integral {sol:.3e} is not zero")
    z = np.linspace(-z_max, z_max, n)
    shape = W1Shape(z, np.zeros(n), 4.0, decay_rate, 0.0)
    shape.B = shape(z)
    shape.decay_const = float(np.max(np.abs(shape.B) * np.exp(decay_rate * np.abs(z))))
    shape.meta = dict(quadrature="gauss-legendre-64", split=4.0, solvability=sol, z_max=z_max)
    return shape


def c0_quadrature() -> float:
    """∫ w′² dz̄ by adaptive quadrature (closed form 2√2/3)."""
    val, _ = quad(lambda z: Heteroclinic.dw(z) ** 2, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
    return val


def c1_quadrature() -> float:
    """∫ z̄² w′² dz̄ by adaptive quadrature."""
    val, _ = quad(lambda z: z * z * Heteroclinic.dw(z) ** 2, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
    return val


def cross_constant() -> float:
    """c_B = ∫ B′ w′ dz̄ = √2 ∫ B w w′ dz̄."""
    shape = W1Shape(np.zeros(1), np.zeros(1), 4.0, 1.0, 0.0)
    x, wts = np.polynomial.legendre.leggauss(128)
    z = 14.0 * x
    return float(14.0 * np.sum(wts * shape(z, 1) * Heteroclinic.dw(z)))


# --- ansatz field -------------------------------------------------------------

def cutoff(s):
    """C^∞ χ with χ = 1 on [−1, 1] and χ = 0 outside [−2, 2]."""
    x = np.clip(2 - np.abs(np.asarray(s, dtype=float)), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1 - x, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class AnsatzParams:
    alpha: float
    theta0: float = 0.25
    delta: float = 0.05
    h: float = 0.0  # constant normal shift h_α

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 4 * self.delta < self.theta0:
            raise ValueError("need 4δ < θ₀")


class AnsatzField:
    """𝚠 (optionally + 𝚠₁) around Γ_α for a surface given in original coordinates."""

    def __init__(self, params: AnsatzParams, surface: Surface, with_w1: bool = False,
                 shape: W1Shape | None = None):
        self.params = params
        self.base = surface
        self.surface = Scaled(surface, params.alpha)
        self.with_w1 = with_w1
        self.shape = shape if shape is not None or not with_w1 else w1_shape()

    def r_alpha(self, yu, yv):
        a = self.params.alpha
        return np.sqrt(1 + a * a * (yu * yu + yv * yv))

    def fermi(self, x) -> FermiCoords:
        return fermi_project(x, self.surface, check_collar=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        fc = self.fermi(x)
        p = self.params
        ra = self.r_alpha(fc.u, fc.v)
        zeta = -fc.z
        chi = cutoff(4 * p.alpha * zeta / (p.theta0 * ra))
        zb = zeta - p.h
        core = Heteroclinic.w(zb)
        if self.with_w1:
            spec = curvature_spectrum(self.surface, fc.u, fc.v)
            core = core + spec.A_sq * self.shape(zb)
        sign = np.where(zeta < 0, -1.0, 1.0)
        return chi * (core - sign) + sign

    def point(self, yu, yv, zbar):
        """Ambient point (u, v, x₉) with footprint (yu, yv) and upward distance ζ = z̄ + h."""
        j = self.surface.derivs(yu, yv)
        Fu, Fv = j.d[..., 0], j.d[..., 1]
        W = np.sqrt(1 + Fu * Fu + Fv * Fv)
        zeta = np.asarray(zbar, dtype=float) + self.params.h
        return np.stack([yu - zeta * Fu / W, yv - zeta * Fv / W, j.val + zeta / W], axis=-1)


def build_ansatz(params: AnsatzParams, surface: Surface, with_w1: bool = False) -> AnsatzField:
    return AnsatzField(params, surface, with_w1)


# --- residuals ----------------------------------------------------------------

@dataclass
class ResidualReport:
    alpha: float
    with_w1: bool
    footprints: np.ndarray  # scaled (u, v)
    zbar: np.ndarray
    S: np.ndarray  # (n_foot, n_z)
    norms: dict  # (ν, σ) → weighted sup norm

    def norm(self, nu: float, sigma: float) -> float:
        return self.norms[(nu, sigma)]


_D2 = np.array([-1, 16, -30, 16, -1]) / 12.0
_D1 = np.array([1, -8, 0, 8, -1]) / 12.0


def laplacian_fd(fn, x, h: float = 2e-2):
    """Fourth-order finite-difference reduced Laplacian of ``fn`` at points x (…, 3)."""
    x = np.asarray(x, dtype=float)
    if np.any(x[..., 0] <= 4 * h) or np.any(x[..., 1] <= 4 * h):
        raise StencilOutOfDomain("stencil reaches the block axes u = 0 or v = 0")
    offs = np.arange(-2, 3)
    pts = [x]
    for k in range(3):
        for o in offs:
            if o == 0:
                continue
            e = np.zeros(3)
            e[k] = o * h
            pts.append(x + e)
    vals = fn(np.stack(pts, axis=0))
    f0 = vals[0]
    lap = np.zeros_like(f0)
    grads = []
    i = 1
    for k in range(3):
        stencil = []
        for o in offs:
            if o == 0:
                stencil.append(f0)
            else:
                stencil.append(vals[i])
                i += 1
        lap = lap + sum(c * s for c, s in zip(_D2, stencil)) / h ** 2
        grads.append(sum(c * s for c, s in zip(_D1, stencil)) / h)
    lap = lap + 3 * grads[0] / x[..., 0] + 3 * grads[1] / x[..., 1]
    return lap, f0


def default_collar(alpha: float, theta0: float, r_alpha) -> np.ndarray:
    return np.minimum(8.0, theta0 * r_alpha / (2 * alpha))


def residual(field_: AnsatzField, footprints_orig, n_z: int = 33, h_fd: float = 2e-2,
             weights=((3.0, 1.0), (2.0, 0.5))) -> ResidualReport:
    """S = −Δ𝚠 − f(𝚠) by fourth-order finite differences on a footprint × z̄ sample set.

    Parameters
    ----------
    footprints_orig : array (n, 2)
        Footprints (u, v) on the original graph Γ; they are mapped to Γ_α by y = x/α.
    weights : sequence of (ν, σ)
        Weighted sup norms sup e^{σ|z̄|} r_α^ν |S| to report.
    """
    p = field_.params
    fo = np.asarray(footprints_orig, dtype=float)
    y = fo / p.alpha
    ra = field_.r_alpha(y[:, 0], y[:, 1])
    Z = default_collar(p.alpha, p.theta0, ra)
    t = np.linspace(-1.0, 1.0, n_z)
    zbar = Z[:, None] * t[None, :]
    yu = np.repeat(y[:, 0:1], n_z, axis=1)
    yv = np.repeat(y[:, 1:2], n_z, axis=1)
    x = field_.point(yu, yv, zbar)
    lap, val = laplacian_fd(field_, x, h_fd)
    S = -lap - f(val)
    norms = {}
    for nu, sg in weights:
        norms[(nu, sg)] = float(np.max(np.exp(sg * np.abs(zbar)) * ra[:, None] ** nu * np.abs(S)))
    return ResidualReport(p.alpha, field_.with_w1, y, zbar, S, norms)


def residual_fermi(field_: AnsatzField, yu, yv, zbar) -> np.ndarray:
    """S inside the plateau χ ≡ 1 from the exact Fermi form of the Laplacian.

    Uses Δ = ∂_ζζ − (Σκᵢ/(1 − ζκᵢ))∂_ζ + Δ_{Γ_ζ}; the tangential part acts
    only on |A_α(y)|² in 𝚠₁ and is dropped (it is O(α⁴) and odd in z̄).
    """
    p = field_.params
    spec = curvature_spectrum(field_.surface, yu, yv)
    zbar = np.asarray(zbar, dtype=float)
    zeta = zbar + p.h
    k = spec.kappas
    dz = -np.sum(k / (1 - zeta[..., None] * k), axis=-1)
    u = Heteroclinic.w(zbar)
    u1 = Heteroclinic.dw(zbar)
    u2 = Heteroclinic.ddw(zbar)
    if field_.with_w1:
        B = field_.shape
        u = u + spec.A_sq * B(zbar)
        u1 = u1 + spec.A_sq * B(zbar, 1)
        u2 = u2 + spec.A_sq * B(zbar, 2)
    return -(u2 + dz * u1) - f(u)


@dataclass
class ProjectionResult:
    value: float
    reference: float  # c₁Σκ_α³
    h_term: float  # c₀H_α (+ c_B H_α|A_α|²)
    ratio: float


def project_residual(field_: AnsatzField, footprint_orig, n_quad: int = 96, method: str = "fermi",
                     h_fd: float = 2e-2) -> ProjectionResult:
    """∫ S[𝚠 (+𝚠₁)](y, z̄) w′(z̄) dz̄ over the collar by Gauss–Legendre quadrature.

    The leading-order identity is ∫ S w′ ≈ c₀H_α + c₁Σκ_α³, plus
    c_B H_α|A_α|² when 𝚠₁ is included (c_B = ∫B′w′).  ``ratio`` is
    (value − h_term)/(c₁Σκ_α³) with h_term collecting the H_α terms.
    """
    p = field_.params
    fo = np.asarray(footprint_orig, dtype=float)
    yu, yv = fo[0] / p.alpha, fo[1] / p.alpha
    ra = float(field_.r_alpha(yu, yv))
    Z = min(8.0, p.theta0 * ra / (4 * p.alpha))
    xg, wg = np.polynomial.legendre.leggauss(n_quad)
    zbar = Z * xg
    if method == "fermi":
        S = residual_fermi(field_, np.full_like(zbar, yu), np.full_like(zbar, yv), zbar)
    elif method == "fd":
        x = field_.point(np.full_like(zbar, yu), np.full_like(zbar, yv), zbar)
        lap, val = laplacian_fd(field_, x, h_fd)
        S = -lap - f(val)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(S)):
        raise QuadratureFailure("non-finite residual in projection")
    value = float(Z * np.sum(wg * S * Heteroclinic.dw(zbar)))
    spec = curvature_spectrum(field_.surface, np.array(yu), np.array(yv))
    ref = float(C1_EXACT * spec.sum_cubes)
    hterm = float(C0_EXACT * spec.H)
    if field_.with_w1:
        hterm += float(spec.H * spec.A_sq * cross_constant())
    ratio = (value - hterm) / ref if ref != 0 else float("nan")
    return ProjectionResult(value, ref, hterm, ratio)


def scaling_slope(alphas, norms) -> float:
    """Least-squares slope of log(norm) against log(α)."""
    return float(np.polyfit(np.log(np.asarray(alphas)), np.log(np.asarray(norms)), 1)[0])
