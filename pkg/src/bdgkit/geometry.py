"""Differential geometry of O(4)×O(4)-invariant graphs x₉ = F(u, v) in ℝ⁹.

Sign conventions: the unit normal is n = (∇F, −1)/W with W = √(1 + |∇F|²);
principal curvatures are the eigenvalues of W⁻¹ g⁻¹ Hess F (profile pair) and
F_u/(uW), F_v/(vW) (each with multiplicity 3), so that Σκᵢ = H[F] and a lower
spherical cap of radius ρ₀ has κᵢ = +1/ρ₀.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .chart import PolarPoint
from .curvature import Perturbation, uv_derivatives
from .errors import FocalDistanceExceeded, NonConvergence, OutsideCollar
from .jets import Jet
from .profile import AngularProfile

COLLAR_THETA = 0.3


class Surface(Protocol):
    def derivs(self, u, v) -> Jet:
        """Value, (u, v)-gradient and Hessian of F at the given footprints."""


def _jet(val, fu, fv, fuu, fuv, fvv) -> Jet:
    val = np.asarray(val, dtype=float)
    d = np.stack(np.broadcast_arrays(fu, fv), axis=-1).astype(float)
    dd = np.empty(val.shape + (2, 2))
    dd[..., 0, 0] = fuu
    dd[..., 0, 1] = dd[..., 1, 0] = fuv
    dd[..., 1, 1] = fvv
    return Jet(val, d, dd)


class Plane:
    """F ≡ 0."""

    def derivs(self, u, v):
        z = np.zeros(np.broadcast_shapes(np.shape(u), np.shape(v)))
        return _jet(z, z, z, z, z, z)


@dataclass(frozen=True)
class Sphere:
    """Lower cap F = ρ₀ − √(ρ₀² − u² − v²) of the round 8-sphere centred at (0, ρ₀)."""

    rho0: float

    def derivs(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        q = np.sqrt(self.rho0 ** 2 - u * u - v * v)
        return _jet(self.rho0 - q, u / q, v / q,
                    (q * q + u * u) / q ** 3, u * v / q ** 3, (q * q + v * v) / q ** 3)


@dataclass(frozen=True)
class QuadraticBump:
    """F = c (u² + v²) − d; handy smooth test graph."""

    c: float = 0.1
    d: float = 0.0

    def derivs(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        two = np.full(np.broadcast_shapes(u.shape, v.shape), 2 * self.c)
        return _jet(self.c * (u * u + v * v) - self.d, 2 * self.c * u, 2 * self.c * v,
                    two, 0 * two, two)


@dataclass(frozen=True)
class ProfileSurface:
    """F₀ + Aφ on the sector π/4 < θ < π/2 from exact profile derivatives."""

    profile: AngularProfile
    pert: Perturbation | None = None
    A: float = 0.0

    def derivs(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        p = PolarPoint(np.hypot(u, v), np.arctan2(v, u))
        return uv_derivatives(p, self.profile, self.pert, self.A)


@dataclass(frozen=True)
class BlockSymmetric:
    """Extension of a sector graph: even in u and v, odd under the swap u ↔ v."""

    base: Surface

    def derivs(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        su, sv = np.where(u < 0, -1.0, 1.0), np.where(v < 0, -1.0, 1.0)
        au, av = np.abs(u), np.abs(v)
        swap = au > av
        a = np.where(swap, av, au)
        b = np.where(swap, au, av)
        j = self.base.derivs(a, b)
        sg = np.where(swap, -1.0, 1.0)
        fa, fb = j.d[..., 0], j.d[..., 1]
        faa, fab, fbb = j.dd[..., 0, 0], j.dd[..., 0, 1], j.dd[..., 1, 1]
        fu = np.where(swap, fb, fa)
        fv = np.where(swap, fa, fb)
        fuu = np.where(swap, fbb, faa)
        fvv = np.where(swap, faa, fbb)
        return _jet(sg * j.val, sg * su * fu, sg * sv * fv, sg * fuu, sg * su * sv * fab, sg * fvv)


@dataclass(frozen=True)
class Scaled:
    """F_α(y) = α⁻¹ F(αy)."""

    base: Surface
    alpha: float

    def derivs(self, u, v):
        a = self.alpha
        j = self.base.derivs(a * np.asarray(u, dtype=float), a * np.asarray(v, dtype=float))
        return Jet(j.val / a, j.d, j.dd * a)


@dataclass(frozen=True)
class CurvatureSpectrum:
    kappa_profile: np.ndarray  # (..., 2)
    kappa_u: np.ndarray
    kappa_v: np.ndarray
    A_sq: np.ndarray
    sum_cubes: np.ndarray
    H: np.ndarray
    axis_limit: np.ndarray  # True where a rotational curvature used the axis limit

    @property
    def kappas(self) -> np.ndarray:
        """All eight principal curvatures (..., 8)."""
        ku = np.repeat(self.kappa_u[..., None], 3, axis=-1)
        kv = np.repeat(self.kappa_v[..., None], 3, axis=-1)
        return np.concatenate([self.kappa_profile, ku, kv], axis=-1)


def spectrum_from_jet(F: Jet, u, v) -> CurvatureSpectrum:
    """Principal curvatures from (u, v)-derivatives of F."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    Fu, Fv = F.d[..., 0], F.d[..., 1]
    Fuu, Fuv, Fvv = F.dd[..., 0, 0], F.dd[..., 0, 1], F.dd[..., 1, 1]
    W2 = 1 + Fu * Fu + Fv * Fv
    W = np.sqrt(W2)
    # eigenvalues of W⁻¹ g^{−1/2} Hess F g^{−1/2}; g^{−1/2} = I − (1 − 1/W) e eᵀ, e = ∇F/|∇F|
    gn = np.sqrt(Fu * Fu + Fv * Fv)
    safe = np.where(gn == 0, 1.0, gn)
    e1, e2 = np.where(gn == 0, 1.0, Fu / safe), np.where(gn == 0, 0.0, Fv / safe)
    c = 1 - 1 / W
    m11, m12, m22 = 1 - c * e1 * e1, -c * e1 * e2, 1 - c * e2 * e2
    # M = S H S with S symmetric
    h11 = m11 * Fuu + m12 * Fuv
    h12 = m11 * Fuv + m12 * Fvv
    h21 = m12 * Fuu + m22 * Fuv
    h22 = m12 * Fuv + m22 * Fvv
    a11 = (h11 * m11 + h12 * m12) / W
    a12 = (h11 * m12 + h12 * m22) / W
    a22 = (h21 * m12 + h22 * m22) / W
    mean = 0.5 * (a11 + a22)
    rad = np.hypot(0.5 * (a11 - a22), a12)
    k1, k2 = mean + rad, mean - rad
    on_u = u == 0
    on_v = v == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ku = np.where(on_u, Fuu / W, Fu / (u * W))
        kv = np.where(on_v, Fvv / W, Fv / (v * W))
    kp = np.stack([k1, k2], axis=-1)
    A_sq = k1 ** 2 + k2 ** 2 + 3 * ku ** 2 + 3 * kv ** 2
    cubes = k1 ** 3 + k2 ** 3 + 3 * ku ** 3 + 3 * kv ** 3
    H = k1 + k2 + 3 * ku + 3 * kv
    return CurvatureSpectrum(kp, ku, kv, A_sq, cubes, H, on_u | on_v)


def curvature_spectrum(surface: Surface, u, v) -> CurvatureSpectrum:
    return spectrum_from_jet(surface.derivs(u, v), u, v)


@dataclass(frozen=True)
class ZExpansion:
    H_z: np.ndarray
    linear_term: np.ndarray
    R_alpha: np.ndarray


def curvature_expansion_z(spec: CurvatureSpectrum, z) -> ZExpansion:
    """H_z = Σ κᵢ/(1 − zκᵢ) = H + z|A|² + z² ℛ, with ℛ = Σ κᵢ³/(1 − zκᵢ).

    Raises
    ------
    FocalDistanceExceeded
        If 1 − zκᵢ ≤ 0 for some i.
    """
    z = np.asarray(z, dtype=float)
    k = spec.kappas
    den = 1 - z[..., None] * k
    if np.any(den <= 0):
        raise FocalDistanceExceeded("offset reaches a focal point")
    H_z = np.sum(k / den, axis=-1)
    R = np.sum(k ** 3 / den, axis=-1)
    return ZExpansion(H_z, z * spec.A_sq, R)


@dataclass(frozen=True)
class FermiCoords:
    u: np.ndarray
    v: np.ndarray
    z: np.ndarray
    valid: np.ndarray
    dz_dx9: np.ndarray
    residual: np.ndarray


def fermi_project(x, surface: Surface, tol: float = 1e-12, max_iter: int = 50,
                  collar: float = COLLAR_THETA, check_collar: bool = True) -> FermiCoords:
    """Nearest-point projection of (u, v, x₉) onto the graph.

    Newton on (y, z) for x = (y, F(y)) + z n(y), n = (∇F, −1)/W, seeded at
    y = x′, z = 0.  The Jacobian is the frame (tangent vectors, n) corrected
    by z times the derivative of n, which stays well conditioned for steep
    graphs where Newton on the stationarity condition does not.

    Raises
    ------
    NonConvergence
        If Newton fails to converge.
    OutsideCollar
        If |z| |A(y)| > ``collar`` at some point (with ``check_collar``).
    """
    x = np.asarray(x, dtype=float)
    xu, xv, x9 = x[..., 0], x[..., 1], x[..., 2]
    yu, yv = xu.copy(), xv.copy()
    z = np.zeros_like(xu)
    scale = 1 + np.abs(xu) + np.abs(xv)
    polish = False
    for _ in range(max_iter):
        j = surface.derivs(yu, yv)
        Fu, Fv = j.d[..., 0], j.d[..., 1]
        Fuu, Fuv, Fvv = j.dd[..., 0, 0], j.dd[..., 0, 1], j.dd[..., 1, 1]
        W = np.sqrt(1 + Fu * Fu + Fv * Fv)
        res = np.stack([yu + z * Fu / W - xu, yv + z * Fv / W - xv, j.val - z / W - x9], axis=-1)
        # ∂_i W / W² and ∂_i (F_k / W)
        qu = (Fu * Fuu + Fv * Fuv) / W ** 3
        qv = (Fu * Fuv + Fv * Fvv) / W ** 3
        J = np.empty(xu.shape + (3, 3))
        J[..., 0, 0] = 1 + z * (Fuu / W - Fu * qu)
        J[..., 0, 1] = z * (Fuv / W - Fu * qv)
        J[..., 1, 0] = z * (Fuv / W - Fv * qu)
        J[..., 1, 1] = 1 + z * (Fvv / W - Fv * qv)
        J[..., 2, 0] = Fu + z * qu
        J[..., 2, 1] = Fv + z * qv
        J[..., 0, 2] = Fu / W
        J[..., 1, 2] = Fv / W
        J[..., 2, 2] = -1 / W
        step = np.linalg.solve(J, res[..., None])[..., 0]
        if not np.all(np.isfinite(step)):
            raise NonConvergence("Fermi projection produced a non-finite step")
        yu, yv, z = yu - step[..., 0], yv - step[..., 1], z - step[..., 2]
        if polish:
            break
        if np.all(np.abs(step[..., 0]) + np.abs(step[..., 1]) + np.abs(step[..., 2]) <= tol * scale):
            polish = True
    else:
        raise NonConvergence("Fermi projection did not converge")
    j = surface.derivs(yu, yv)
    Fu, Fv = j.d[..., 0], j.d[..., 1]
    W = np.sqrt(1 + Fu * Fu + Fv * Fv)
    z = (Fu * (xu - yu) + Fv * (xv - yv) - (x9 - j.val)) / W
    rec = np.stack([yu + z * Fu / W - xu, yv + z * Fv / W - xv, j.val - z / W - x9], axis=-1)
    res = np.linalg.norm(rec, axis=-1)
    spec = spectrum_from_jet(j, yu, yv)
    with np.errstate(divide="ignore"):
        bound = collar / np.sqrt(spec.A_sq)
    valid = np.abs(z) <= bound
    if check_collar and not np.all(valid):
        raise OutsideCollar("projected point lies outside the Fermi collar")
    return FermiCoords(yu, yv, z, valid, -1.0 / W, res)
