"""Angular profile g(θ) of the homogeneous cubic F₀ = r³ g(θ).

The profile solves the singular boundary-value problem

    φ' + 7 + 6 cot(2θ) tan φ = 0,   φ(π/4) = π/2,   φ(π/2) = 0,

on [π/4, π/2], with ψ = g_θ/g = 3 tan φ and g(π/2) = 1.

Near θ = π/2 the regular solution is an odd series in x = π/2 − θ with no free
parameter.  Near θ = π/4 the quantity ε = π/2 − φ expands in powers of
w = y^{1/3}, y = θ − π/4, with one free coefficient ``a``:

    ε = 3y (1 + a w − 4a² w² + 18a³ w³ + ...),
    log g = log y + K − 3a w + 7.5 a² w² − 27 a³ w³ + ...

The two branches are integrated in their local variables and matched at
θ = 3π/8 by bisection on ``a``; ``K`` follows from matching log g.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import NonConvergence, QuadratureFailure, SingularBlowup

QUARTER = np.pi / 4
HALF = np.pi / 2
THETA_MATCH = 3 * np.pi / 8

# collar widths for the local series (see the decisions ledger)
Y_COLLAR = 1e-8
X_COLLAR = 1e-5
TAN_GUARD = 1e12
OVERLAP = 0.02  # each branch runs this far past the match point


class ProfileValues(NamedTuple):
    """Profile quantities at a batch of angles."""

    eps: np.ndarray    # π/2 − φ
    phi: np.ndarray
    dphi: np.ndarray
    ddphi: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray


def _tanc_m1(z):
    """tan(z)/z − 1 without cancellation."""
    z = np.asarray(z, dtype=float)
    z2 = z * z
    small = np.abs(z) < 1e-2
    ser = z2 / 3 + 2 * z2 ** 2 / 15 + 17 * z2 ** 3 / 315
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.tan(z) / np.where(small, 1.0, z) - 1.0
    return np.where(small, ser, direct)


def _xcot_m1(z):
    """z·cot(z) − 1 without cancellation."""
    z = np.asarray(z, dtype=float)
    z2 = z * z
    small = np.abs(z) < 1e-2
    ser = -z2 / 3 - z2 ** 2 / 45 - 2 * z2 ** 3 / 945
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.where(small, 1.0, z) / np.tan(np.where(small, 1.0, z)) - 1.0
    return np.where(small, ser, direct)


def _wall_rhs(w, state):
    # w = y^{1/3}; u = ε/(3y) − 1 and M = log g − log y are smooth in w
    u = state[0]
    y = w ** 3
    eps = 3 * y * (1 + u)
    tm1 = _tanc_m1(2 * y)
    cm1 = _xcot_m1(eps)
    one_minus_TC = -tm1 - cm1 - tm1 * cm1
    du = (u * (1 - 3 * u) + 4 * one_minus_TC) / ((1 + u) * w)
    dM = 3.0 * (cm1 - u) / ((1 + u) * w)
    return [du, dM]


def _axis_rhs(x, state):
    phi = state[0]
    tan = np.tan(phi)
    if abs(tan) > TAN_GUARD:
        raise SingularBlowup(f"tan(phi) overflow at x={x:.3e}")
    return [7.0 - 6.0 * tan / np.tan(2 * x), -3.0 * tan]


def _wall_u_series(w, a):
    return a * w - 4 * a * a * w * w + 18 * a ** 3 * w ** 3


def _wall_series(y, a):
    w = np.cbrt(y)
    eps = 3 * y * (1 + _wall_u_series(w, a))
    deps = 3 + 4 * a * w - 20 * a * a * w * w + 108 * a ** 3 * w ** 3
    with np.errstate(divide="ignore"):
        ddeps = (4 * a / 3) / (w * w) - (40 / 3) * a * a / w + 108 * a ** 3
    M = -3 * a * w + 7.5 * a * a * w * w - 27 * a ** 3 * w ** 3
    return eps, deps, ddeps, M


def _axis_series(x):
    phi = 1.75 * x + (35 / 128) * x ** 3
    dphi_x = 1.75 + (105 / 128) * x ** 2
    ddphi_x = (105 / 64) * x
    L = -(21 / 8) * x ** 2
    return phi, dphi_x, ddphi_x, L


_IVP = dict(method="DOP853", rtol=3e-14, atol=1e-16, dense_output=True)


def _eps_floor(w, state):
    return state[0] + 0.999


_eps_floor.terminal = True


def _integrate_wall(a, strict=True, rtol=None):
    """Shoot from the wall collar; ``None`` if ε collapses (undershoot).

    With ``rtol`` given, a cheap search-mode integration (wider collar, no
    dense output) is performed.
    """
    opts = dict(_IVP)
    y0 = Y_COLLAR
    if rtol is not None:
        opts.update(rtol=rtol, atol=rtol * 1e-2, dense_output=False)
        y0 = 1e-5
    w0 = np.cbrt(y0)
    M0 = _wall_series(y0, a)[3]
    y_end = THETA_MATCH - QUARTER + (0.0 if rtol is not None else OVERLAP)
    sol = solve_ivp(_wall_rhs, [w0, np.cbrt(y_end)], [_wall_u_series(w0, a), M0],
                    events=_eps_floor, **opts)
    if sol.status == 1 and not strict:
        return None
    if sol.status != 0:
        raise NonConvergence(f"wall branch failed: {sol.message}")
    return sol


Y_GUESS = 1e-3


def _integrate_axis():
    phi0, _, _, L0 = _axis_series(X_COLLAR)
    sol = solve_ivp(_axis_rhs, [X_COLLAR, QUARTER - Y_GUESS], [phi0, L0], **_IVP)
    if sol.status != 0:
        raise NonConvergence(f"axis branch failed: {sol.message}")
    return sol


@dataclass(frozen=True)
class AngularProfile:
    """Tabulated angular profile with a continuous evaluator.

    Attributes
    ----------
    nodes, phi, dphi, psi, g, dg : ndarray
        Node table on [π/4, π/2].  ``psi[0]`` is +inf (ψ blows up at the wall).
    a, K : float
        Free series coefficient at π/4 and the log-normalization of g there;
        ``dg[0] = exp(K)``.
    """

    nodes: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    psi: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    a: float
    K: float
    tol: float
    _wall: object = field(repr=False, compare=False)
    _axis: object = field(repr=False, compare=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def evaluate(self, theta) -> ProfileValues:
        """Evaluate φ, g and two derivatives at arbitrary θ ∈ [π/4, π/2]."""
        theta = np.asarray(theta, dtype=float)
        shape = theta.shape
        th = theta.ravel()
        out = {k: np.empty_like(th) for k in ProfileValues._fields}
        wall = th < THETA_MATCH
        if np.any(wall):
            self._eval_wall(th[wall] - QUARTER, out, wall)
        if np.any(~wall):
            self._eval_axis(HALF - th[~wall], out, ~wall)
        return ProfileValues(**{k: v.reshape(shape) for k, v in out.items()})

    def eps_near_wall(self, y):
        """ε = π/2 − φ at y = θ − π/4 given directly (no loss of relative accuracy)."""
        y = np.asarray(y, dtype=float)
        eps = np.empty_like(y)
        near = y < Y_COLLAR
        eps[near] = _wall_series(y[near], self.a)[0]
        yf = y[~near]
        eps[~near] = 3 * yf * (1 + self._wall(np.cbrt(yf))[0])
        return eps

    def phi_near_axis(self, x):
        """φ at x = π/2 − θ from the axis branch alone."""
        x = np.asarray(x, dtype=float)
        phi = np.empty_like(x)
        near = x < X_COLLAR
        phi[near] = _axis_series(x[near])[0]
        phi[~near] = self._axis(x[~near])[0]
        return phi

    def _eval_wall(self, y, out, mask):
        y = np.maximum(y, 0.0)
        eps = np.empty_like(y)
        deps = np.empty_like(y)
        ddeps = np.empty_like(y)
        M = np.empty_like(y)
        near = y < Y_COLLAR
        if np.any(near):
            eps[near], deps[near], ddeps[near], M[near] = _wall_series(y[near], self.a)
        far = ~near
        if np.any(far):
            yf = y[far]
            st = self._wall(np.cbrt(yf))
            eps[far], M[far] = 3 * yf * (1 + st[0]), st[1]
            cot = 1.0 / np.tan(eps[far])
            t2 = np.tan(2 * yf)
            deps[far] = 7.0 - 6.0 * t2 * cot
            csc2 = 1.0 + cot * cot
            ddeps[far] = -12.0 * (1 + t2 * t2) * cot + 6.0 * t2 * csc2 * deps[far]
        g = y * np.exp(M + self.K)
        with np.errstate(divide="ignore", invalid="ignore"):
            cot = np.where(eps > 0, 1.0 / np.tan(eps), np.inf)
            dg = np.where(y > 0, 3.0 * g * cot, np.exp(self.K))
            ddg = np.where(y > 0, 3.0 * dg * cot - 3.0 * g * (1 + cot * cot) * deps, -np.inf)
        out["eps"][mask] = eps
        out["phi"][mask] = HALF - eps
        out["dphi"][mask] = -deps
        out["ddphi"][mask] = -ddeps
        out["g"][mask] = g
        out["dg"][mask] = dg
        out["ddg"][mask] = ddg

    def _eval_axis(self, x, out, mask):
        x = np.maximum(x, 0.0)
        phi = np.empty_like(x)
        dphi_x = np.empty_like(x)
        ddphi_x = np.empty_like(x)
        L = np.empty_like(x)
        near = x < X_COLLAR
        if np.any(near):
            phi[near], dphi_x[near], ddphi_x[near], L[near] = _axis_series(x[near])
        far = ~near
        if np.any(far):
            xf = x[far]
            st = self._axis(xf)
            phi[far], L[far] = st[0], st[1]
            tan = np.tan(phi[far])
            cot2 = 1.0 / np.tan(2 * xf)
            dphi_x[far] = 7.0 - 6.0 * cot2 * tan
            ddphi_x[far] = (12.0 * (1 + cot2 * cot2) * tan
                            - 6.0 * cot2 * (1 + tan * tan) * dphi_x[far])
        g = np.exp(L)
        tan = np.tan(phi)
        dphi = -dphi_x
        dg = 3.0 * g * tan
        ddg = 3.0 * dg * tan + 3.0 * g * (1 + tan * tan) * dphi
        out["eps"][mask] = HALF - phi
        out["phi"][mask] = phi
        out["dphi"][mask] = dphi
        out["ddphi"][mask] = ddphi_x
        out["g"][mask] = g
        out["dg"][mask] = dg
        out["ddg"][mask] = ddg

    # reflected evaluation on the full quadrant θ ∈ [0, π]
    def g_extended(self, theta):
        """g on [0, π]: odd across π/4 (u↔v swap), even across π/2 (u → −u).

        Returns value, first and second θ-derivatives.
        """
        theta = np.asarray(theta, dtype=float)
        th = np.where(theta > HALF, np.pi - theta, theta)
        s1 = np.where(theta > HALF, -1.0, 1.0)
        low = th < QUARTER
        base = np.where(low, HALF - th, th)
        pv = self.evaluate(base)
        sg = np.where(low, -1.0, 1.0)
        s_d = np.where(low, -1.0, 1.0) * s1
        return sg * pv.g, sg * s_d * pv.dg, sg * pv.ddg

    def invariants(self) -> dict:
        """Margins of the properties the profile must satisfy (≥ 0 means satisfied)."""
        th = self.nodes[1:-1]
        y = th - QUARTER
        x = HALF - th
        # −tan(2θ), computed from the nearer endpoint to avoid cancellation
        mtan = np.where(y < x, 1.0 / np.tan(2 * y), np.tan(2 * x))
        psi = self.psi[1:-1]
        lower = psi - 2 * mtan
        upper = 11 * mtan - psi
        pv = self.evaluate(th)
        negcos = np.where(y < x, np.sin(2 * y), np.cos(2 * x))  # −cos(2θ)
        C = float(np.min(self.g[1:-1] / negcos))  # largest C with −C cos2θ ≤ g
        tan_psi = np.max(np.abs(np.tan(self.phi[1:-1]) - psi / 3)
                         / np.maximum(1.0, np.abs(psi)))
        return {
            "phi_wall_err": float(abs(self.phi[0] - HALF)),
            "phi_axis_err": float(abs(self.phi[-1])),
            "dphi_wall_err": float(abs(self.dphi[0] + 3)),
            "dphi_axis_err": float(abs(self.dphi[-1] + 1.75)),
            "dphi_min_margin": float(np.min(self.dphi[1:-1] + 3)),
            "riccati_lower_margin": float(np.min(lower)),
            "riccati_lower_violations": int(np.sum(lower < 0)),
            "riccati_upper_margin": float(np.min(upper)),
            "riccati_upper_violations": int(np.sum(upper <= 0)),
            "g_min": float(np.min(self.g)),
            "dg_min_interior": float(np.min(self.dg[:-1])),
            "ddg_max": float(np.max(pv.ddg)),
            "upper_cos_margin": float(np.min(negcos - self.g[1:-1])),
            "fitted_C": C,
            "lower_cos_margin": float(np.min(self.g[1:-1] - C * negcos)),
            "tan_psi_consistency": float(tan_psi),
            "g_axis": float(self.g[-1]),
            "g_wall": float(self.g[0]),
            "dg_wall": float(self.dg[0]),
            "ode_residual_g": ode_residual_g(self),
        }


def _guess_a(axis_sol):
    """Invert the wall series for ``a`` at y = Y_GUESS using the axis branch."""
    eps = HALF - axis_sol.sol(QUARTER - Y_GUESS)[0]
    w = np.cbrt(Y_GUESS)
    try:
        return brentq(lambda a: _wall_series(Y_GUESS, a)[0] - eps, -0.6, 0.3, xtol=1e-14)
    except ValueError as exc:
        raise NonConvergence("no wall-series coefficient reproduces the axis branch") from exc


def _match_axis_state():
    sol = _integrate_axis()
    return sol, sol.sol(HALF - THETA_MATCH)


def solve_phi(n_nodes: int = 512, tol: float = 1e-10) -> AngularProfile:
    """Solve the angular ODE and tabulate the profile on ``n_nodes`` nodes.

    Parameters
    ----------
    n_nodes : int
        Number of equispaced nodes on [π/4, π/2], at least 64.
    tol : float
        ODE residual tolerance at interior nodes, at most 1e-6.

    Returns
    -------
    AngularProfile

    Raises
    ------
    NonConvergence
        If the two branches cannot be matched.
    SingularBlowup
        If tan φ overflows on the axis branch.
    """
    if n_nodes < 64:
        raise ValueError("n_nodes must be at least 64")
    if not (0 < tol <= 1e-6):
        raise ValueError("tol must lie in (0, 1e-6]")
    axis_sol, axis_state = _match_axis_state()
    target = HALF - axis_state[0]

    def mismatch(a):
        sol = _integrate_wall(a, strict=False)
        if sol is None:
            return -1.0
        y_m = THETA_MATCH - QUARTER
        return 3 * y_m * (1 + sol.sol(np.cbrt(y_m))[0]) - target

    # first guess for ``a`` from the axis branch continued toward the wall
    a0 = _guess_a(axis_sol)
    a1 = a0 + 1e-4
    f0, f1 = mismatch(a0), mismatch(a1)
    for _ in range(12):
        if f1 == f0 or abs(f1) <= 0.01 * tol:
            break
        a0, a1, f0 = a1, a1 - f1 * (a1 - a0) / (f1 - f0), f1
        f1 = mismatch(a1)
    a = a1
    wall_sol = _integrate_wall(a)
    y_m = THETA_MATCH - QUARTER
    M_m = wall_sol.sol(np.cbrt(y_m))[1]
    K = float(axis_state[1] - np.log(y_m) - M_m)
    gap = abs(f1)
    if gap > tol:
        raise NonConvergence(f"matching gap {gap:.2e} exceeds tol")

    nodes = np.linspace(QUARTER, HALF, n_nodes)
    proto = AngularProfile(nodes=nodes, phi=np.empty(0), dphi=np.empty(0), psi=np.empty(0),
                           g=np.empty(0), dg=np.empty(0), a=float(a), K=K, tol=tol,
                           _wall=wall_sol.sol, _axis=axis_sol.sol)
    pv = proto.evaluate(nodes)
    phi = pv.phi.copy()
    phi[0], phi[-1] = HALF, 0.0
    dphi = pv.dphi.copy()
    dphi[0], dphi[-1] = -3.0, -1.75
    with np.errstate(divide="ignore"):
        psi = np.where(pv.eps > 0, 3.0 / np.tan(pv.eps), np.inf)
    psi[-1] = 0.0
    prof = replace(proto, phi=phi, dphi=dphi, psi=psi)
    res = phi_residual(prof)
    if res > tol:
        raise NonConvergence(f"ODE residual {res:.2e} exceeds tol {tol:.1e}")
    return g_from_psi(prof)


def phi_residual(profile: AngularProfile) -> float:
    """Max interior residual of the φ-equation from finite differences of the solution.

    Wall-branch nodes are differenced in w = (θ − π/4)^{1/3}, where ε is smooth;
    axis-branch nodes in θ directly.
    """
    th = profile.nodes[1:-1]
    res = []
    wall = th < THETA_MATCH
    c = np.array([1, -8, 0, 8, -1]) / 12.0
    if np.any(wall):
        w = np.cbrt(th[wall] - QUARTER)
        hw = 1e-3 * w
        vals = [profile.eps_near_wall((w + k * hw) ** 3) for k in (-2, -1, 0, 1, 2)]
        deps_dw = sum(ck * v for ck, v in zip(c, vals)) / hw
        deps = deps_dw / (3 * w * w)
        y = th[wall] - QUARTER
        r = deps - 7.0 + 6.0 * np.tan(2 * y) / np.tan(vals[2])
        res.append(np.abs(r))
    if np.any(~wall):
        x = HALF - th[~wall]
        h = np.minimum(0.01 * x, 5e-4)
        vals = [profile.phi_near_axis(x + k * h) for k in (-2, -1, 0, 1, 2)]
        dphi_x = sum(ck * v for ck, v in zip(c, vals)) / h
        r = dphi_x - 7.0 + 6.0 * np.tan(vals[2]) / np.tan(2 * x)
        res.append(np.abs(r))
    return float(np.max(np.concatenate(res)))


_GL10 = np.polynomial.legendre.leggauss(10)
_GL20 = np.polynomial.legendre.leggauss(20)


def cellwise_quad(f, lo, hi, tol=1e-14, max_depth=12):
    """Integrate a vectorized ``f`` over each cell [lo_i, hi_i].

    Gauss–Legendre 10/20-point pairs give an error estimate; cells above
    ``tol`` are bisected.  Raises QuadratureFailure past ``max_depth``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    total = np.zeros_like(lo)
    owner = np.arange(lo.size)
    for _ in range(max_depth):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        vals = []
        for x, w in (_GL10, _GL20):
            pts = mid[:, None] + half[:, None] * x[None, :]
            vals.append((f(pts.ravel()).reshape(pts.shape) @ w) * half)
        err = np.abs(vals[1] - vals[0])
        ok = err <= tol * np.maximum(1.0, np.abs(vals[1]))
        np.add.at(total, owner[ok], vals[1][ok])
        if np.all(ok):
            return total
        bad = ~ok
        lo, hi, owner = (np.concatenate([lo[bad], mid[bad]]),
                         np.concatenate([mid[bad], hi[bad]]),
                         np.concatenate([owner[bad], owner[bad]]))
    raise QuadratureFailure("adaptive Gauss–Legendre rule did not converge")


def _psi_minus_pole_w(profile, w):
    """(ψ − 1/y)·dy/dw on the wall branch with y = w³; finite at w = 0."""
    y = w ** 3
    out = np.empty_like(w)
    near = y < Y_COLLAR
    a = profile.a
    out[near] = -3 * a + 15 * a * a * w[near] - 81 * a ** 3 * w[near] ** 2
    far = ~near
    eps = profile.eps_near_wall(y[far])
    out[far] = (3.0 / np.tan(eps) - 1.0 / y[far]) * 3 * w[far] ** 2
    return out


def g_from_psi(profile: AngularProfile) -> AngularProfile:
    """Fill g and g_θ from ψ by g(θ) = exp(−∫_θ^{π/2} ψ).

    The pole ψ ~ 1/(θ − π/4) is subtracted analytically and the remaining
    integrable y^{-2/3} singularity is removed by the substitution y = w³.

    Raises
    ------
    QuadratureFailure
        If the adaptive rule does not reach its tolerance.
    """
    nodes = profile.nodes
    y_m = THETA_MATCH - QUARTER
    x_m = HALF - THETA_MATCH
    qtol = 1e-11

    # axis side: ∫_θ^{θm}... in x, cumulative from x=0
    ax = nodes >= THETA_MATCH
    xs = np.sort(np.concatenate([HALF - nodes[ax], [x_m]]))
    xs = np.unique(xs)
    lo, hi = xs[:-1], xs[1:]

    seg = cellwise_quad(lambda x: 3.0 * np.tan(profile.evaluate(HALF - x).phi), lo, hi, qtol)
    cum_axis = np.concatenate([[0.0], np.cumsum(seg)])  # ∫_0^{x} ψ dx at xs
    I_axis_m = cum_axis[-1]

    # wall side in w = y^{1/3}: ∫_y^{y_m} (ψ − 1/y) dy
    wl = (nodes < THETA_MATCH)
    ys = np.unique(np.concatenate([[0.0], nodes[wl] - QUARTER, [y_m]]))
    ws = np.cbrt(ys)
    wlo, whi = ws[:-1], ws[1:]

    segw = cellwise_quad(lambda w: _psi_minus_pole_w(profile, w), wlo, whi, qtol)
    tail = np.concatenate([np.cumsum(segw[::-1])[::-1], [0.0]])  # ∫_{y}^{y_m} at ys

    g = np.empty_like(nodes)
    x_nodes = HALF - nodes[ax]
    g[ax] = np.exp(-np.interp(x_nodes, xs, cum_axis))
    # exact lookup (interp hits nodes exactly since x_nodes ⊂ xs)
    y_nodes = nodes[wl] - QUARTER
    J = np.interp(y_nodes, ys, tail)
    g[wl] = (y_nodes / y_m) * np.exp(-J - I_axis_m)
    dg_wall = np.exp(-tail[0] - I_axis_m) / y_m
    with np.errstate(invalid="ignore"):
        dg = profile.psi * g
    dg[0] = dg_wall
    dg[-1] = 0.0
    g[-1] = 1.0
    return replace(profile, g=g, dg=dg)


def ode_residual_g(profile: AngularProfile, theta_min: float = QUARTER) -> float:
    """Max interior residual of the divergence-form g-equation by finite differences.

    Uses only the tabulated g: a centred second-order flux difference of
    sin³(2θ) g_θ / √(9g² + g_θ²) plus the zeroth-order term.
    """
    th = profile.nodes
    g = profile.g
    if not np.any(g):
        return 0.0
    h = np.diff(th)
    thh = 0.5 * (th[1:] + th[:-1])
    gh = 0.5 * (g[1:] + g[:-1])
    dgh = np.diff(g) / h
    S = np.sin(2 * thh) ** 3
    flux = S * dgh / np.sqrt(9 * gh ** 2 + dgh ** 2)
    i = np.arange(1, len(th) - 1)
    i = i[th[i] >= theta_min]
    dgn = (g[i + 1] - g[i - 1]) / (th[i + 1] - th[i - 1])
    Sn = np.sin(2 * th[i]) ** 3
    zeroth = 21 * Sn * g[i] / np.sqrt(9 * g[i] ** 2 + dgn ** 2)
    div = (flux[i] - flux[i - 1]) / (0.5 * (th[i + 1] - th[i - 1]))
    return float(np.max(np.abs(zeroth + div)))
