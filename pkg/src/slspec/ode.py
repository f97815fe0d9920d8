"""Fundamental system of u'' = (q(x) - lambda) u on [0, pi] for complex lambda.

c(x, mu) and s(x, mu) are the solutions with c(0) = s'(0) = 1, c'(0) = s(0) = 0,
lambda = mu^2.  This module integrates them (together with variational
equations for lambda-derivatives) using an adaptive Dormand-Prince 5(4) pair
that is vectorized over a whole batch of mu values: all systems share the
step sequence, the controller keying on the worst member of the batch.

Solutions grow like exp(|Im mu| x), so the integrated variables are the
rescaled pair

    w = exp(-sigma x) u,     v = exp(-sigma x) u' / omega,

with sigma = |Im mu| and omega = max(1, |mu|); the true values are recovered
at the output points.  That keeps every state component O(1) regardless of
how far mu sits from the real axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationFailureError, InvalidInputError
from .potential import PI, Potential

MU_CAP = 500.0
TOL_MIN, TOL_MAX = 1e-13, 1e-4
DEFAULT_TOL = 1e-10

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    None,
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B5 - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                     -92097 / 339200, 187 / 2100, 1 / 40])

_MAX_STEPS = 500_000
_MIN_STEP = 1e-13


def adaptive_rk(f, y0, x_pts, rtol, atol, h0=None):
    """Integrate y' = f(x, y) from 0 through the sorted points x_pts.

    y0 is a complex array of shape (n_state, batch); the error controller
    takes the max over the batch of the per-system RMS error ratio.  Returns
    an array of shape (len(x_pts),) + y0.shape with the state at each output
    point.  Steps land exactly on output points.
    """
    x_pts = np.asarray(x_pts, dtype=float)
    if np.any(np.diff(x_pts) < 0) or (len(x_pts) and x_pts[0] < 0):
        raise InvalidInputError("output points must be sorted and nonnegative")
    y0 = np.asarray(y0)
    dtype = y0.dtype if np.issubdtype(y0.dtype, np.complexfloating) else np.complex128
    y = np.array(y0, dtype=dtype)
    out = np.empty((len(x_pts),) + y.shape, dtype=dtype)
    x = 0.0
    idx = 0
    while idx < len(x_pts) and x_pts[idx] <= x + 1e-15:
        out[idx] = y
        idx += 1
    if idx >= len(x_pts):
        return out
    x_end = float(x_pts[-1])
    h = h0 if h0 is not None else min(0.1, (x_end or 1.0) / 10.0)
    k = [None] * 7
    k[0] = f(x, y)
    nsteps = 0
    while idx < len(x_pts):
        if nsteps > _MAX_STEPS:
            raise IntegrationFailureError("step budget exhausted", x_reached=x)
        nsteps += 1
        h = min(h, x_pts[idx] - x)
        if h < _MIN_STEP:
            raise IntegrationFailureError("step size underflow", x_reached=x)
        for i in range(1, 7):
            yi = y + h * sum(a * ki for a, ki in zip(_A[i], k))
            k[i] = f(x + _C[i] * h, yi)
        y_new = y + h * sum(b * ki for b, ki in zip(_B5, k) if b)
        err_vec = h * sum(e * ki for e, ki in zip(_E, k) if e)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratios = np.abs(err_vec) / scale
        err = float(np.max(np.sqrt(np.mean(ratios * ratios, axis=0)))) if ratios.size else 0.0
        if err <= 1.0:
            x_new = x + h
            y = y_new
            x = x_new
            k[0] = k[6]  # FSAL
            while idx < len(x_pts) and x_pts[idx] <= x + 1e-12:
                out[idx] = y
                idx += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = h * fac
        else:
            # rejected: (x, y) unchanged, k[0] still valid
            h = h * max(0.2, 0.9 * err ** -0.2)
    return out


@dataclass(frozen=True)
class FundamentalValues:
    """(c, c', s, s') at x = pi for one mu, with optional lambda-derivatives.

    dlambda[j-1] holds the quadruple differentiated j times with respect to
    lambda = mu^2.
    """

    mu: complex
    c_pi: complex
    cp_pi: complex
    s_pi: complex
    sp_pi: complex
    dlambda: tuple = ()

    def wronskian(self) -> complex:
        return self.c_pi * self.sp_pi - self.cp_pi * self.s_pi

    def quadruple(self):
        return (self.c_pi, self.cp_pi, self.s_pi, self.sp_pi)


@dataclass(frozen=True)
class SolutionTrace:
    """One solution sampled on a grid: u and u' as complex arrays."""

    lam: complex
    grid: np.ndarray
    u: np.ndarray
    up: np.ndarray
    flag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex))
        object.__setattr__(self, "up", np.asarray(self.up, dtype=complex))
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.up))):
            raise InvalidInputError("solution trace contains non-finite values")

    def endpoint_data(self):
        """(u(0), u'(0), u(pi), u'(pi))."""
        return self.u[0], self.up[0], self.u[-1], self.up[-1]


def _validate_mu_tol(mu, tol, mu_cap):
    if not TOL_MIN <= tol <= TOL_MAX:
        raise InvalidInputError(f"tol must lie in [{TOL_MIN}, {TOL_MAX}]")
    if abs(mu) > mu_cap:
        raise InvalidInputError(f"|mu| = {abs(mu):.3g} exceeds the cap {mu_cap}")
    if abs(mu.imag) * PI > 700.0:
        raise InvalidInputError("exp(|Im mu| pi) exceeds double range")


def _scaling(mus, dtype=np.complex128):
    mus = np.asarray(mus, dtype=dtype)
    lam = mus * mus
    sigma = np.abs(mus.imag)
    omega = np.maximum(1.0, np.abs(mus))
    return lam, sigma, omega


def _fundamental_rhs(qfn, lam, sigma, omega, m):
    """RHS for the scaled fundamental system with lambda-derivative orders 0..m."""
    jcoef = np.arange(m + 1, dtype=float)

    def f(x, y):
        q = qfn(x)
        Y = y.reshape(2, m + 1, 2, -1)
        W = Y[:, :, 0, :]
        V = Y[:, :, 1, :]
        dW = omega * V - sigma * W
        coup = (q - lam) * W
        if m:
            coup = coup - jcoef[None, :, None] * np.concatenate(
                (np.zeros_like(W[:, :1, :]), W[:, :-1, :]), axis=1)
        else:
            coup = coup
        dV = coup / omega - sigma * V
        return np.stack((dW, dV), axis=2).reshape(y.shape)

    return f


def _initial_state(m, batch, omega, dtype=np.complex128):
    y0 = np.zeros((2, m + 1, 2, batch), dtype=dtype)
    y0[0, 0, 0, :] = 1.0          # c: w(0) = 1
    y0[1, 0, 1, :] = 1.0 / omega  # s: v(0) = u'(0)/omega
    return y0.reshape(-1, batch)


def fundamental_at_pi_many(q: Potential, mus, m: int = 0,
                           tol: float = DEFAULT_TOL, mu_cap: float = MU_CAP,
                           dtype=np.complex128):
    """Batched fundamental values at pi; one shared adaptive integration.

    dtype=np.clongdouble switches the whole integration to extended
    precision, for callers whose output combination is cancellation-bound
    (the returned entries then stay extended-precision scalars).
    """
    mus = [complex(mu) for mu in mus]
    for mu in mus:
        _validate_mu_tol(mu, tol, mu_cap)
    if not mus:
        return []
    lam, sigma, omega = _scaling(mus, dtype)
    f = _fundamental_rhs(q.interpolant(), lam, sigma, omega, m)
    y0 = _initial_state(m, len(mus), omega, dtype)
    h0 = min(0.1, 0.5 / (1.0 + float(np.max(np.abs(mus)))))
    yout = adaptive_rk(f, y0, [PI], rtol=tol, atol=tol * 1e-2, h0=h0)[-1]
    Y = yout.reshape(2, m + 1, 2, -1)
    grow = np.exp(sigma * np.asarray(PI, dtype=sigma.dtype))
    vals = []
    for b, mu in enumerate(mus):
        g = grow[b]
        quads = [(Y[0, j, 0, b] * g, Y[0, j, 1, b] * g * omega[b],
                  Y[1, j, 0, b] * g, Y[1, j, 1, b] * g * omega[b])
                 for j in range(m + 1)]
        c, cp, s, sp = quads[0]
        vals.append(FundamentalValues(mu=mu, c_pi=c, cp_pi=cp, s_pi=s, sp_pi=sp,
                                      dlambda=tuple(quads[1:])))
    return vals


def fundamental_at_pi(q: Potential, mu, m: int = 0,
                      tol: float = DEFAULT_TOL, mu_cap: float = MU_CAP) -> FundamentalValues:
    """Fundamental values (c, c', s, s') at pi with m lambda-derivatives."""
    return fundamental_at_pi_many(q, [mu], m=m, tol=tol, mu_cap=mu_cap)[0]


def free_fundamental(mu) -> FundamentalValues:
    """Closed-form fundamental values for q = 0."""
    mu = complex(mu)
    c = cmath.cos(PI * mu)
    if abs(mu) < 1e-8:
        mu2 = mu * mu
        s = PI - PI ** 3 * mu2 / 6.0 + PI ** 5 * mu2 * mu2 / 120.0
    else:
        s = cmath.sin(PI * mu) / mu
    return FundamentalValues(mu=mu, c_pi=c, cp_pi=-mu * cmath.sin(PI * mu),
                             s_pi=s, sp_pi=c)


def fundamental_traces_many(q: Potential, mus, grid, m: int = 0,
                            tol: float = DEFAULT_TOL):
    """Batched traces of c, s (and lambda-derivatives up to order m) on a grid.

    Returns a list of (C, Cp, S, Sp) per mu, each of shape (m+1, len(grid)).
    Results are memoized on the potential, so repeated chain/dual
    constructions at the same eigenvalues reuse one integration.
    """
    grid = np.asarray(grid, dtype=float)
    gkey = hash(grid.tobytes())
    cache = q._cache.setdefault("traces", {})
    mus = [complex(mu) for mu in mus]
    missing = []
    for mu in mus:
        hit = cache.get((mu, tol, gkey))
        if hit is None or hit[0].shape[0] < m + 1:
            missing.append(mu)
    if missing:
        missing = sorted(set(missing), key=lambda z: (z.real, z.imag))
        for mu in missing:
            _validate_mu_tol(mu, tol, MU_CAP)
        lam, sigma, omega = _scaling(missing)
        f = _fundamental_rhs(q.interpolant(), lam, sigma, omega, m)
        y0 = _initial_state(m, len(missing), omega)
        h0 = min(0.1, 0.5 / (1.0 + float(np.max(np.abs(missing)))))
        yout = adaptive_rk(f, y0, grid, rtol=tol, atol=tol * 1e-2, h0=h0)
        Y = yout.reshape(len(grid), 2, m + 1, 2, len(missing))
        for b, mu in enumerate(missing):
            g = np.exp(sigma[b] * grid)
            C = (Y[:, 0, :, 0, b] * g[:, None]).T
            Cp = (Y[:, 0, :, 1, b] * g[:, None]).T * omega[b]
            S = (Y[:, 1, :, 0, b] * g[:, None]).T
            Sp = (Y[:, 1, :, 1, b] * g[:, None]).T * omega[b]
            cache[(mu, tol, gkey)] = (C, Cp, S, Sp)
    return [cache[(mu, tol, gkey)] for mu in mus]


def fundamental_traces(q: Potential, mu, grid, m: int = 0, tol: float = DEFAULT_TOL):
    """Traces of c, s (and lambda-derivative orders up to m) on a grid.

    Returns (C, Cp, S, Sp): arrays of shape (m + 1, len(grid)).
    """
    return fundamental_traces_many(q, [mu], grid, m=m, tol=tol)[0]


def solve_ivp(q: Potential, lam, u0, up0, grid=None, tol: float = DEFAULT_TOL) -> SolutionTrace:
    """Initial-value solve of u'' = (q - lambda) u, full trace returned."""
    lam = complex(lam)
    mu = complex(np.sqrt(complex(lam)))
    _validate_mu_tol(mu, tol, MU_CAP)
    if grid is None:
        grid = q.trace_grid()
    grid = np.asarray(grid, dtype=float)
    sigma = abs(mu.imag)
    omega = max(1.0, abs(mu))
    qfn = q.interpolant()

    def f(x, y):
        w, v = y[0], y[1]
        return np.stack((omega * v - sigma * w,
                         (qfn(x) - lam) * w / omega - sigma * v))

    y0 = np.array([[complex(u0)], [complex(up0) / omega]])
    yout = adaptive_rk(f, y0, grid, rtol=tol, atol=tol * 1e-2,
                       h0=min(0.1, 0.5 / (1.0 + abs(mu))))
    g = np.exp(sigma * grid)
    return SolutionTrace(lam=lam, grid=grid,
                         u=yout[:, 0, 0] * g, up=yout[:, 1, 0] * g * omega)


def _hermite_eval(rx, ru, rup, x):
    """Cubic Hermite interpolation of a trace (uses both u and u')."""
    i = min(max(int(np.searchsorted(rx, x)) - 1, 0), len(rx) - 2)
    h = rx[i + 1] - rx[i]
    t = (x - rx[i]) / h
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * ru[i] + (t3 - 2 * t2 + t) * h * rup[i]
            + (-2 * t3 + 3 * t2) * ru[i + 1] + (t3 - t2) * h * rup[i + 1])


def solve_inhomogeneous(q: Potential, lam, rhs: SolutionTrace, u0, up0,
                        grid=None, tol: float = DEFAULT_TOL) -> SolutionTrace:
    """Solve u'' - q u + lambda u = rhs(x) with given initial data.

    rhs is sampled; between its grid points it is evaluated by cubic
    Hermite interpolation of (u, u').  Note the sign convention: with
    L = d^2/dx^2 - q the equation reads L u + lambda u = rhs, i.e.
    u'' = (q - lambda) u + rhs.
    """
    lam = complex(lam)
    mu = complex(np.sqrt(complex(lam)))
    _validate_mu_tol(mu, tol, MU_CAP)
    if grid is None:
        grid = rhs.grid
    grid = np.asarray(grid, dtype=float)
    sigma = abs(mu.imag)
    omega = max(1.0, abs(mu))
    qfn = q.interpolant()
    rx, ru, rup = rhs.grid, rhs.u, rhs.up

    def f(x, y):
        w, v = y[0], y[1]
        gval = _hermite_eval(rx, ru, rup, x) * math.exp(-sigma * x)
        return np.stack((omega * v - sigma * w,
                         ((qfn(x) - lam) * w + gval) / omega - sigma * v))

    y0 = np.array([[complex(u0)], [complex(up0) / omega]])
    yout = adaptive_rk(f, y0, grid, rtol=tol, atol=tol * 1e-2,
                       h0=min(0.1, 0.5 / (1.0 + abs(mu))))
    g = np.exp(sigma * grid)
    return SolutionTrace(lam=lam, grid=grid,
                         u=yout[:, 0, 0] * g, up=yout[:, 1, 0] * g * omega)


def ode_residual(trace: SolutionTrace, q: Potential, rhs=None) -> float:
    """Max-norm residual estimate of u'' - q u + lambda u = rhs for a trace.

    Uses the integrated form over consecutive grid-point pairs (Simpson),
    which is robust for rough q: each cell mismatch is divided by the cell
    width, giving a local mean-residual estimate.
    """
    x, u, up = trace.grid, trace.u, trace.up
    n = len(x)
    if n < 5 or n % 2 == 0:
        raise InvalidInputError("residual check needs an odd trace grid of >= 5 points")
    qv = q.interpolant()(x)
    rv = np.interp(x, rhs.grid, rhs.u) if rhs is not None else 0.0
    integrand = (qv - trace.lam) * u + rv
    h = x[1] - x[0]
    i0 = np.arange(0, n - 2, 2)
    simp = h / 3.0 * (integrand[i0] + 4.0 * integrand[i0 + 1] + integrand[i0 + 2])
    res_up = up[i0 + 2] - up[i0] - simp
    simp_u = h / 3.0 * (up[i0] + 4.0 * up[i0 + 1] + up[i0 + 2])
    res_u = u[i0 + 2] - u[i0] - simp_u
    width = 2.0 * h
    return float(max(np.max(np.abs(res_up)), np.max(np.abs(res_u))) / width)


def wronskian_residual(q: Potential, mu, tol: float = DEFAULT_TOL, points: int = 17) -> float:
    """Max |c s' - c' s - 1| at interior points of [0, pi]."""
    grid = np.linspace(0.0, PI, points)
    C, Cp, S, Sp = fundamental_traces(q, mu, grid, m=0, tol=tol)
    w = C[0] * Sp[0] - Cp[0] * S[0]
    return float(np.max(np.abs(w - 1.0)))
