"""Complex-valued coefficient q(x) on [0, pi] and its symmetry diagnostics.

The potential is stored as grid samples plus optional structural metadata: a
closed-form tag (exactly zero, or polynomial coefficients) and explicitly
supplied endpoint derivatives.  The reflection diagnostics work with
Q(x) = q(x) - q(pi - x), whose vanishing controls the degenerate spectral
cases downstream.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidInputError, UnsupportedQueryError

PI = math.pi

MIN_SAMPLES = 16


@dataclass(frozen=True)
class Potential:
    """Sampled coefficient q on [0, pi].

    Attributes:
        x: strictly increasing abscissae, x[0] = 0, x[-1] = pi.
        values: complex samples q(x_i).
        grid_kind: "uniform" or "explicit".
        closed_form: None (tabulated), "zero", or a tuple of polynomial
            coefficients (c0, c1, ...) meaning q(x) = sum c_k x^k.
        endpoint_derivs: mapping order k -> (q^(k)(0), q^(k)(pi)).
    """

    x: np.ndarray
    values: np.ndarray
    grid_kind: str = "explicit"
    closed_form: object = None
    endpoint_derivs: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or v.shape != x.shape:
            raise InvalidInputError("grid and values must be 1-d arrays of equal length")
        if len(x) < MIN_SAMPLES:
            raise InvalidInputError(f"potential grid needs >= {MIN_SAMPLES} samples, got {len(x)}")
        if np.any(np.diff(x) <= 0):
            raise InvalidInputError("grid abscissae must be strictly increasing")
        if abs(x[0]) > 1e-12 or abs(x[-1] - PI) > 1e-12:
            raise InvalidInputError("grid must start at 0 and end at pi")
        if self.closed_form == "zero" and np.any(v != 0):
            raise InvalidInputError("closed_form 'zero' requires all samples exactly 0")
        if self.grid_kind not in ("uniform", "explicit"):
            raise InvalidInputError(f"unknown grid_kind {self.grid_kind!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_cache", {})

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int = 129) -> "Potential":
        x = np.linspace(0.0, PI, n)
        return cls(x, np.zeros(n, dtype=complex), grid_kind="uniform", closed_form="zero")

    @classmethod
    def from_callable(cls, f, n: int = 129, closed_form=None, endpoint_derivs=None) -> "Potential":
        x = np.linspace(0.0, PI, n)
        v = np.asarray([f(xi) for xi in x], dtype=complex)
        return cls(x, v, grid_kind="uniform", closed_form=closed_form,
                   endpoint_derivs=dict(endpoint_derivs or {}))

    @classmethod
    def from_poly(cls, coeffs, n: int = 129) -> "Potential":
        """Polynomial potential q(x) = sum coeffs[k] * x**k."""
        coeffs = tuple(complex(c) for c in coeffs)
        if all(c == 0 for c in coeffs):
            return cls.zero(n)
        x = np.linspace(0.0, PI, n)
        v = np.polynomial.polynomial.polyval(x, np.asarray(coeffs)).astype(complex)
        return cls(x, v, grid_kind="uniform", closed_form=coeffs)

    @classmethod
    def from_json(cls, doc) -> "Potential":
        """Build from the documented JSON schema.

        {"grid": [x...], "values": [[re,im]...],
         "closed_form": "zero" | {"poly": [c0,...]} | null,
         "endpoint_derivs": [[k, [re,im], [re,im]] ...]}
        """
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        x = np.asarray(doc["grid"], dtype=float)
        vals = np.asarray([_c(v) for v in doc["values"]], dtype=complex)
        cf = doc.get("closed_form")
        if isinstance(cf, dict):
            cf = tuple(complex(c) if not isinstance(c, list) else _c(c) for c in cf["poly"])
        derivs = {}
        for item in doc.get("endpoint_derivs") or []:
            k, a, b = item
            derivs[int(k)] = (_c(a), _c(b))
        kind = "uniform" if _is_uniform(x) else "explicit"
        return cls(x, vals, grid_kind=kind, closed_form=cf, endpoint_derivs=derivs)

    @classmethod
    def from_csv(cls, path) -> "Potential":
        """Read columns x, re, im (header optional)."""
        xs, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                try:
                    xi = float(row[0])
                except ValueError:
                    continue  # header line
                re = float(row[1]) if len(row) > 1 else 0.0
                im = float(row[2]) if len(row) > 2 else 0.0
                xs.append(xi)
                vs.append(complex(re, im))
        x = np.asarray(xs)
        kind = "uniform" if _is_uniform(x) else "explicit"
        return cls(x, np.asarray(vs), grid_kind=kind)

    # -- derived views -----------------------------------------------------

    def interpolant(self):
        """Callable q(x) backed by monotone cubic interpolation of the samples."""
        if self.closed_form == "zero":
            return _zero_fn
        fn = self._cache.get("interp")
        if fn is None:
            p = PchipInterpolator(self.x, np.c_[self.values.real, self.values.imag])

            def fn(xq):
                out = p(xq)
                return out[..., 0] + 1j * out[..., 1]

            self._cache["interp"] = fn
        return fn

    def digest(self):
        """Hashable identity of the sampled data, used by value caches."""
        d = self._cache.get("digest")
        if d is None:
            d = hash((self.x.tobytes(), self.values.tobytes()))
            self._cache["digest"] = d
        return d

    def conjugate(self) -> "Potential":
        cf = self.closed_form
        if isinstance(cf, tuple):
            cf = tuple(np.conj(c) for c in cf)
        derivs = {k: (np.conj(a), np.conj(b)) for k, (a, b) in self.endpoint_derivs.items()}
        return Potential(self.x, np.conj(self.values), grid_kind=self.grid_kind,
                         closed_form=cf, endpoint_derivs=derivs)

    def scaled(self, c) -> "Potential":
        vals = c * self.values
        cf = self.closed_form
        if np.all(vals == 0):
            cf = "zero"
        elif isinstance(cf, tuple):
            cf = tuple(c * ck for ck in cf)
        derivs = {k: (c * a, c * b) for k, (a, b) in self.endpoint_derivs.items()}
        return Potential(self.x, vals, grid_kind=self.grid_kind,
                         closed_form=cf, endpoint_derivs=derivs)

    def reflected(self) -> "Potential":
        """Potential x -> q(pi - x) on the reflected grid."""
        x = PI - self.x[::-1]
        x = x.copy()
        x[0], x[-1] = 0.0, PI
        return Potential(x, self.values[::-1].copy(), grid_kind=self.grid_kind)

    def trace_grid(self, min_points: int = 801) -> np.ndarray:
        """Uniform odd-count refinement of the sample grid for solution traces."""
        n = len(self.x) - 1
        if self.grid_kind == "uniform":
            k = max(1, int(math.ceil((min_points - 1) / n)))
            if (n * k) % 2:
                k += 1
            return np.linspace(0.0, PI, n * k + 1)
        m = max(min_points, 2 * n + 1)
        if m % 2 == 0:
            m += 1
        return np.linspace(0.0, PI, m)


def _c(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


def _is_uniform(x, rtol=1e-9):
    d = np.diff(x)
    return bool(np.all(np.abs(d - d[0]) <= rtol * d[0]))


def _zero_fn(xq):
    return np.zeros_like(np.asarray(xq, dtype=float), dtype=complex) if np.ndim(xq) else 0j


def _linear_interval_integral(x, y, a, b):
    """Exact integral of the piecewise-linear interpolant of (x, y) over [a, b]."""
    if b < a:
        raise InvalidInputError("integration bounds out of order")
    a = max(a, x[0])
    b = min(b, x[-1])
    if b <= a:
        return 0j
    cuts = x[(x > a) & (x < b)]
    pts = np.concatenate(([a], cuts, [b]))
    vals = np.interp(pts, x, y)
    return complex(np.sum((pts[1:] - pts[:-1]) * (vals[1:] + vals[:-1]) / 2.0))


def reflection_defect_samples(q: Potential) -> np.ndarray:
    """Q(x_i) = q(x_i) - q(pi - x_i) with linear interpolation at reflected points."""
    refl = np.interp(PI - q.x, q.x, q.values)
    return q.values - refl


def symmetry_defect(q: Potential, subdiv: int = 16):
    """L1 norm of Q(x) = q(x) - q(pi - x) plus the Q samples on the grid.

    The norm is a trapezoid quadrature of |Q| on the grid with every segment
    subdivided, so it is exact for symmetric grids (where Q vanishes nodewise)
    and accurate to roughly (h/subdiv)^2 otherwise.

    Returns:
        (defect_norm, Q_samples)
    """
    if len(q.x) < MIN_SAMPLES:
        raise InvalidInputError("grid too coarse to reflect")
    Q = reflection_defect_samples(q)
    # dense |Q| on subdivided segments; Q itself is evaluated through the
    # same piecewise-linear rule used for the reflection
    t = np.linspace(0.0, 1.0, subdiv + 1)
    xs = (q.x[:-1, None] + np.diff(q.x)[:, None] * t[None, :]).ravel()
    qs = np.interp(xs, q.x, q.values) - np.interp(PI - xs, q.x, q.values)
    norm = float(np.trapezoid(np.abs(qs), xs))
    return norm, Q


def endpoint_derivative_test(q: Potential, k: int, tol: float = 1e-8):
    """Check q^(k)(0) != (-1)^k q^(k)(pi).

    Data sources, in order of preference: explicitly supplied endpoint
    derivatives, the closed form (zero or polynomial), then the samples
    themselves for k = 0 and a one-sided second-order difference for k = 1.
    Higher orders without explicit data raise UnsupportedQueryError.

    Returns:
        (holds, lhs, rhs) with lhs = q^(k)(0), rhs = (-1)^k q^(k)(pi).
    """
    if k < 0:
        raise InvalidInputError("derivative order must be nonnegative")
    if k in q.endpoint_derivs:
        d0, dpi = q.endpoint_derivs[k]
    elif q.closed_form == "zero":
        d0 = dpi = 0j
    elif isinstance(q.closed_form, tuple):
        d0, dpi = _poly_endpoint_derivs(q.closed_form, k)
    elif k == 0:
        d0, dpi = complex(q.values[0]), complex(q.values[-1])
    elif k == 1:
        d0 = _one_sided_derivative(q.x, q.values, left=True)
        dpi = _one_sided_derivative(q.x, q.values, left=False)
    else:
        raise UnsupportedQueryError(
            f"order-{k} endpoint derivative needs closed_form or endpoint_derivs data")
    lhs = complex(d0)
    rhs = (-1) ** k * complex(dpi)
    scale = 1.0 + max(abs(lhs), abs(rhs))
    return bool(abs(lhs - rhs) > tol * scale), lhs, rhs


def _poly_endpoint_derivs(coeffs, k):
    c = np.polynomial.polynomial.polyder(np.asarray(coeffs, dtype=complex), k) if k else np.asarray(coeffs, dtype=complex)
    if len(c) == 0:
        return 0j, 0j
    return (complex(np.polynomial.polynomial.polyval(0.0, c)),
            complex(np.polynomial.polynomial.polyval(PI, c)))


def _one_sided_derivative(x, v, left: bool):
    # second-order one-sided difference on the first/last three nodes
    if left:
        x0, x1, x2 = x[0], x[1], x[2]
        f0, f1, f2 = v[0], v[1], v[2]
    else:
        x0, x1, x2 = x[-1], x[-2], x[-3]
        f0, f1, f2 = v[-1], v[-2], v[-3]
    h1, h2 = x1 - x0, x2 - x0
    # derivative of the quadratic through the three points, evaluated at x0
    return complex(f0 * (-(h1 + h2) / (h1 * h2))
                   + f1 * (h2 / (h1 * (h2 - h1)))
                   + f2 * (-h1 / (h2 * (h2 - h1))))


def endpoint_tail_limit(q: Potential, rho: float, h_grid, tol: float = 1e-8):
    """Estimates of lim_{h->0} integral_{pi-h}^{pi} Q(x) dx / h^rho.

    Each integral is the exact integral of the piecewise-linear Q
    interpolant, so arbitrarily small h are meaningful.

    Returns:
        (nu_estimates, converged, nu) where converged means the last three
        estimates agree to the given relative tolerance.
    """
    if rho <= 0:
        raise InvalidInputError("rho must be positive")
    h_grid = [float(h) for h in h_grid]
    if any(not 0 < h < PI for h in h_grid):
        raise InvalidInputError("h values must lie in (0, pi)")
    if any(h2 >= h1 for h1, h2 in zip(h_grid, h_grid[1:])):
        raise InvalidInputError("h_grid must be strictly decreasing")
    Q = reflection_defect_samples(q)
    estimates = []
    for h in h_grid:
        a = PI - h
        h_eff = PI - a      # exactly representable width of the stored interval
        estimates.append(_linear_interval_integral(q.x, Q, a, PI) / h_eff ** rho)
    converged = False
    if len(estimates) >= 3:
        last = estimates[-1]
        scale = 1.0 + abs(last)
        converged = all(abs(e - last) <= tol * scale for e in estimates[-3:])
    nu = complex(estimates[-1])
    return estimates, converged, nu
