"""Characteristic determinant Delta(mu) of a boundary-value problem (q, A).

Delta(mu) = -A13 - A24 + A34 s(pi,mu) - A23 s'(pi,mu) - A14 c(pi,mu)
            - A12 c'(pi,mu)

is entire in lambda = mu^2 and vanishes exactly at the eigenvalues.  The
evaluator memoizes fundamental values per (potential, mu, tol) so contour
scans and derivative queries share integrations, and offers a batched entry
point so boundary samplings integrate as one vectorized call.

For q = 0 the closed form Delta_0 is available separately, and for the
degenerate visual-form conditions u'(0) + d u'(pi) = 0, u(0) - d u(pi) = 0
the normalized display Delta/d = (d^2-1)/d + c(pi,mu) - s'(pi,mu) is
exposed as its own normalization mode.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .bc import BcKind, BcMatrix, classify
from .errors import InvalidInputError
from .ode import MU_CAP, fundamental_at_pi_many, free_fundamental
from .potential import PI, Potential

DET_TOL = 1e-11  # spectral work wants tighter integration than the generic default


def _minor_coeffs(A: BcMatrix):
    m = A.minors()
    return m


def delta_from_values(minors: dict, c, cp, s, sp):
    return (-minors["A13"] - minors["A24"] + minors["A34"] * s
            - minors["A23"] * sp - minors["A14"] * c - minors["A12"] * cp)


@dataclass
class DetEvaluator:
    """Evaluator of Delta(mu) for one (potential, boundary matrix) pair.

    extended=True integrates in 80-bit precision; worthwhile only when the
    minor combination is cancellation-bound (degenerate conditions, where
    Delta is a tiny difference of exponentially large fundamental values).

    The evaluator is immutable after construction.  The memo cache lives on
    the potential and is keyed per (mu, tol, extended); concurrent workers
    may insert entries simultaneously (plain dict writes under the GIL), at
    worst duplicating an integration, never corrupting one.
    """

    q: Potential
    A: BcMatrix
    normalization: str = "raw"          # "raw" | "visual"
    tol: float = DET_TOL
    mu_cap: float = MU_CAP
    extended: bool = False
    _minors: dict = field(init=False, repr=False)
    _d: complex = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self._minors = _minor_coeffs(self.A)
        if self.normalization not in ("raw", "visual"):
            raise InvalidInputError(f"unknown normalization {self.normalization!r}")
        if self.normalization == "visual":
            cls = classify(self.A)
            if cls.kind is not BcKind.DEGENERATE or "d" not in cls.params:
                raise InvalidInputError(
                    "visual normalization requires degenerate visual-form conditions")
            d = cls.params["d"]
            if abs(d) < 1e-14:
                raise InvalidInputError("visual normalization undefined for d = 0")
            self._d = d

    @property
    def d(self):
        return self._d

    # -- fundamental-value cache --------------------------------------------

    def _cache(self):
        return self.q._cache.setdefault("fund", {})

    def fundamentals(self, mus, m: int = 0, tol: float | None = None):
        """Cached fundamental values for many mu; misses integrate as one batch."""
        tol = self.tol if tol is None else tol
        cache = self._cache()
        keys = [(complex(mu), tol, self.extended) for mu in mus]
        missing = []
        for key in keys:
            hit = cache.get(key)
            if hit is None or len(hit.dlambda) < m:
                missing.append(key)
        if missing:
            missing = sorted(set(missing), key=lambda k: (k[0].real, k[0].imag))
            dtype = np.clongdouble if self.extended else np.complex128
            vals = fundamental_at_pi_many(self.q, [k[0] for k in missing], m=m,
                                          tol=tol, mu_cap=self.mu_cap, dtype=dtype)
            for key, val in zip(missing, vals):
                cache[key] = val
        return [cache[key] for key in keys]

    # -- evaluation -----------------------------------------------------------

    def delta_many(self, mus, tol: float | None = None) -> np.ndarray:
        vals = self.fundamentals(mus, m=0, tol=tol)
        out = np.empty(len(vals), dtype=complex)
        for i, fv in enumerate(vals):
            out[i] = self._combine(fv)
        return out

    def delta(self, mu, tol: float | None = None) -> complex:
        return complex(self.delta_many([mu], tol=tol)[0])

    def _combine(self, fv):
        if self.normalization == "visual":
            d = self._d
            return (d * d - 1.0) / d + fv.c_pi - fv.sp_pi
        return delta_from_values(self._minors, fv.c_pi, fv.cp_pi, fv.s_pi, fv.sp_pi)

    def derivative_from(self, fv, order: int) -> complex:
        """Delta^(order) in lambda from a fundamental record with enough dlambda."""
        if order == 0:
            return complex(self._combine(fv))
        c, cp, s, sp = fv.dlambda[order - 1]
        if self.normalization == "visual":
            return complex(c - sp)
        m = self._minors
        return complex(m["A34"] * s - m["A23"] * sp - m["A14"] * c - m["A12"] * cp)

    def value_and_slope(self, fv):
        """(Delta, dDelta/dlambda) from one fundamental record carrying m >= 1."""
        return self.derivative_from(fv, 0), self.derivative_from(fv, 1)

    def delta_lambda_derivative(self, mu, order: int = 1, tol: float | None = None) -> complex:
        """d^order Delta / d lambda^order via the variational quadruples."""
        if not 1 <= order <= 3:
            raise InvalidInputError("derivative order must be 1, 2, or 3")
        fv = self.fundamentals([mu], m=order, tol=tol)[0]
        c, cp, s, sp = fv.dlambda[order - 1]
        if self.normalization == "visual":
            return complex(c - sp)
        m = self._minors
        return complex(m["A34"] * s - m["A23"] * sp - m["A14"] * c - m["A12"] * cp)

    def boundary_form_matrix(self, mu, tol: float | None = None) -> np.ndarray:
        """2x2 matrix [B_i(c), B_i(s)]; its determinant equals Delta(mu)."""
        fv = self.fundamentals([mu], m=0, tol=tol)[0]
        a = self.A.rows
        bc_ = a[:, 1] * fv.cp_pi + a[:, 2] + a[:, 3] * fv.c_pi
        bs_ = a[:, 0] + a[:, 1] * fv.sp_pi + a[:, 3] * fv.s_pi
        return np.stack((bc_, bs_), axis=1)


def delta0(A: BcMatrix, mu) -> complex:
    """Closed-form characteristic determinant for q = 0."""
    m = A.minors()
    mu = complex(mu)
    cosv = cmath.cos(PI * mu)
    sinv = cmath.sin(PI * mu)
    if abs(mu) < 1e-8:
        mu2 = mu * mu
        s_over = PI - PI ** 3 * mu2 / 6.0 + PI ** 5 * mu2 * mu2 / 120.0
    else:
        s_over = sinv / mu
    return (-m["A13"] - m["A24"] + m["A34"] * s_over
            - (m["A23"] + m["A14"]) * cosv + m["A12"] * mu * sinv)


def delta0_many(A: BcMatrix, mus) -> np.ndarray:
    return np.asarray([delta0(A, mu) for mu in mus], dtype=complex)


def delta_free_from_minors(minors: dict, mu) -> complex:
    """Delta_0 evaluated straight from a minors dict (taxonomy experiments)."""
    fv = free_fundamental(mu)
    return delta_from_values(minors, fv.c_pi, fv.cp_pi, fv.s_pi, fv.sp_pi)
