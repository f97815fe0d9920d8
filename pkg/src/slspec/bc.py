"""Boundary matrix algebra: minors, taxonomy classification, canonical forms.

A two-point boundary condition pair

    B_i(u) = a_i1 u'(0) + a_i2 u'(pi) + a_i3 u(0) + a_i4 u(pi) = 0,  i = 1, 2

is encoded by the 2x4 complex matrix A = (a_ij).  Everything that matters for
the spectral taxonomy is a function of the six 2x2 column minors A_ij, which
are invariant (up to a common factor) under row operations.  The classifier
implements the full decision tree:

    degenerate                      A12 = 0, A14 + A23 = 0, A34 = 0
    strengthened regular            three condition groups
    regular, not strengthened       A12 = 0, A14+A23 = +-(A13+A24) != 0,
                                    split into types I / II / III
    irregular                       the remaining nondegenerate conditions

with canonical matrices and their parameters recovered from the minors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateMatrixError, InvalidInputError

_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_NAMES = ("A12", "A13", "A14", "A23", "A24", "A34")


class BcKind(Enum):
    STRENGTHENED_REGULAR = "StrengthenedRegular"
    REGULAR_NOT_STRENGTHENED = "RegularNotStrengthened"
    IRREGULAR = "Irregular"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class BcMatrix:
    """2x4 complex boundary matrix with its column minors."""

    rows: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.rows, dtype=complex)
        if a.shape != (2, 4):
            raise InvalidInputError(f"boundary matrix must be 2x4, got {a.shape}")
        object.__setattr__(self, "rows", a)

    @classmethod
    def from_json(cls, doc) -> "BcMatrix":
        """Build from {"rows": [[[re,im] x4],[[re,im] x4]]}; bare reals accepted."""
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        rows = doc["rows"] if isinstance(doc, dict) else doc
        a = [[_entry(e) for e in row] for row in rows]
        return cls(np.asarray(a, dtype=complex))

    def minor(self, i: int, j: int) -> complex:
        """det of columns (i, j), 1-based as in A_ij."""
        a = self.rows
        return complex(a[0, i - 1] * a[1, j - 1] - a[0, j - 1] * a[1, i - 1])

    def minors(self) -> dict:
        """All six minors keyed 'A12' .. 'A34'.

        Raises DegenerateMatrixError when every minor vanishes (dependent rows).
        """
        m = {name: self.minor(i + 1, j + 1) for name, (i, j) in zip(_NAMES, _PAIRS)}
        scale = max(abs(v) for v in m.values())
        if scale <= 1e-14 * max(1.0, float(np.max(np.abs(self.rows)))) ** 2:
            raise DegenerateMatrixError("boundary matrix rows are linearly dependent")
        return m

    def plucker_residual(self) -> float:
        """|A12 A34 - A13 A24 + A14 A23| relative to the largest minor product."""
        m = self.minors()
        r = m["A12"] * m["A34"] - m["A13"] * m["A24"] + m["A14"] * m["A23"]
        scale = max(abs(m["A12"] * m["A34"]), abs(m["A13"] * m["A24"]),
                    abs(m["A14"] * m["A23"]), 1e-300)
        return abs(r) / scale

    def boundary_form(self, u0, up0, upi, uppi):
        """Apply both forms B_i to boundary data (u(0), u'(0), u(pi), u'(pi))."""
        a = self.rows
        vec = np.asarray([up0, uppi, u0, upi], dtype=complex)
        return a @ vec


def _entry(e):
    if isinstance(e, (list, tuple)):
        return complex(e[0], e[1] if len(e) > 1 else 0.0)
    return complex(e)


@dataclass(frozen=True)
class BcClass:
    """Classification result: taxonomy kind plus canonical-form parameters."""

    kind: BcKind
    theta: int | None = None          # regular-not-strengthened only
    subtype: str | None = None        # "I" | "II" | "III"
    variant: int | None = None        # irregular 1|2|3; degenerate 1 (visual) | 2 (Cauchy-like)
    params: dict = field(default_factory=dict)
    canonical_matrix: BcMatrix | None = None
    minors: dict = field(default_factory=dict)

    @property
    def is_degenerate(self) -> bool:
        return self.kind is BcKind.DEGENERATE

    @property
    def label(self) -> str:
        bits = [self.kind.value]
        if self.theta is not None:
            bits.append(f"theta={self.theta}")
        if self.subtype:
            bits.append(f"type {self.subtype}")
        if self.kind is BcKind.IRREGULAR and self.variant:
            bits.append(f"variant {self.variant}")
        if self.kind is BcKind.DEGENERATE:
            bits.append("CauchyLike" if self.variant == 2 else "VisualForm")
        return " ".join(bits)

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "theta": self.theta,
            "subtype": self.subtype,
            "variant": self.variant,
            "parameters": {k: [v.real, v.imag] for k, v in self.params.items()},
            "minors": {k: [v.real, v.imag] for k, v in self.minors.items()},
        }
        if self.canonical_matrix is not None:
            out["canonical_matrix"] = [[[z.real, z.imag] for z in row]
                                       for row in self.canonical_matrix.rows]
        return out


def classify(A: BcMatrix, tol: float = 1e-10) -> BcClass:
    """Classify boundary conditions into the full taxonomy.

    All equality decisions compare against ``tol`` scaled by the largest
    minor magnitude, which makes the result invariant under row operations.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    m = A.minors()
    scale = max(abs(v) for v in m.values())
    eps = tol * scale

    def zero(z):
        return abs(z) <= eps

    a12, a13, a14 = m["A12"], m["A13"], m["A14"]
    a23, a24, a34 = m["A23"], m["A24"], m["A34"]
    s_out = a14 + a23          # "outer" minor sum
    s_in = a13 + a24           # "inner" minor sum

    if zero(a12) and zero(s_out) and zero(a34):
        return _classify_degenerate(A, m, eps)

    # strengthened regular: any of the three groups
    if not zero(a12):
        return _cls(A, m, BcKind.STRENGTHENED_REGULAR)
    if not zero(s_out) and not zero(s_out - s_in) and not zero(s_out + s_in):
        return _cls(A, m, BcKind.STRENGTHENED_REGULAR)
    if zero(s_out) and zero(s_in) and zero(a13 - a24) and not zero(a34):
        return _cls(A, m, BcKind.STRENGTHENED_REGULAR)

    # regular but not strengthened regular: A12 = 0, A14+A23 = (-1)^(theta+1)(A13+A24)
    if not zero(s_out):
        if zero(s_out + s_in):
            theta = 0
        elif zero(s_out - s_in):
            theta = 1
        else:
            raise InvalidInputError("classification fell through; inconsistent minors")
        if zero(a14 - a23):
            subtype = "I" if zero(a34) else "II"
        else:
            subtype = "III"
        return _cls(A, m, BcKind.REGULAR_NOT_STRENGTHENED, theta=theta, subtype=subtype)

    # irregular: A12 = 0, A14+A23 = 0, A34 != 0, and either A13+A24 = 0 with
    # A13 != A24, or A13+A24 != 0
    if zero(s_in):
        variant = 1
    else:
        variant = 3 if zero(a13) else 2
    return _cls(A, m, BcKind.IRREGULAR, variant=variant)


def _classify_degenerate(A, m, eps):
    a13, a23 = m["A13"], m["A23"]
    if abs(a13) <= eps or abs(a23) <= eps:
        # Cauchy problem shapes: d = 0 matrix or the (0 1 0 0 / 0 0 0 1) matrix
        return _cls(A, m, BcKind.DEGENERATE, variant=2)
    d = a23 / a13
    return _cls(A, m, BcKind.DEGENERATE, variant=1, params={"d": d})


def _cls(A, m, kind, theta=None, subtype=None, variant=None, params=None):
    cls = BcClass(kind=kind, theta=theta, subtype=subtype, variant=variant,
                  params=params or {}, minors=m)
    canon = _canonical_matrix(cls)
    extracted = _extract_params(cls)
    return BcClass(kind=kind, theta=theta, subtype=subtype, variant=variant,
                   params=extracted, canonical_matrix=canon, minors=m)


def _extract_params(cls: BcClass) -> dict:
    m = cls.minors
    p = dict(cls.params)
    if cls.kind is BcKind.REGULAR_NOT_STRENGTHENED:
        if cls.subtype == "II":
            p["a14"] = -m["A34"] / m["A13"]
    elif cls.kind is BcKind.IRREGULAR:
        if cls.variant == 1:
            p["sign"] = m["A23"] / m["A13"]
            p["b0"] = -m["A34"] / m["A13"]
        elif cls.variant == 2:
            p["b1"] = -m["A14"] / m["A13"]
            p["b0"] = -m["A34"] / m["A13"]
        else:
            p["a0"] = m["A34"] / m["A24"]
    return p


def _canonical_matrix(cls: BcClass) -> BcMatrix | None:
    m = cls.minors
    if cls.kind is BcKind.REGULAR_NOT_STRENGTHENED:
        if cls.subtype == "III":
            return None  # type III has no displayed canonical matrix
        s = m["A14"] / m["A13"]
        s = 1.0 if abs(s - 1) < abs(s + 1) else -1.0
        if cls.subtype == "I":
            return BcMatrix([[1, s, 0, 0], [0, 0, 1, s]])
        a14 = -m["A34"] / m["A13"]
        return BcMatrix([[1, s, 0, a14], [0, 0, 1, s]])
    if cls.kind is BcKind.IRREGULAR:
        if cls.variant == 1:
            s = m["A23"] / m["A13"]
            s = 1.0 if abs(s - 1) < abs(s + 1) else -1.0
            b0 = -m["A34"] / m["A13"]
            return BcMatrix([[1, s, 0, b0], [0, 0, 1, -s]])
        if cls.variant == 2:
            b1 = -m["A14"] / m["A13"]
            b0 = -m["A34"] / m["A13"]
            return BcMatrix([[1, b1, 0, b0], [0, 0, 1, -b1]])
        a0 = m["A34"] / m["A24"]
        return BcMatrix([[0, 1, a0, 0], [0, 0, 0, 1]])
    if cls.kind is BcKind.DEGENERATE:
        if cls.variant == 2:
            # two Cauchy shapes: d = 0 in the visual-form matrix, or the
            # terminal-data matrix; tell them apart by which minor survives
            if abs(m["A13"]) > abs(m["A24"]):
                return BcMatrix([[1, 0, 0, 0], [0, 0, 1, 0]])
            return BcMatrix([[0, 1, 0, 0], [0, 0, 0, 1]])
        d = cls.params["d"]
        return BcMatrix([[1, d, 0, 0], [0, 0, 1, -d]])
    return None


def canonical_form(A: BcMatrix, tol: float = 1e-10) -> BcMatrix:
    """Canonical matrix equivalent to A under row operations.

    Strengthened-regular conditions have no displayed canonical matrix and
    are returned unchanged; the same applies to type III.
    """
    cls = classify(A, tol)
    if cls.canonical_matrix is None:
        return A
    return cls.canonical_matrix


def theta_of(cls: BcClass) -> int:
    if cls.theta is None:
        raise InvalidInputError("theta defined only for regular-not-strengthened conditions")
    return cls.theta


# ready-made taxonomy fixtures, used across tests and docs
def dirichlet() -> BcMatrix:
    return BcMatrix([[0, 0, 1, 0], [0, 0, 0, 1]])


def neumann() -> BcMatrix:
    return BcMatrix([[1, 0, 0, 0], [0, 1, 0, 0]])


def periodic() -> BcMatrix:
    return BcMatrix([[1, -1, 0, 0], [0, 0, 1, -1]])


def antiperiodic() -> BcMatrix:
    return BcMatrix([[1, 1, 0, 0], [0, 0, 1, 1]])


def type2(a14=1.0) -> BcMatrix:
    return BcMatrix([[1, -1, 0, a14], [0, 0, 1, -1]])


def irregular_a0(a0=1.0) -> BcMatrix:
    return BcMatrix([[0, 1, a0, 0], [0, 0, 0, 1]])


def degenerate_d(d) -> BcMatrix:
    return BcMatrix([[1, d, 0, 0], [0, 0, 1, -d]])
