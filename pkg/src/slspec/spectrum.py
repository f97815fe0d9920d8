"""Eigenvalue localization in the half-plane Re mu >= 0.

Zeros of Delta are counted by accumulating the continuous argument along box
boundaries (argument principle), isolated by recursive bisection with the
parent count always equal to the sum of the child counts, and polished by a
multiplicity-aware Newton iteration in lambda, where Delta is analytic.
Boxes and reporting stay in the mu plane; a zero at mu = 0 of even order 2k
is recorded with lambda-multiplicity k.

The module also hosts the scan-level diagnostics: two-series asymptotic
pairing, eigenvalue separation, and the multiplicity growth ratios used by
the degenerate constructions.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .bc import BcKind, classify
from .determinant import DetEvaluator
from .errors import (AssignmentFailureError, BoundaryZeroError,
                     InvalidInputError, NumericalFailureError)
from .potential import symmetry_defect

IRR = 1.0 / math.sqrt(2.0)   # irrational unit for jitter offsets


def _thread_count() -> int:
    """Worker cap from SLSPEC_THREADS; 1 (sequential) by default."""
    try:
        return max(1, int(os.environ.get("SLSPEC_THREADS", "1")))
    except ValueError:
        return 1


class SpectrumClass(Enum):
    COUNTABLE_DISCRETE = "CountableDiscrete"
    EMPTY = "Empty"
    WHOLE_PLANE = "WholePlane"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Box:
    re0: float
    re1: float
    im0: float
    im1: float

    def __post_init__(self):
        if not (self.re1 > self.re0 and self.im1 > self.im0):
            raise InvalidInputError("box must have positive width and height")

    @property
    def center(self) -> complex:
        return complex((self.re0 + self.re1) / 2.0, (self.im0 + self.im1) / 2.0)

    @property
    def sides(self):
        return self.re1 - self.re0, self.im1 - self.im0

    @property
    def maxside(self) -> float:
        w, h = self.sides
        return max(w, h)

    def expand(self, amount: float) -> "Box":
        return Box(self.re0 - amount, self.re1 + amount,
                   self.im0 - amount, self.im1 + amount)

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (self.re0 - slack <= z.real <= self.re1 + slack
                and self.im0 - slack <= z.imag <= self.im1 + slack)

    def split(self, frac: float = 0.5):
        """Two children partitioning the box across its longest side."""
        w, h = self.sides
        if w >= h:
            cut = self.re0 + frac * w
            return (Box(self.re0, cut, self.im0, self.im1),
                    Box(cut, self.re1, self.im0, self.im1))
        cut = self.im0 + frac * h
        return (Box(self.re0, self.re1, self.im0, cut),
                Box(self.re0, self.re1, cut, self.im1))

    def boundary_point(self, t):
        """Counterclockwise boundary point at arclength parameter t (vectorized)."""
        w, h = self.sides
        t = np.mod(np.asarray(t, dtype=float), 2.0 * (w + h))
        z = np.empty(t.shape, dtype=complex)
        m = t < w
        z[m] = self.re0 + t[m] + 1j * self.im0
        m = (t >= w) & (t < w + h)
        z[m] = self.re1 + 1j * (self.im0 + (t[m] - w))
        m = (t >= w + h) & (t < 2 * w + h)
        z[m] = self.re1 - (t[m] - w - h) + 1j * self.im1
        m = t >= 2 * w + h
        z[m] = self.re0 + 1j * (self.im1 - (t[m] - 2 * w - h))
        return z

    def as_tuple(self):
        return (self.re0, self.re1, self.im0, self.im1)


@dataclass(frozen=True)
class EigenvalueRecord:
    """One localized eigenvalue: mu with Re mu >= 0, lambda = mu^2."""

    mu: complex
    lam: complex
    multiplicity: int
    box: tuple
    residual: float
    index_hint: tuple | None = None

    def to_json_dict(self):
        return {
            "mu": [self.mu.real, self.mu.imag],
            "lambda": [self.lam.real, self.lam.imag],
            "mult": self.multiplicity,
            "residual": self.residual,
        }


@dataclass
class SpectrumReport:
    records: list
    scan_region: tuple
    classification: SpectrumClass
    audits: list = field(default_factory=list)       # (parent_count, child_counts)
    unresolved: list = field(default_factory=list)   # boxes that hit the cap
    notes: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def mus(self):
        return [r.mu for r in self.records]

    def instances(self):
        """mu values repeated according to multiplicity."""
        out = []
        for r in self.records:
            out.extend([r.mu] * r.multiplicity)
        return out

    def max_multiplicity(self) -> int:
        return max((r.multiplicity for r in self.records), default=0)

    def to_json_dict(self):
        return {
            "classification": self.classification.value,
            "eigenvalues": [r.to_json_dict() for r in self.records],
        }


def _as_fn(target, tol=None):
    if isinstance(target, DetEvaluator):
        return lambda pts: target.delta_many(pts, tol=tol)
    return lambda pts: np.asarray(target(pts), dtype=complex)


def _dip_mask(vals, rel: float = 0.3, half_window: int = 3) -> np.ndarray:
    """Segments whose endpoint modulus dips well below the local level."""
    absf = np.abs(vals)
    wmax = absf.copy()
    for k in range(-half_window + 1, half_window + 1):
        wmax = np.maximum(wmax, np.roll(absf, -k))
    seg_min = np.minimum(absf, np.roll(absf, -1))
    return seg_min < rel * wmax


class _WindState:
    """Refinement state for one box boundary inside a lockstep batch."""

    def __init__(self, box, samples):
        w, h = box.sides
        self.box = box
        self.L = 2.0 * (w + h)
        n0 = min(4096, max(samples, int(4.0 * self.L)))
        self.ts = np.linspace(0.0, self.L, n0, endpoint=False)
        self.vals = None
        self.status = None          # ("ok", w) | ("boundary", msg) | ("fail", msg)

    def points(self, ts):
        return self.box.boundary_point(ts)

    def step(self, floor_rel, floor_abs):
        """One refinement round; returns parameters needing evaluation."""
        amax = float(np.max(np.abs(self.vals)))
        if float(np.min(np.abs(self.vals))) <= max(floor_abs, floor_rel * amax):
            self.status = ("boundary",
                           f"boundary value below floor on box {self.box.as_tuple()}")
            return None
        dphi = np.angle(np.roll(self.vals, -1) / self.vals)
        # refine on large phase steps AND on magnitude dips: a zero close to
        # the contour can wrap the phase by nearly 2 pi between two samples,
        # which aliases to a small step and even keeps |f| symmetric across
        # the pair, but it cannot hide from a sliding-window modulus check
        bad = (np.abs(dphi) >= 0.5 * math.pi) | _dip_mask(self.vals)
        if not np.any(bad):
            wind = float(np.sum(dphi)) / (2.0 * math.pi)
            nearest = round(wind)
            if abs(wind - nearest) > 0.05:
                self.status = ("fail",
                               f"non-integer winding {wind:.4f} on box {self.box.as_tuple()}")
            else:
                self.status = ("ok", int(nearest))
            return None
        t_next = np.where(np.arange(len(self.ts)) < len(self.ts) - 1,
                          np.roll(self.ts, -1), self.L)
        return (self.ts[bad] + t_next[bad]) / 2.0

    def absorb(self, mids, vals):
        ts = np.concatenate((self.ts, mids))
        vv = np.concatenate((self.vals, vals))
        order = np.argsort(ts)
        self.ts, self.vals = ts[order], vv[order]


def _winding_multi(fn, boxes, samples, *, max_rounds: int = 18,
                   floor_rel: float = 1e-6, floor_abs: float = 1e-13):
    """Windings of several boxes with all evaluations batched per round."""
    states = [_WindState(b, samples) for b in boxes]
    pts = np.concatenate([s.points(s.ts) for s in states])
    vals = fn(pts)
    ofs = 0
    for s in states:
        s.vals = vals[ofs:ofs + len(s.ts)]
        ofs += len(s.ts)
    for _ in range(max_rounds):
        pending = []
        for s in states:
            if s.status is not None:
                continue
            mids = s.step(floor_rel, floor_abs)
            if mids is not None:
                pending.append((s, mids))
        if not pending:
            break
        allpts = np.concatenate([s.points(m) for s, m in pending])
        allvals = fn(allpts)
        ofs = 0
        for s, m in pending:
            s.absorb(m, allvals[ofs:ofs + len(m)])
            ofs += len(m)
    out = []
    for s in states:
        if s.status is None:
            s.status = ("fail",
                        f"phase refinement cap exceeded on box {s.box.as_tuple()}")
        out.append(s.status)
    return out


def winding_count(target, box: Box, samples: int = 96, *, tol: float = None,
                  max_rounds: int = 18, floor_rel: float = 1e-6,
                  floor_abs: float = 1e-13) -> int:
    """Number of zeros (with multiplicity) inside a box, by argument principle.

    The boundary is sampled and adaptively refined until all consecutive
    phase steps are below pi/2 and no unexplained modulus dip remains.
    Raises BoundaryZeroError when some boundary value falls under the
    zero-suspicion floor, and NumericalFailureError if the accumulated
    argument refuses to settle near an integer multiple of 2 pi.
    """
    if samples < 64:
        raise InvalidInputError("winding needs at least 64 boundary samples")
    fn = _as_fn(target, tol)
    status = _winding_multi(fn, [box], samples, max_rounds=max_rounds,
                            floor_rel=floor_rel, floor_abs=floor_abs)[0]
    return _unwrap_status(status)


def _unwrap_status(status):
    tag, payload = status
    if tag == "ok":
        return payload
    if tag == "boundary":
        raise BoundaryZeroError(payload)
    raise NumericalFailureError(payload)


def winding_count_circle(fn, center, radius, samples: int = 256,
                         **kwargs) -> int:
    """Winding of a callable around a circle, via an enclosing-box-free path."""
    fn = _as_fn(fn)
    ts = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    vals = fn(center + radius * np.exp(1j * ts))
    for _ in range(18):
        if float(np.min(np.abs(vals))) <= max(1e-13, 1e-6 * float(np.max(np.abs(vals)))):
            raise BoundaryZeroError("circle passes too close to a zero")
        dphi = np.angle(np.roll(vals, -1) / vals)
        bad = (np.abs(dphi) >= 0.5 * math.pi) | _dip_mask(vals)
        if not np.any(bad):
            wind = float(np.sum(dphi)) / (2.0 * math.pi)
            nearest = round(wind)
            if abs(wind - nearest) > 0.05:
                raise NumericalFailureError(f"non-integer circle winding {wind:.4f}")
            return int(nearest)
        t_next = np.concatenate((ts[1:], [2.0 * math.pi]))
        mids = (ts[bad] + t_next[bad]) / 2.0
        ts = np.concatenate((ts, mids))
        vals = np.concatenate((vals, fn(center + radius * np.exp(1j * mids))))
        order = np.argsort(ts)
        ts, vals = ts[order], vals[order]
    raise NumericalFailureError("circle phase refinement cap exceeded")


def _principal_mu(lam: complex) -> complex:
    mu = cmath.sqrt(lam)
    if mu.real < 0 or (mu.real == 0 and mu.imag < 0):
        mu = -mu
    return mu


def _newton_batch(ev: DetEvaluator, items, *, tol_rel: float = 1e-12,
                  max_iter: int = 30):
    """Multiplicity-aware Newton in lambda for many zeros at once.

    items: list of (lam0, mult, step_cap).  For multiplicity m <= 3 the
    iteration targets the simple zero of Delta^(m-1), which restores
    quadratic convergence to machine precision; higher multiplicities fall
    back to the m-scaled classic step with a noise-floor stall detector.
    Each round advances every still-active zero with one batched
    integration.  Returns a list of (lam, mu, residual) or None per item;
    residual is |Delta(mu)| so callers can reject critical points that are
    not actual zeros.
    """
    n = len(items)
    lam = np.array([it[0] for it in items], dtype=complex)
    mult = np.array([int(it[1]) for it in items])
    cap = np.array([it[2] for it in items], dtype=float)
    active = np.ones(n, dtype=bool)
    ok = np.zeros(n, dtype=bool)
    prev_step = np.full(n, np.inf)
    m_need = int(min(3, np.max(mult))) if n else 1
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        mus = [_principal_mu(complex(l)) for l in lam[idx]]
        fvs = ev.fundamentals(mus, m=m_need)
        for i, fv in zip(idx, fvs):
            m = mult[i]
            if m <= 3:
                g = ev.derivative_from(fv, m - 1)
                gp = ev.derivative_from(fv, min(m, len(fv.dlambda)))
                scale_m = 1
            else:
                g = ev.derivative_from(fv, 0)
                gp = ev.derivative_from(fv, 1)
                scale_m = m
            if gp == 0:
                active[i] = False
                continue
            step = scale_m * g / gp
            if abs(step) > cap[i]:
                active[i] = False
                continue
            lam[i] -= step
            sz = abs(step)
            tolsz = tol_rel * (1.0 + abs(lam[i]))
            stalled = sz <= 1e-5 * (1.0 + abs(lam[i])) and sz >= 0.3 * prev_step[i]
            prev_step[i] = sz
            if sz <= tolsz or stalled:
                active[i] = False
                ok[i] = True
    out = []
    done = np.nonzero(ok)[0]
    if len(done):
        mus = [_principal_mu(complex(l)) for l in lam[done]]
        residuals = np.abs(ev.delta_many(mus))
    pos = {int(i): k for k, i in enumerate(done)}
    for i in range(n):
        if ok[i]:
            mu = _principal_mu(complex(lam[i]))
            out.append((complex(lam[i]), mu, float(residuals[pos[i]])))
        else:
            out.append(None)
    return out


def _verify_record(ev, mu, mult, halfside, wind_tol, samples):
    """Winding around the refined zero must reproduce its multiplicity."""
    if abs(mu) > 1e-6:
        r = min(halfside, abs(mu) / 2.0)
        expected = mult
    else:
        r = halfside
        expected = 2 * mult
    for bump in (0.0, IRR * 0.13 * r, -IRR * 0.29 * r):
        box = Box(mu.real - r + bump, mu.real + r + bump,
                  mu.imag - r + bump * IRR, mu.imag + r + bump * IRR)
        try:
            return winding_count(ev, box, samples, tol=wind_tol) == expected
        except BoundaryZeroError:
            continue
        except NumericalFailureError:
            return False
    return False


def locate_spectrum(ev: DetEvaluator, region, max_refine: int = 48, *,
                    samples: int = 96, coarse: float = 0.25,
                    wind_tol: float = 1e-7, axis_margin: float = 0.25,
                    merge_rel: float = 1e-6, probe_count: int = 40,
                    residual_tol: float = 1e-6) -> SpectrumReport:
    """Locate all eigenvalues with mu in a rectangle of the Re mu >= 0 half-plane.

    Returns a SpectrumReport with records sorted by |mu| nondecreasing.  The
    classification follows the degenerate-case table: WholePlane only when
    Delta vanishes on the probe set AND the boundary conditions are
    degenerate with d = +-1 and a symmetric potential; Empty only when no
    zeros were found and Delta is certified constant-nonzero.
    """
    region = Box(*region) if not isinstance(region, Box) else region
    if region.re0 < 0:
        raise InvalidInputError("scan region must lie in the half-plane Re mu >= 0")
    notes = []

    bc_cls = classify(ev.A)
    defect, _ = symmetry_defect(ev.q)
    symmetric = defect <= 1e-8

    # probe scan: detect the identically-zero determinant before any winding
    rng = np.random.default_rng(987654321)
    pr = region.re0 + (region.re1 - region.re0) * rng.random(probe_count)
    pi_ = region.im0 + (region.im1 - region.im0) * rng.random(probe_count)
    probe_pts = pr + 1j * pi_
    probe_vals = ev.delta_many(probe_pts)
    probe_scale = 1.0 + float(np.max(np.exp(np.abs(probe_pts.imag) * math.pi)))
    if float(np.max(np.abs(probe_vals))) <= 1e-8 * probe_scale:
        d = bc_cls.params.get("d")
        stone = (bc_cls.kind is BcKind.DEGENERATE and d is not None
                 and min(abs(d - 1), abs(d + 1)) <= 1e-8 and symmetric)
        if stone:
            return SpectrumReport([], region.as_tuple(), SpectrumClass.WHOLE_PLANE,
                                  notes=["Delta vanished on the probe set; Stone-type "
                                         "degenerate conditions corroborated"])
        return SpectrumReport([], region.as_tuple(), SpectrumClass.UNDETERMINED,
                              notes=["Delta vanished on the probe set but the "
                                     "boundary-condition test did not corroborate"])

    # root box: extend across the imaginary axis to catch boundary zeros
    # there, and jitter every edge asymmetrically so that no midpoint cut at
    # any bisection depth can run exactly through the real axis or through
    # integer-aligned zeros (an even-order zero sitting on a cut would split
    # its winding consistently between the children and evade detection)
    eps = IRR * 1e-3 * max(1.0, region.maxside)
    re0 = (-axis_margin - 0.618 * eps) if region.re0 <= 1e-9 else region.re0 - eps
    root = Box(re0, region.re1 + 1.303 * eps,
               region.im0 - eps, region.im1 + 2.618 * eps)

    audits = []
    unresolved = []
    records = []

    def box_winding(box):
        return winding_count(ev, box, samples, tol=wind_tol)

    root_w = None
    grow = eps
    for _ in range(6):
        try:
            root_w = box_winding(root)
            break
        except BoundaryZeroError:
            grow *= 2.618
            root = root.expand(grow)
            notes.append("root box expanded to avoid a boundary zero")
    if root_w is None:
        raise NumericalFailureError("could not certify the root box boundary")

    threads = _thread_count()

    wind_fn = _as_fn(ev, wind_tol)

    def split_task(item):
        b, w_, d = item
        if w_ == 0:
            return ("drop", None)
        if d >= max_refine or b.maxside <= 1e-5:
            return ("unres", b.as_tuple())
        for frac in (0.5, 0.5 + 0.5 * IRR * 0.2, 0.5 - 0.5 * IRR * 0.31,
                     0.5 + 0.5 * IRR * 0.47):
            c1, c2 = b.split(frac)
            s1, s2 = _winding_multi(wind_fn, [c1, c2], samples)
            if s1[0] != "ok" or s2[0] != "ok":
                continue
            w1, w2 = s1[1], s2[1]
            if w1 + w2 != w_:
                continue  # a zero sat on the cut; re-cut elsewhere
            return ("children", ((w_, (w1, w2)), (c1, w1, d + 1), (c2, w2, d + 1)))
        return ("unres", b.as_tuple())

    def bisect_down(box, w, depth, coarse_size):
        """Partition until boxes hold their count at size <= coarse_size.

        Frontier waves run on a worker pool capped by SLSPEC_THREADS
        (default 1, fully sequential); outputs are merged in frontier
        order, so results do not depend on the thread count.
        """
        out = []
        frontier = [(box, w, depth)]
        pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        try:
            while frontier:
                work, nxt = [], []
                for item in frontier:
                    b, w_, d = item
                    if w_ == 0:
                        continue
                    if b.maxside <= coarse_size:
                        out.append(item)
                    else:
                        work.append(item)
                if pool is not None and len(work) > 1:
                    results = list(pool.map(split_task, work))
                else:
                    results = [split_task(it) for it in work]
                for tag, payload in results:
                    if tag == "unres":
                        unresolved.append(payload)
                    elif tag == "children":
                        audit, child1, child2 = payload
                        audits.append(audit)
                        nxt.append(child1)
                        nxt.append(child2)
                frontier = nxt
        finally:
            if pool is not None:
                pool.shutdown(wait=False)
        return out

    def candidate_mults(box, w):
        # an origin box of even count may hold a single lambda-zero of half
        # the mu-order (a zero of even order at mu = 0, or a +-mu pair)
        if box.contains(0.0) and w % 2 == 0:
            return (w // 2, w)
        return (w,)

    pending = [(b, w, d, 0) for (b, w, d) in bisect_down(root, root_w, 0, coarse)]
    while pending:
        batch, meta = [], []
        for b, w, d, trial in pending:
            cands = candidate_mults(b, w)
            if trial >= len(cands):
                # Newton exhausted: the box still mixes zeros; split deeper
                pending_extra = bisect_down(b, w, d + 1, b.maxside / 2.0)
                meta.extend((bb, ww, dd, 0, None) for bb, ww, dd in pending_extra)
                continue
            mult = cands[trial]
            cap = 4.0 * (1.0 + abs(b.center)) * b.maxside
            batch.append((b.center ** 2, mult, cap))
            meta.append((b, w, d, trial, mult))
        if not meta:
            break
        results = _newton_batch(ev, batch) if batch else []
        results_iter = iter(results)
        pending = []
        for entry in meta:
            b, w, d, trial, mult = entry
            if mult is None:       # freshly split box, enters next round
                pending.append((b, w, d, 0))
                continue
            res = next(results_iter)
            good = False
            if res is not None:
                lam, mu, residual = res
                res_ok = residual <= residual_tol * (1.0 + math.exp(abs(mu.imag) * math.pi))
                if res_ok and b.contains(mu, slack=b.maxside) and _verify_record(
                        ev, mu, mult, b.maxside / 2.0, wind_tol, samples):
                    records.append(EigenvalueRecord(
                        mu=mu, lam=lam, multiplicity=mult,
                        box=b.as_tuple(), residual=residual))
                    good = True
            if not good:
                pending.append((b, w, d, trial + 1))

    records = _dedupe(records, merge_rel, notes)
    records.sort(key=lambda r: (abs(r.mu), r.mu.real, r.mu.imag))

    if unresolved:
        classification = SpectrumClass.UNDETERMINED
    elif not records:
        d = bc_cls.params.get("d")
        const_ok = False
        if (bc_cls.kind is BcKind.DEGENERATE and d is not None and symmetric
                and min(abs(d - 1), abs(d + 1)) > 1e-8):
            spread = float(np.max(np.abs(probe_vals - np.mean(probe_vals))))
            const_ok = (spread <= 1e-6 * probe_scale
                        and abs(np.mean(probe_vals)) > 1e-8)
        classification = SpectrumClass.EMPTY if const_ok else SpectrumClass.COUNTABLE_DISCRETE
    else:
        classification = SpectrumClass.COUNTABLE_DISCRETE

    return SpectrumReport(records, region.as_tuple(), classification,
                          audits=audits, unresolved=unresolved, notes=notes)


def _dedupe(records, merge_rel, notes):
    out = []
    for rec in records:
        dup = None
        for kept in out:
            if abs(kept.lam - rec.lam) <= merge_rel * (1.0 + abs(kept.lam)):
                dup = kept
                break
        if dup is None:
            out.append(rec)
        elif dup.multiplicity != rec.multiplicity:
            notes.append(f"multiplicity mismatch between mirror records near "
                         f"lambda = {rec.lam:.6g}; keeping the larger")
            out[out.index(dup)] = replace(dup, multiplicity=max(dup.multiplicity,
                                                                rec.multiplicity))
    return out


# -- scan-level diagnostics ---------------------------------------------------


@dataclass
class AsymptoticFit:
    pairs: list              # dicts: {"n": int, "mus": [...], "coincident": bool}
    sup_defect: float
    verdict: str             # AsymptoticallySimple | AsymptoticallyMultiple | Mixed/Undetermined
    leftovers: list


def asymptotic_fit(report: SpectrumReport, theta: int, *,
                   pair_tol: float = 1e-6, window: float = 0.99) -> AsymptoticFit:
    """Assign located mu to the two-series pattern mu = 2n - theta.

    Verdicts are scan-limited evidence: they describe all but finitely many
    pairs inside the scan window, never the true tail.
    """
    if theta not in (0, 1):
        raise InvalidInputError("theta must be 0 or 1")
    inst = report.instances()
    if not inst:
        raise InvalidInputError("empty report")
    mu_max = max(abs(m) for m in inst)
    targets = [(n, 2 * n - theta) for n in range(1, int((mu_max + theta) / 2) + 2)
               if 2 * n - theta <= mu_max + window]
    assigned = {}
    leftovers = []
    for mu in inst:
        best = None
        for n, t in targets:
            d = abs(mu - t)
            if d < window and (best is None or d < best[1]):
                best = (n, d)
        if best is None:
            leftovers.append(mu)
        else:
            assigned.setdefault(best[0], []).append(mu)
    pairs = []
    sup_defect = 0.0
    for n, mus in sorted(assigned.items()):
        if len(mus) > 2:
            raise AssignmentFailureError(
                f"{len(mus)} eigenvalues competing for index n = {n}")
        t = 2 * n - theta
        for mu in mus:
            sup_defect = max(sup_defect, abs(mu - t) * math.sqrt(n))
        coincident = len(mus) == 2 and abs(mus[0] - mus[1]) <= pair_tol * (1 + abs(t))
        pairs.append({"n": n, "mus": mus, "coincident": coincident})
    full = [p for p in pairs if len(p["mus"]) == 2]
    if len(full) < 8:
        raise InvalidInputError("need at least 8 located pairs for a verdict")
    ns = [p["n"] for p in full]
    n_med = sorted(ns)[len(ns) // 2]
    top = [p for p in full if p["n"] >= n_med]
    if all(p["coincident"] for p in top):
        verdict = "AsymptoticallyMultiple"
    elif all(not p["coincident"] for p in top):
        verdict = "AsymptoticallySimple"
    else:
        verdict = "Mixed/Undetermined"
    return AsymptoticFit(pairs=pairs, sup_defect=sup_defect, verdict=verdict,
                         leftovers=leftovers)


def separation_check(report: SpectrumReport, floor: float = 1e-3):
    """Smallest gap |mu_k - mu_m| over the upper half of the scan range.

    A record of multiplicity >= 2 counts as a coincident pair, so the gap is
    reported as 0 with a multiplicity note.
    """
    recs = report.records
    if len(recs) < 2:
        raise InvalidInputError("need at least two records")
    mu_max = max(abs(r.mu) for r in recs)
    upper = [r for r in recs if abs(r.mu) >= mu_max / 2.0]
    note = None
    c0 = math.inf
    if any(r.multiplicity > 1 for r in upper):
        c0 = 0.0
        note = "coincident pair (multiple eigenvalue): separation condition never holds"
    for i in range(len(upper)):
        for j in range(i + 1, len(upper)):
            c0 = min(c0, abs(upper[i].mu - upper[j].mu))
    return float(c0), bool(c0 > floor), note


def multiplicity_growth_check(report: SpectrumReport):
    """Empirical brackets for m(lambda_n) / ln |mu_n| over the scan."""
    recs = [r for r in report.records if abs(r.mu) > 1.0]
    if not recs:
        raise InvalidInputError("no records with |mu| > 1")
    ratios = [r.multiplicity / math.log(abs(r.mu)) for r in recs]
    return ratios, min(ratios), max(ratios)


def multiplicity_sqrt_ratio(report: SpectrumReport):
    """Sequence m(lambda_n)/sqrt(|mu_n|) and a monotone-decay trend flag."""
    recs = sorted(report.records, key=lambda r: abs(r.mu))
    if len(recs) < 8:
        raise InvalidInputError("need at least 8 records for a trend")
    seq = [r.multiplicity / math.sqrt(abs(r.mu)) for r in recs if abs(r.mu) > 0]
    q = max(2, len(seq) // 4)
    head = float(np.mean(seq[:q]))
    tail = float(np.mean(seq[-q:]))
    return seq, bool(tail < 0.95 * head)
