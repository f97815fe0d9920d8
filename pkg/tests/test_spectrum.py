import numpy as np
import pytest

from slspec import bc
from slspec.determinant import DetEvaluator
from slspec.errors import (AssignmentFailureError, BoundaryZeroError,
                           InvalidInputError)
from slspec.spectrum import (Box, EigenvalueRecord, SpectrumClass,
                             SpectrumReport, asymptotic_fit, locate_spectrum,
                             multiplicity_growth_check, separation_check,
                             multiplicity_sqrt_ratio, winding_count)


def test_winding_dirichlet_box(q_zero):
    ev = DetEvaluator(q_zero, bc.dirichlet())
    assert winding_count(ev, Box(0.5, 1.5, -0.5, 0.5)) == 1
    assert winding_count(ev, Box(0.2, 0.8, -0.3, 0.3)) == 0


def test_winding_double_zero(q_zero):
    ev = DetEvaluator(q_zero, bc.periodic())
    assert winding_count(ev, Box(1.6, 2.4, -0.4, 0.4)) == 2


def test_winding_needs_64_samples(q_zero):
    ev = DetEvaluator(q_zero, bc.dirichlet())
    with pytest.raises(InvalidInputError):
        winding_count(ev, Box(0.5, 1.5, -0.5, 0.5), samples=16)


def test_winding_boundary_zero_detection(q_zero):
    ev = DetEvaluator(q_zero, bc.dirichlet())
    with pytest.raises(BoundaryZeroError):
        winding_count(ev, Box(1.0, 2.0, -0.5, 0.5))  # zeros on two corners... edges


def test_dirichlet_spectrum(dirichlet_report):
    rep = dirichlet_report
    assert rep.classification is SpectrumClass.COUNTABLE_DISCRETE
    assert len(rep.records) == 20
    for n, rec in enumerate(rep.records, start=1):
        assert abs(rec.mu - n) <= 1e-8
        assert rec.multiplicity == 1
    # records sorted by |mu|
    mags = [abs(r.mu) for r in rep.records]
    assert mags == sorted(mags)


def test_neumann_spectrum(neumann_report):
    rep = neumann_report
    mus = [round(r.mu.real) for r in rep.records]
    assert mus == list(range(0, 11))
    assert all(r.multiplicity == 1 for r in rep.records)
    assert abs(rep.records[0].mu) <= 1e-6  # mu = 0: lambda-simple double mu-zero


def test_periodic_spectrum(periodic_report):
    rep = periodic_report
    assert abs(rep.records[0].mu) <= 1e-6 and rep.records[0].multiplicity == 1
    doubles = rep.records[1:]
    assert [round(r.mu.real) for r in doubles] == [2, 4, 6, 8, 10, 12, 14, 16]
    assert all(r.multiplicity == 2 for r in doubles)


def test_antiperiodic_spectrum(antiperiodic_report):
    rep = antiperiodic_report
    assert [round(r.mu.real) for r in rep.records] == [1, 3, 5, 7, 9, 11, 13, 15]
    assert all(r.multiplicity == 2 for r in rep.records)


@pytest.mark.parametrize("fixture_name", ["dirichlet_report", "neumann_report",
                                          "periodic_report", "antiperiodic_report"])
def test_bisection_audits(fixture_name, request):
    rep = request.getfixturevalue(fixture_name)
    assert rep.audits, "bisection must record parent/child counts"
    for parent, (w1, w2) in rep.audits:
        assert parent == w1 + w2
    assert not rep.unresolved


def test_record_reverification(q_zero, dirichlet_report):
    # winding of an isolating box of half the stored diameter reproduces
    # the stored multiplicity
    ev = DetEvaluator(q_zero, bc.dirichlet())
    for rec in dirichlet_report.records[:4]:
        re0, re1, im0, im1 = rec.box
        r = max(re1 - re0, im1 - im0) / 4.0
        box = Box(rec.mu.real - r, rec.mu.real + r, rec.mu.imag - r, rec.mu.imag + r)
        assert winding_count(ev, box) == rec.multiplicity


def test_region_must_be_half_plane(q_zero):
    ev = DetEvaluator(q_zero, bc.dirichlet())
    with pytest.raises(InvalidInputError):
        locate_spectrum(ev, (-1.0, 5.0, -0.5, 0.5))


def test_whole_plane_stone(q_zero):
    ev = DetEvaluator(q_zero, bc.degenerate_d(1.0))
    rep = locate_spectrum(ev, (0, 5.0, -1.0, 1.0))
    assert rep.classification is SpectrumClass.WHOLE_PLANE
    assert not rep.records


def test_empty_spectrum_degenerate(q_zero):
    ev = DetEvaluator(q_zero, bc.degenerate_d(3.0))
    rep = locate_spectrum(ev, (0, 5.0, -1.0, 1.0))
    assert rep.classification is SpectrumClass.EMPTY


def test_degenerate_nonsymmetric_discrete(q_x):
    ev = DetEvaluator(q_x, bc.degenerate_d(1.0))
    rep = locate_spectrum(ev, (0, 6.0, -1.5, 1.5))
    assert rep.classification is SpectrumClass.COUNTABLE_DISCRETE
    assert len(rep.records) >= 4


def test_asymptotic_fit_periodic(periodic_report):
    fit = asymptotic_fit(periodic_report, theta=0)
    assert fit.verdict == "AsymptoticallyMultiple"
    assert fit.sup_defect <= 1e-6
    assert all(p["coincident"] for p in fit.pairs)


def test_asymptotic_fit_antiperiodic(antiperiodic_report):
    fit = asymptotic_fit(antiperiodic_report, theta=1)
    assert fit.verdict == "AsymptoticallyMultiple"
    assert [p["n"] for p in fit.pairs] == list(range(1, 9))


def _synthetic_report(mus_mults, region=(0.0, 40.0, -1.0, 1.0)):
    recs = [EigenvalueRecord(mu=complex(mu), lam=complex(mu) ** 2,
                             multiplicity=m, box=(0, 1, 0, 1), residual=0.0)
            for mu, m in mus_mults]
    recs.sort(key=lambda r: abs(r.mu))
    return SpectrumReport(records=recs, scan_region=region,
                          classification=SpectrumClass.COUNTABLE_DISCRETE)


def test_asymptotic_fit_simple_series():
    # split pairs 2n +- 0.3/sqrt(n): asymptotically simple evidence
    pairs = []
    for n in range(1, 11):
        eps = 0.3 / np.sqrt(n)
        pairs.append((2 * n - eps, 1))
        pairs.append((2 * n + eps, 1))
    fit = asymptotic_fit(_synthetic_report(pairs), theta=0)
    assert fit.verdict == "AsymptoticallySimple"
    assert fit.sup_defect <= 0.3 + 1e-12


def test_asymptotic_fit_assignment_failure():
    pairs = [(2.0, 2), (2.1, 1)] + [(2 * n, 2) for n in range(2, 10)]
    with pytest.raises(AssignmentFailureError):
        asymptotic_fit(_synthetic_report(pairs), theta=0)


def test_separation_dirichlet(dirichlet_report):
    c0, holds, note = separation_check(dirichlet_report)
    assert c0 == pytest.approx(1.0, abs=1e-7)
    assert holds and note is None


def test_separation_periodic_multiple(periodic_report):
    c0, holds, note = separation_check(periodic_report)
    assert c0 == 0.0
    assert not holds
    assert "separation condition" in note


def test_separation_neumann(neumann_report):
    c0, holds, _ = separation_check(neumann_report)
    assert c0 == pytest.approx(1.0, abs=1e-7)
    assert holds


def test_multiplicity_growth_ratios():
    rep = _synthetic_report([(7.0, 3), (11.0, 4), (15.0, 4), (23.0, 5)])
    ratios, c1, c2 = multiplicity_growth_check(rep)
    assert ratios[0] == pytest.approx(3 / np.log(7.0))    # 1.5417, the k = 4 zero
    assert c1 == pytest.approx(4 / np.log(15.0))
    assert c2 == pytest.approx(4 / np.log(11.0))


def test_multiplicity_growth_needs_records():
    rep = _synthetic_report([(0.5, 1)])
    with pytest.raises(InvalidInputError):
        multiplicity_growth_check(rep)


def test_sqrt_ratio_simple_spectrum_decays():
    rep = _synthetic_report([(float(n), 1) for n in range(1, 25)])
    seq, trend = multiplicity_sqrt_ratio(rep)
    assert trend
    assert seq[0] > seq[-1]


def test_sqrt_ratio_sqrt_multiplicity_flat():
    rep = _synthetic_report([(float(n), max(1, round(np.sqrt(n))))
                             for n in range(1, 25)])
    _, trend = multiplicity_sqrt_ratio(rep)
    assert not trend


def test_report_json_schema(dirichlet_report):
    doc = dirichlet_report.to_json_dict()
    assert doc["classification"] == "CountableDiscrete"
    rec = doc["eigenvalues"][0]
    assert set(rec) == {"mu", "lambda", "mult", "residual"}
    assert rec["mu"][0] == pytest.approx(1.0, abs=1e-8)
