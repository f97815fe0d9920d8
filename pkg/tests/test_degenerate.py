import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slspec.degenerate import (DegenerateCase, classify_degenerate,
                               d_to_gamma, example1_product, example1_sequence,
                               example2_product, example2_sequence,
                               gamma_d_maps, growth_bound_check,
                               nonclassical_spectrum_report, product_eval,
                               product_eval_many, pw_membership_check)
from slspec.errors import (InsufficientTruncationError, InternalConsistencyError,
                           InvalidInputError)
from slspec.spectrum import multiplicity_sqrt_ratio, winding_count_circle


def test_degenerate_case_table(q_zero, q_x):
    assert classify_degenerate(q_zero, 1.0).case is DegenerateCase.WHOLE_PLANE
    assert classify_degenerate(q_zero, -1.0).case is DegenerateCase.WHOLE_PLANE
    assert classify_degenerate(q_zero, 3.0).case is DegenerateCase.NO_EIGENVALUES
    assert classify_degenerate(q_x, 1.0).case is DegenerateCase.COUNTABLE_DISCRETE
    res = classify_degenerate(q_x, 1.0)
    assert res.defect_norm == pytest.approx(np.pi ** 2 / 2, abs=1e-4)


def test_degenerate_d_zero_is_cauchy(q_zero):
    with pytest.raises(InvalidInputError):
        classify_degenerate(q_zero, 0.0)


def test_gamma_d_identities():
    dp, dm = gamma_d_maps(0.0)
    assert (dp, dm) == (1.0, -1.0)
    assert d_to_gamma(2.0) == pytest.approx(1.5)
    dp, dm = gamma_d_maps(1.5)
    assert dp == pytest.approx(2.0) and dm == pytest.approx(-0.5)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=100.0, min_magnitude=1e-6,
                          allow_nan=False, allow_infinity=False))
def test_gamma_d_roundtrip(d):
    gamma = d_to_gamma(d)
    dp, dm = gamma_d_maps(gamma)
    assert dp * dm == pytest.approx(-1.0, rel=1e-12, abs=1e-12)
    # gamma-side round trip is well conditioned everywhere
    assert d_to_gamma(dp) == pytest.approx(gamma, rel=1e-12, abs=1e-12)
    assert d_to_gamma(dm) == pytest.approx(gamma, rel=1e-12, abs=1e-12)
    # d-side recovery degrades like sqrt(eps) near the double root d = +-i
    if min(abs(d - 1j), abs(d + 1j)) > 1e-4:
        assert min(abs(dp - d), abs(dm - d)) <= 1e-9 * (1 + abs(d))


def test_example1_sequence_prefix():
    a, delta, h = example1_sequence(9)
    assert a == [1, 3, 5, 7, 11, 15, 19, 23, 29]
    assert delta == [0, 0, 0, 1, 0, 0, 0, 1, 0]
    assert h[:5] == [2, 2, 2, 3, 4]


def test_example1_prefix_determinism():
    a1, d1, h1 = example1_sequence(16)
    a2, d2, h2 = example1_sequence(48)
    assert a2[:16] == a1 and d2[:16] == d1 and h2[:16] == h1


def test_example1_multiplicities_grow():
    _, _, h = example1_sequence(128)
    assert all(v >= 1 for v in h)
    assert all(b >= a for a, b in zip(h, h[1:]))
    # multiplicity level strictly climbs from each dyadic block to the next
    levels = [h[2 ** p - 1] for p in range(2, 8)]
    assert all(b > a for a, b in zip(levels, levels[1:]))
    assert h[-1] >= h[15] + 4    # unbounded-growth trend over the window


def test_example2_modulus_identity():
    atilde, alpha, beta, _ = example2_sequence(64)
    a, _, _ = example1_sequence(64)
    for z, ak in zip(atilde, a):
        assert abs(abs(z) - ak) <= 1e-12 * ak
    assert beta[0] == pytest.approx(0.1)
    assert alpha[0] == pytest.approx(1 - math.sqrt(1 - 0.01))
    assert atilde[0] == pytest.approx(math.sqrt(0.99) + 0.1j)


def test_example2_imaginary_parts_grow_blockwise():
    _, _, beta, _ = example2_sequence(64)
    # constant within a dyadic block, strictly larger in the next block
    blocks = [(3, 4), (5, 8), (9, 16), (17, 32), (33, 64)]
    levels = [max(beta[lo - 1:hi]) for lo, hi in blocks]
    assert all(b > a for a, b in zip(levels, levels[1:]))


def test_product_zero_short_circuit():
    spec = example1_product(64)
    pv = product_eval(spec, 7.0)
    assert pv.value == 0 and pv.zero_multiplicity == 3
    pv = product_eval(spec, -7.0 + 1e-12j)
    assert pv.value == 0 and pv.zero_multiplicity == 3


def test_product_winding_matches_multiplicity():
    spec = example1_product(64)
    fn = lambda pts: product_eval_many(spec, pts)
    a, _, h = example1_sequence(12)
    for k in range(1, 13):
        w = winding_count_circle(fn, complex(a[k - 1]), 0.1, samples=256)
        assert w == h[k - 1]


def test_product_oddness_and_origin():
    spec = example1_product(64, drop_prefix=4, f_form=True)
    for mu in (0.4, 2.3 + 0.8j, 11.7 - 2.0j):
        assert product_eval(spec, mu).value == -product_eval(spec, -mu).value
    assert product_eval(spec, 0.0).value == 0
    eps = 1e-4
    slope = product_eval(spec, eps).value / eps
    assert abs(slope) > 0.1    # simple zero at the origin


def test_product_truncation_guard():
    spec = example1_product(32)
    with pytest.raises(InsufficientTruncationError):
        product_eval(spec, spec.radius_cap + 1.0)


def test_product_tail_bound_shrinks_with_truncation():
    t64 = product_eval(example1_product(64), 20.0 + 0.3j).log_tail_bound
    t256 = product_eval(example1_product(256), 20.0 + 0.3j).log_tail_bound
    assert 0 < t256 < t64


def test_growth_bound_full_product():
    spec = example1_product(64)
    x = np.linspace(0.05, 23.0, 1200)
    gc = growth_bound_check(spec, x, M=6)
    assert gc.bounded
    assert gc.m_empirical is not None
    # dividing by a higher power can only shrink the constant
    gc_hi = growth_bound_check(spec, x, M=8)
    assert gc_hi.c_hat < gc.c_hat


def test_growth_bound_f_form_square_integrable_trend():
    spec = example1_product(256, drop_prefix=4, f_form=True)
    x = np.linspace(0.05, 40.0, 1200)
    gc = growth_bound_check(spec, x, M=0)
    assert gc.bounded


def test_pw_evidence_f1():
    spec = example1_product(256, drop_prefix=4, f_form=True)
    pw = pw_membership_check(spec, 64.0, 20.0)
    assert pw.odd_defect <= 1e-12
    assert len(pw.l2_bands) >= 3
    vals = [v for _, v in pw.l2_bands]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert pw.type_max <= math.pi + 0.1


def test_pw_reading_example2_real_symmetry():
    spec = example2_product(64, drop_prefix=4, f_form=True)
    rng = np.random.default_rng(8)
    mus = rng.uniform(0.3, 20.0, 24) + 1j * rng.uniform(-2, 2, 24)
    f_conj = product_eval_many(spec, np.conj(mus))
    f = product_eval_many(spec, mus)
    assert np.max(np.abs(f_conj - np.conj(f))) <= 1e-10 * np.max(1 + np.abs(f))


def test_nonclassical_report_example1():
    spec = example1_product(64)
    rep = nonclassical_spectrum_report(spec)
    mults = {round(r.mu.real): r.multiplicity for r in rep.records}
    assert [mults[a] for a in (7, 11, 15, 19, 23)] == [3, 4, 4, 4, 5]
    ratios = rep.diagnostics["growth_ratios"]
    assert 1.2 <= min(ratios) and max(ratios) <= 2.2
    seq, decays = multiplicity_sqrt_ratio(rep)
    assert decays


def test_nonclassical_report_example2_im_growth():
    spec = example2_product(32)
    rep = nonclassical_spectrum_report(spec)
    ims = rep.diagnostics["im_growth"]
    assert ims == sorted(ims)
    assert ims[-1] > ims[0]


def test_nonclassical_report_consistency_guard():
    spec = example1_product(64)
    # corrupt one multiplicity: the winding cross-check must catch it
    bad_zeros = ((spec.zeros[0][0], spec.zeros[0][1] + 1),) + spec.zeros[1:]
    bad = dataclasses.replace(spec, zeros=bad_zeros)
    with pytest.raises(InternalConsistencyError):
        nonclassical_spectrum_report(bad)


def test_nonclassical_report_needs_depth():
    with pytest.raises(InvalidInputError):
        nonclassical_spectrum_report(example1_product(8))
