import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slspec import bc
from slspec.bc import BcKind, BcMatrix, canonical_form, classify
from slspec.errors import DegenerateMatrixError, InvalidInputError

FIXTURES = {
    "dirichlet": bc.dirichlet(),
    "neumann": bc.neumann(),
    "periodic": bc.periodic(),
    "antiperiodic": bc.antiperiodic(),
    "type2": bc.type2(1.0),
    "irregular": bc.irregular_a0(1.0),
    "degenerate1": bc.degenerate_d(1.0),
    "degenerate2": bc.degenerate_d(2.0),
}

EXPECTED_KIND = {
    "dirichlet": (BcKind.STRENGTHENED_REGULAR, None, None),
    "neumann": (BcKind.STRENGTHENED_REGULAR, None, None),
    "periodic": (BcKind.REGULAR_NOT_STRENGTHENED, 0, "I"),
    "antiperiodic": (BcKind.REGULAR_NOT_STRENGTHENED, 1, "I"),
    "type2": (BcKind.REGULAR_NOT_STRENGTHENED, 0, "II"),
    "irregular": (BcKind.IRREGULAR, None, None),
    "degenerate1": (BcKind.DEGENERATE, None, None),
    "degenerate2": (BcKind.DEGENERATE, None, None),
}


def test_minors_dirichlet():
    m = bc.dirichlet().minors()
    assert m["A34"] == 1
    assert all(m[k] == 0 for k in m if k != "A34")


def test_minors_neumann():
    m = bc.neumann().minors()
    assert m["A12"] == 1
    assert all(m[k] == 0 for k in m if k != "A12")


def test_minors_periodic():
    m = bc.periodic().minors()
    assert m == {"A12": 0, "A13": 1, "A14": -1, "A23": -1, "A24": 1, "A34": 0}


def test_dependent_rows_rejected():
    A = BcMatrix([[1, 2, 3, 4], [2, 4, 6, 8]])
    with pytest.raises(DegenerateMatrixError):
        A.minors()


def test_bad_shape_rejected():
    with pytest.raises(InvalidInputError):
        BcMatrix([[1, 2, 3], [4, 5, 6]])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3), min_size=8, max_size=8),
       st.lists(st.floats(-5, 5), min_size=8, max_size=8))
def test_plucker_identity(re, im):
    A = BcMatrix(np.asarray(re).reshape(2, 4) + 1j * np.asarray(im).reshape(2, 4))
    try:
        assert A.plucker_residual() <= 1e-12
    except DegenerateMatrixError:
        pass


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_classify_fixture(name):
    kind, theta, subtype = EXPECTED_KIND[name]
    cls = classify(FIXTURES[name])
    assert cls.kind is kind
    if theta is not None:
        assert cls.theta == theta
    if subtype is not None:
        assert cls.subtype == subtype


def test_classify_dirichlet_neumann_mixed():
    # u(0) = 0, u'(pi) = 0 also sits in the strengthened-regular class
    A = BcMatrix([[0, 0, 1, 0], [0, 1, 0, 0]])
    assert classify(A).kind is BcKind.STRENGTHENED_REGULAR


def test_classify_irregular_variants():
    cls = classify(bc.irregular_a0(1.0))
    assert cls.variant == 3
    assert cls.params["a0"] == pytest.approx(1.0)
    # first canonical irregular matrix: (1, s, 0, b0 / 0, 0, 1, -s)
    cls = classify(BcMatrix([[1, 1, 0, 2.5], [0, 0, 1, -1]]))
    assert cls.kind is BcKind.IRREGULAR and cls.variant == 1
    assert cls.params["b0"] == pytest.approx(2.5)
    # second canonical irregular matrix, b1 != +-1
    cls = classify(BcMatrix([[1, 3, 0, 1.5], [0, 0, 1, -3]]))
    assert cls.kind is BcKind.IRREGULAR and cls.variant == 2
    assert cls.params["b1"] == pytest.approx(3.0)
    assert cls.params["b0"] == pytest.approx(1.5)


def test_classify_degenerate_params():
    cls = classify(bc.degenerate_d(2.0))
    assert cls.params["d"] == pytest.approx(2.0)
    assert cls.variant == 1
    # d = 0 and the terminal-data matrix are Cauchy-like
    assert classify(bc.degenerate_d(0.0)).variant == 2
    assert classify(BcMatrix([[0, 1, 0, 0], [0, 0, 0, 1]])).variant == 2


def test_classify_tolerance_validation():
    with pytest.raises(InvalidInputError):
        classify(bc.dirichlet(), tol=0.0)


def _random_invertible(rng):
    while True:
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(M)) > 0.1:
            return M


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_row_operation_invariance(name):
    rng = np.random.default_rng(42)
    base = classify(FIXTURES[name])
    for _ in range(100):
        M = _random_invertible(rng)
        cls = classify(BcMatrix(M @ FIXTURES[name].rows))
        assert cls.kind is base.kind
        assert cls.theta == base.theta
        assert cls.subtype == base.subtype
        assert cls.variant == base.variant


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_classification_exhaustive_and_unique(seed):
    rng = np.random.default_rng(seed)
    A = BcMatrix(rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4)))
    cls = classify(A)          # must land in exactly one taxonomy bucket
    assert cls.kind in BcKind


def test_canonical_antiperiodic():
    canon = canonical_form(bc.antiperiodic())
    assert np.allclose(canon.rows, [[1, 1, 0, 0], [0, 0, 1, 1]])


def test_canonical_type2_a14():
    canon = canonical_form(BcMatrix([[1, -1, 0, 5], [0, 0, 1, -1]]))
    cls = classify(BcMatrix([[1, -1, 0, 5], [0, 0, 1, -1]]))
    assert cls.params["a14"] == pytest.approx(5.0)
    assert np.allclose(canon.rows, [[1, -1, 0, 5], [0, 0, 1, -1]])


def test_canonical_degenerate_scaling():
    d = 2.0
    A = BcMatrix([[2, 2 * d, 0, 0], [0, 0, 3, -3 * d]])
    cls = classify(A)
    assert cls.kind is BcKind.DEGENERATE
    assert cls.params["d"] == pytest.approx(d)
    assert np.allclose(cls.canonical_matrix.rows, [[1, d, 0, 0], [0, 0, 1, -d]])


def test_canonical_strengthened_returns_input():
    A = bc.dirichlet()
    assert canonical_form(A) is A


def test_canonical_respects_row_ops():
    rng = np.random.default_rng(7)
    A = bc.degenerate_d(1.5 + 0.25j)
    for _ in range(10):
        M = _random_invertible(rng)
        canon = canonical_form(BcMatrix(M @ A.rows))
        assert np.allclose(canon.rows, A.rows)


def test_bc_json_roundtrip():
    doc = {"rows": [[[0, 0], [0, 0], [1, 0], [0, 0]],
                    [[0, 0], [0, 0], [0, 0], [1, 0]]]}
    A = BcMatrix.from_json(doc)
    assert classify(A).kind is BcKind.STRENGTHENED_REGULAR
    out = classify(A).to_json_dict()
    assert out["kind"] == "StrengthenedRegular"
    assert out["minors"]["A34"] == [1.0, 0.0]


def test_classify_json_reports_parameters():
    out = classify(bc.degenerate_d(2.0)).to_json_dict()
    assert out["parameters"]["d"] == [2.0, 0.0]
    assert out["canonical_matrix"][0][1] == [2.0, 0.0]
