import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import SWEEP
from gkp_crosstalk.channel import (
    CrosstalkParams,
    DiscreteState,
    basis_state,
    build_multiplexed_epr_state,
    build_output_state,
    build_symmetric_output,
    gauge_group_order,
    output_basis_index,
    perfect_transmission_check,
    relabel_table,
    transform_displacement,
    verify_gauge_factorization,
)
from gkp_crosstalk.errors import InadmissibleEtaError, InvalidStateError, TooLargeError
from gkp_crosstalk.modular import eta_for
from gkp_crosstalk.phase_space import PhaseVector, symplectic_form

DATA = Path(__file__).parent / "data"
SUPPORT_MU1_NU0 = {(5, 0), (9, 2), (3, 4), (7, 6), (1, 8)}


def test_sweep_is_large_enough():
    assert len(SWEEP) >= 30


# phase-space picture

def test_transform_balanced_single_mode():
    a = PhaseVector(1.3, -0.4)
    l1, l2 = transform_displacement(a, PhaseVector(0, 0), 0.5)
    assert l1.q == pytest.approx(a.q / math.sqrt(2)) and l1.p == pytest.approx(a.p / math.sqrt(2))
    assert l2.q == pytest.approx(-a.q / math.sqrt(2)) and l2.p == pytest.approx(-a.p / math.sqrt(2))


def test_transform_nearly_transparent():
    a, b = PhaseVector(0.7, 2.0), PhaseVector(-1.1, 0.3)
    l1, l2 = transform_displacement(a, b, 1 - 1e-12)
    assert (l1 - a).norm_inf() < 1e-5 and (l2 - b).norm_inf() < 1e-5


@pytest.mark.parametrize("eta", [0, 1, -0.2, 1.5])
def test_transform_rejects_eta(eta):
    with pytest.raises(ValueError):
        transform_displacement(PhaseVector(0, 0), PhaseVector(0, 0), eta)


def test_transform_preserves_summed_symplectic_form():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a, a2, b, b2 = (PhaseVector(*rng.normal(0, 3, 2)) for _ in range(4))
        eta = 0.3
        l1, l2 = transform_displacement(a, b, eta)
        m1, m2 = transform_displacement(a2, b2, eta)
        before = symplectic_form(a, a2) + symplectic_form(b, b2)
        after = symplectic_form(l1, m1) + symplectic_form(l2, m2)
        assert abs(after - before) <= 1e-9


# parameters

def test_paper_example_params(qubit_params):
    p = qubit_params
    assert (p.n, p.r1, p.r2, p.alpha1, p.alpha2) == (5, 4, 2, 1, 1)


def test_qunaught_params():
    p = perfect_transmission_check(Fraction(1, 2), 1, 1)
    assert (p.n, p.r1, p.r2) == (2, 1, 1)


def test_inadmissible_eta_returns_none():
    assert perfect_transmission_check(Fraction(37, 100), 2, 2) is None
    # brute force: no coprime representation among q, p <= 200
    hits = [
        (q, p) for q in range(1, 201) for p in range(1, 201)
        if Fraction(q, q + 4 * p) == Fraction(37, 100) and math.gcd(q, 4 * p) == 1
    ]
    assert hits == []
    with pytest.raises(InadmissibleEtaError, match="gcd"):
        CrosstalkParams.from_eta(Fraction(37, 100), 2, 2)


def test_perfect_transmission_rejects_out_of_range():
    with pytest.raises(ValueError):
        perfect_transmission_check(Fraction(1), 2, 2)


@pytest.mark.parametrize("params", SWEEP, ids=str)
def test_params_invariants(params):
    dd = params.d1 * params.d2
    assert params.n == params.q + params.p * dd
    assert params.alpha1 * params.q + params.beta1 * params.p * dd == 1
    assert params.alpha2 * params.q + params.beta2 * params.p * dd == 1
    assert math.gcd(params.r1 % params.n, params.n) == 1
    assert math.gcd(params.r2 % params.n, params.n) == 1
    assert params.eta == eta_for(params.q, params.p, params.d1, params.d2)


def test_params_reject_broken_bezout(qubit_params):
    fields = {k: getattr(qubit_params, k) for k in qubit_params.__dataclass_fields__}
    with pytest.raises(ValueError, match="Bezout"):
        CrosstalkParams(**{**fields, "alpha1": 2})
    with pytest.raises(ValueError, match="gauge steps"):
        CrosstalkParams(**{**fields, "r1": 3})
    with pytest.raises(ValueError):
        CrosstalkParams(**{**fields, "n": 6})


# discrete picture

def test_output_basis_index_examples(qubit_params):
    assert output_basis_index(1, 0, 1, qubit_params) == 5
    assert output_basis_index(0, 3, 2, qubit_params) == 6
    assert output_basis_index(1, 2, 1, qubit_params) == 3


@pytest.mark.parametrize("mu, j, mode", [(2, 0, 1), (-1, 0, 2), (0, 5, 1), (0, 0, 3)])
def test_output_basis_index_range(qubit_params, mu, j, mode):
    with pytest.raises(ValueError):
        output_basis_index(mu, j, mode, qubit_params)


def test_output_state_support(qubit_params):
    s00 = build_output_state(0, 0, qubit_params)
    assert set(s00.support()) == {(0, 0), (4, 2), (8, 4), (2, 6), (6, 8)}
    s10 = build_output_state(1, 0, qubit_params)
    assert set(s10.support()) == SUPPORT_MU1_NU0
    for idx in s10.support():
        assert s10.amplitude(*idx) == pytest.approx(1 / math.sqrt(5), abs=1e-12)


def test_output_state_matches_golden_file(qubit_params):
    golden = DiscreteState.from_json(json.loads((DATA / "output_d2_eta1_5_mu1_0.json").read_text()))
    assert build_output_state(1, 0, qubit_params).allclose(golden, 1e-12)


def test_json_roundtrip(qubit_params):
    s = build_output_state(1, 1, qubit_params)
    text = json.dumps(s.to_json())
    back = DiscreteState.from_json(json.loads(text))
    assert back.dims == (10, 10) and back.allclose(s, 0)


@pytest.mark.parametrize("params", SWEEP, ids=str)
def test_output_dims_and_support_size(params):
    for mu1 in range(params.d1):
        for mu2 in range(params.d2):
            s = build_output_state(mu1, mu2, params)
            assert s.dims == (params.n * params.d1, params.n * params.d2)
            assert len(s.support()) == params.n
            assert abs(s.norm - 1) < 1e-12


@pytest.mark.parametrize(
    "params", [p for p in SWEEP if p.d1 >= 2 and p.d2 >= 2], ids=str
)
def test_logical_orthogonality(params):
    labels = [(a, b) for a in range(params.d1) for b in range(params.d2)]
    states = {lab: build_output_state(*lab, params) for lab in labels}
    for x in labels:
        for y in labels:
            expected = 1.0 if x == y else 0.0
            assert abs(states[x].inner(states[y]) - expected) <= 1e-12


def test_symmetric_corollary_agrees(qubit_params):
    for mu1 in range(2):
        for mu2 in range(2):
            a = build_output_state(mu1, mu2, qubit_params)
            b = build_symmetric_output(mu1, mu2, 2, qubit_params)
            assert a.allclose(b, 1e-15)


def test_symmetric_d3_index():
    params = CrosstalkParams.from_eta(Fraction(1, 10), 3, 3)
    assert params.n == 10
    assert output_basis_index(2, 1, 1, params) == 29
    s = build_symmetric_output(2, 0, 3, params)
    assert abs(s.amplitude(29, 3)) == pytest.approx(1 / math.sqrt(10))
    assert s.allclose(build_output_state(2, 0, params), 1e-15)


def test_symmetric_qunaught_is_bell_pair():
    params = CrosstalkParams.from_eta(Fraction(1, 2), 1, 1)
    s = build_symmetric_output(0, 0, 1, params)
    np.testing.assert_allclose(s.tensor, np.eye(2) / math.sqrt(2), atol=1e-15)


def test_symmetric_rejects_general_params():
    params = CrosstalkParams.from_qp(1, 2, 2, 2)
    with pytest.raises(ValueError):
        build_symmetric_output(0, 0, 2, params)


def test_multiplexed_epr_state(qubit_params):
    s = build_multiplexed_epr_state(qubit_params)
    assert s.dims == (2, 10, 2, 10)
    expected = {
        (mu, (5 * mu + 4 * j) % 10, nu, (5 * nu + 2 * j) % 10)
        for mu in range(2) for nu in range(2) for j in range(5)
    }
    assert set(s.support()) == expected and len(expected) == 20
    for idx in expected:
        assert abs(s.amplitude(*idx) - 1 / (2 * math.sqrt(5))) <= 1e-12
    assert abs(s.norm - 1) <= 1e-12


def test_epr_retained_halves_are_maximally_mixed(qubit_params):
    t = build_multiplexed_epr_state(qubit_params).tensor
    # trace out A' (axis 1) and B' (axis 3)
    rho = np.einsum("axby,cxdy->abcd", t, t.conj()).reshape(4, 4)
    np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-12)


def test_multiplexed_epr_size_guard():
    big = CrosstalkParams.from_qp(1, 7, 7, 7)
    with pytest.raises(TooLargeError):
        build_multiplexed_epr_state(big)


@pytest.mark.parametrize("params", SWEEP, ids=str)
def test_gauge_factorization_sweep(params):
    for mu1 in range(params.d1):
        for mu2 in range(params.d2):
            assert verify_gauge_factorization(build_output_state(mu1, mu2, params), mu1, mu2, params)


def test_gauge_factorization_rejects_wrong_labels(qubit_params):
    s = build_output_state(1, 0, qubit_params)
    assert not verify_gauge_factorization(s, 0, 0, qubit_params)


def test_gauge_factorization_rejects_phase_flip(qubit_params):
    t = build_output_state(1, 1, qubit_params).tensor.copy()
    x, y = build_output_state(1, 1, qubit_params).support()[0]
    t[x, y] *= -1
    assert not verify_gauge_factorization(DiscreteState.from_tensor(t), 1, 1, qubit_params)


def test_gauge_factorization_rejects_product_state(qubit_params):
    s = basis_state((10, 10), (0, 0))
    assert not verify_gauge_factorization(s, 0, 0, qubit_params)


def test_gauge_factorization_dims_mismatch(qubit_params):
    with pytest.raises(ValueError):
        verify_gauge_factorization(basis_state((4, 4), (0, 0)), 0, 0, qubit_params)


@pytest.mark.parametrize("params", SWEEP, ids=str)
def test_relabeling_is_bijective(params):
    for mode in (1, 2):
        table = relabel_table(mode, params)
        assert np.all(table >= 0)
        assert len({tuple(r) for r in table}) == params.n * params.dim(mode)


def test_gauge_group_order_examples(qubit_params):
    assert gauge_group_order(qubit_params) == 5
    assert gauge_group_order(CrosstalkParams.from_eta(Fraction(1, 2), 1, 1)) == 2


@pytest.mark.parametrize("params", SWEEP, ids=str)
def test_gauge_group_order_is_n(params):
    assert gauge_group_order(params) == params.n


def test_discrete_state_validation():
    with pytest.raises(InvalidStateError):
        DiscreteState((2, 2), [1, 1, 0, 0])
    with pytest.raises(InvalidStateError):
        DiscreteState((2, 2, 2), [1, 0, 0, 0, 0, 0, 0, 0])
    with pytest.raises(InvalidStateError):
        DiscreteState((2, 2), [1, 0, 0])
    s = DiscreteState((2, 2), [1, 0, 0, 0])
    with pytest.raises(ValueError):
        s.amps[0] = 0
