import numpy as np
import pytest
from scipy import integrate

from rislink.channel import PathLossModel, single_link_layout
from rislink.impairment import (
    Placement,
    PhaseErrorSpec,
    apply_phase_error,
    normalized_gain_experiment,
    normalized_gain_samples,
    perturbed_phases,
)
from rislink.numerics import ParameterError, RngStream
from rislink.ris import QuantizationSpec, RisState, quantize_phases

LAYOUT = single_link_layout()
PL = PathLossModel()


def mean_phasor_power(delta):
    """|E exp(i eps)|^2 for eps ~ U(0, delta), by quadrature."""
    re = integrate.quad(np.cos, 0, delta)[0] / delta
    im = integrate.quad(np.sin, 0, delta)[0] / delta
    return re**2 + im**2


def test_zero_mismatch_is_identity(gen):
    opt = gen.uniform(0.1, 6.2, 32)
    s = apply_phase_error(opt, PhaseErrorSpec(0.0), gen)
    np.testing.assert_allclose(s.phases, opt)
    sq = apply_phase_error(opt, PhaseErrorSpec(0.0, bits=2), gen)
    np.testing.assert_allclose(sq.phases, quantize_phases(opt, QuantizationSpec(2)))


def test_error_is_one_sided_uniform():
    opt = np.full(200_000, 3.0)
    s = apply_phase_error(opt, PhaseErrorSpec(np.pi / 3), RngStream(3))
    err = s.phases - 3.0
    assert err.min() >= 0 and err.max() < np.pi / 3
    assert err.mean() == pytest.approx(np.pi / 6, abs=3e-3)
    g = apply_phase_error(opt, PhaseErrorSpec(np.pi / 3, Placement.G_ONLY), RngStream(3))
    np.testing.assert_allclose(3.0 - g.phases, err)


def test_quantized_error_applied_before_quantization():
    opt = np.array([1.5, 3.0, 4.6])
    spec = PhaseErrorSpec(0.8, bits=2)
    s = apply_phase_error(opt, spec, RngStream(11))
    u = RngStream(11).generator().random(3)
    expected = quantize_phases(opt + 0.8 * u, QuantizationSpec(2))
    np.testing.assert_allclose(s.phases, expected)
    assert s.quantization.bits == 2


def test_quantized_state_input_rejected():
    s = RisState.from_phases([1.0, 2.0], quantization=QuantizationSpec(2))
    with pytest.raises(ParameterError):
        apply_phase_error(s, PhaseErrorSpec(0.3, bits=2), RngStream(1))


def test_spec_validation():
    with pytest.raises(ParameterError):
        PhaseErrorSpec(-0.1)
    with pytest.raises(ParameterError):
        PhaseErrorSpec(2 * np.pi)
    with pytest.raises(ValueError):
        PhaseErrorSpec(0.1, placement="both")


@pytest.mark.parametrize("bits", [0, 2])
def test_zero_delta_gain_is_exactly_one(bits):
    r = normalized_gain_experiment(LAYOUT, PL, PhaseErrorSpec(0.0, bits=bits), n_elements=64, trials=50, rng=RngStream(1))
    assert r.mean_normalized_gain == 1.0
    assert r.std == 0.0


@pytest.mark.parametrize("delta,tol", [(np.pi / 3, 0.01), (np.pi, 0.02)])
def test_large_n_gain_matches_quadrature(delta, tol):
    r = normalized_gain_experiment(LAYOUT, PL, PhaseErrorSpec(delta), n_elements=1024, trials=2000, rng=RngStream(2))
    assert r.mean_normalized_gain == pytest.approx(mean_phasor_power(delta), abs=tol)


def test_placements_agree():
    delta = np.pi / 2
    res = {
        p: normalized_gain_samples(LAYOUT, PL, PhaseErrorSpec(delta, p), 2000, RngStream(5 + i), n_elements=256)
        for i, p in enumerate(Placement)
    }
    means = {p: v.mean() for p, v in res.items()}
    for p in Placement:
        se = np.sqrt(res[p].var() / res[p].size + res[Placement.CASCADED].var() / res[Placement.CASCADED].size)
        assert abs(means[p] - means[Placement.CASCADED]) < 4 * se


def test_g_only_mirrors_cascaded_under_common_draws():
    a = normalized_gain_samples(LAYOUT, PL, PhaseErrorSpec(1.0, Placement.CASCADED), 40, RngStream(9), n_elements=32)
    b = normalized_gain_samples(LAYOUT, PL, PhaseErrorSpec(1.0, Placement.G_ONLY), 40, RngStream(9), n_elements=32)
    # Conjugate error pattern with real non-negative summands: identical magnitudes.
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_gain_non_increasing_over_sweep():
    deltas = [0, np.pi / 6, np.pi / 3, np.pi / 2, np.pi]
    means = [
        normalized_gain_experiment(LAYOUT, PL, PhaseErrorSpec(d), n_elements=512, trials=500, rng=RngStream(4)).mean_normalized_gain
        for d in deltas
    ]
    assert all(a >= b for a, b in zip(means, means[1:]))


def test_perturbed_phases_sign():
    opt = np.array([1.0])
    u = np.array([0.5])
    assert perturbed_phases(opt, PhaseErrorSpec(0.4, Placement.CASCADED), u)[0] == pytest.approx(1.2)
    assert perturbed_phases(opt, PhaseErrorSpec(0.4, Placement.H_ONLY), u)[0] == pytest.approx(0.8)


def test_experiment_requires_rng():
    with pytest.raises(ParameterError):
        normalized_gain_experiment(LAYOUT, PL, PhaseErrorSpec(0.1), n_elements=8, trials=3)
