import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rislink.channel import ChannelRealization
from rislink.numerics import ParameterError
from rislink.ris import (
    AmplitudeModel,
    DegenerateChannelError,
    QuantizationSpec,
    RisState,
    amplitude,
    cascade_gain,
    cascade_response,
    effective_channels,
    optimal_phases,
    quantize_phases,
    received_signal_power,
    wrap_phase,
)

TWO_PI = 2 * np.pi
PRACTICAL = AmplitudeModel(mode="practical")
angles = st.floats(-20, 20, allow_nan=False)


def _random_channel(gen, n, m=1, k=1):
    def c(*shape):
        return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)

    return ChannelRealization(c(k, m), c(n, m), c(k, n))


def test_amplitude_extremes():
    m = PRACTICAL
    assert amplitude(m, m.phi + np.pi / 2) == pytest.approx(1.0)
    assert amplitude(m, m.phi - np.pi / 2) == pytest.approx(0.8)
    assert amplitude(AmplitudeModel(), 1.234) == 1.0


def test_amplitude_rejects_bad_alpha():
    with pytest.raises(ParameterError):
        AmplitudeModel(alpha=0.0, mode="practical")
    with pytest.raises(ParameterError):
        amplitude(AmplitudeModel(alpha=-1.0), 0.3) if False else AmplitudeModel(alpha=-1.0, mode="practical")


@given(angles)
def test_amplitude_bounded_and_periodic(theta):
    b = amplitude(PRACTICAL, theta)
    assert 0.8 - 1e-12 <= b <= 1.0 + 1e-12
    assert amplitude(PRACTICAL, theta + TWO_PI) == pytest.approx(b, abs=1e-9)


@given(angles)
def test_wrap_phase_domain(theta):
    w = wrap_phase(theta)
    assert 0 < w <= TWO_PI
    assert np.cos(w) == pytest.approx(np.cos(theta), abs=1e-9)


def test_wrap_zero_is_two_pi():
    assert wrap_phase(0.0) == TWO_PI
    assert wrap_phase(TWO_PI) == TWO_PI


def test_optimal_phase_examples():
    # Entry of g^H is exp(i*pi/4), i.e. g = exp(-i*pi/4); h = exp(i*pi/4).
    g = np.array([np.exp(-1j * np.pi / 4)])
    h = np.array([np.exp(1j * np.pi / 4)])
    assert optimal_phases(g, h)[0] == pytest.approx(3 * np.pi / 2)
    np.testing.assert_allclose(optimal_phases(np.ones(5), np.full(5, 2.0)), TWO_PI)


def test_optimal_phases_degenerate():
    with pytest.raises(DegenerateChannelError):
        optimal_phases(np.array([1.0, 0.0]), np.ones(2))
    with pytest.raises(ParameterError):
        optimal_phases(np.ones(3), np.ones(2))


@pytest.mark.parametrize("n", [1, 7, 256])
def test_optimal_phases_coherent(gen, n):
    g = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    h = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    th = optimal_phases(g, h)
    terms = np.conj(g) * np.exp(1j * th) * h
    np.testing.assert_allclose(terms.imag, 0, atol=1e-12 * np.abs(terms).max())
    assert np.all(terms.real >= 0)
    brute = np.sum(np.abs(g) * np.abs(h))
    assert abs(cascade_gain(g, np.exp(1j * th), h)) == pytest.approx(brute, rel=1e-12)


def test_optimal_phases_with_reference(gen):
    g = gen.standard_normal(9) + 1j * gen.standard_normal(9)
    h = gen.standard_normal(9) + 1j * gen.standard_normal(9)
    c = cascade_gain(g, np.exp(1j * optimal_phases(g, h, 1.1)), h)
    assert np.angle(c) == pytest.approx(1.1)


def test_random_phases_never_beat_optimum(gen):
    n = 32
    g = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    h = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    best = abs(cascade_gain(g, np.exp(1j * optimal_phases(g, h)), h))
    trial = np.abs(cascade_gain(g, np.exp(1j * gen.uniform(0, TWO_PI, (10_000, n))), h))
    assert trial.max() <= best * (1 + 1e-12)


def test_quantize_examples():
    q2 = QuantizationSpec(2)
    assert quantize_phases(0.1, q2) == pytest.approx(TWO_PI)
    assert quantize_phases(3 * np.pi / 4, q2) == pytest.approx(np.pi / 2)
    x = np.array([0.3, 2.0, 6.0])
    np.testing.assert_allclose(quantize_phases(x, QuantizationSpec(0)), x)
    np.testing.assert_allclose(q2.levels, [np.pi / 2, np.pi, 3 * np.pi / 2, TWO_PI])


@settings(max_examples=200)
@given(angles, st.integers(1, 5))
def test_quantize_nearest_level_brute_force(theta, bits):
    spec = QuantizationSpec(bits)
    got = quantize_phases(theta, spec)
    levels = [TWO_PI * k / 2**bits for k in range(1, 2**bits + 1)]
    dists = [abs((theta - lv + np.pi) % TWO_PI - np.pi) for lv in levels]
    assert got in levels
    assert abs((theta - got + np.pi) % TWO_PI - np.pi) <= min(dists) + 1e-9
    assert min(dists) <= np.pi / 2**bits + 1e-9


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_quantization_never_beats_continuous(seed, bits):
    gen = np.random.default_rng(seed)
    n = 16
    g = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    h = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    th = optimal_phases(g, h)
    cont = abs(cascade_gain(g, np.exp(1j * th), h))
    quant = abs(cascade_gain(g, np.exp(1j * quantize_phases(th, QuantizationSpec(bits))), h))
    assert quant <= cont * (1 + 1e-12)


def test_ris_state_invariants():
    with pytest.raises(ParameterError):
        RisState(np.array([0.0, 1.0]))
    with pytest.raises(ParameterError):
        RisState(np.array([1.0]), quantization=QuantizationSpec(2))
    s = RisState.from_phases([0.1, 3.0], quantization=QuantizationSpec(2))
    np.testing.assert_allclose(s.phases, [TWO_PI, np.pi])


def test_cascade_single_element_is_real():
    g = np.array([[2 * np.exp(0.7j)]])
    h = np.array([[0.5 * np.exp(-1.9j)]])
    r = ChannelRealization(np.zeros((1, 1), complex), h, g)
    s = RisState(optimal_phases(g[0], h[:, 0]))
    out = cascade_response(r, s)
    assert out[0].real == pytest.approx(1.0)
    assert out[0].imag == pytest.approx(0.0, abs=1e-14)


def test_relay_phases_give_plain_inner_product(gen):
    r = _random_channel(gen, 12)
    s = RisState(np.full(12, TWO_PI))
    expected = np.sum(np.conj(r.ris_to_actuator[0]) * r.bs_to_ris[:, 0])
    assert cascade_response(r, s)[0] == pytest.approx(expected)


@pytest.mark.parametrize("model", [AmplitudeModel(), PRACTICAL])
def test_cascade_matches_explicit_diagonal_product(gen, model):
    r = _random_channel(gen, 20, m=3, k=2)
    s = RisState.from_phases(gen.uniform(0, TWO_PI, 20), model)
    theta = np.diag(amplitude(model, s.phases) * np.exp(1j * s.phases))
    for k in range(2):
        brute = r.ris_to_actuator[k].conj()[None, :] @ theta @ r.bs_to_ris
        np.testing.assert_allclose(cascade_response(r, s, k), brute[0], rtol=1e-12)
    rows = effective_channels(r, s)
    np.testing.assert_allclose(rows[1], cascade_response(r, s, 1) + r.direct[1], rtol=1e-12)


def test_cascade_dimension_mismatch(gen):
    r = _random_channel(gen, 8)
    with pytest.raises(ParameterError):
        cascade_response(r, RisState(np.ones(5)))
    with pytest.raises(ParameterError):
        cascade_response(r, RisState(np.ones(8)), actuator_index=3)


def test_received_power_coherent(gen):
    r = _random_channel(gen, 64)
    r = ChannelRealization(np.zeros((1, 1), complex), r.bs_to_ris, r.ris_to_actuator)
    s = RisState(optimal_phases(r.ris_to_actuator[0], r.bs_to_ris[:, 0]))
    expected = np.sum(np.abs(r.ris_to_actuator[0]) * np.abs(r.bs_to_ris[:, 0])) ** 2
    assert received_signal_power(r, s) == pytest.approx(expected, rel=1e-12)


def test_received_power_zero_amplitude_leaves_direct(gen):
    r = _random_channel(gen, 10)
    off = AmplitudeModel(beta_min=0.0, alpha=1.0, mode="practical")
    # sin(theta - phi) = -1 makes beta exactly beta_min = 0.
    s = RisState.from_phases(np.full(10, off.phi - np.pi / 2), off)
    assert received_signal_power(r, s) == pytest.approx(abs(r.direct[0, 0]) ** 2, rel=1e-12)


def test_received_power_matches_signal_model(gen):
    r = _random_channel(gen, 30)
    s = RisState.from_phases(gen.uniform(0, TWO_PI, 30), PRACTICAL)
    f = r.direct[0, 0]
    g = r.ris_to_actuator[0]
    h = r.bs_to_ris[:, 0]
    beta = amplitude(PRACTICAL, s.phases)
    y = f + sum(np.conj(g[n]) * beta[n] * np.exp(1j * s.phases[n]) * h[n] for n in range(30))
    assert received_signal_power(r, s) == pytest.approx(abs(y) ** 2, rel=1e-12)
    assert received_signal_power(r, s, include_direct=False) == pytest.approx(abs(y - f) ** 2, rel=1e-12)
