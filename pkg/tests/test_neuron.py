import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evospike.errors import ValidationError
from evospike.neuron import ModelParams, NeuronState, membrane_step, neuron_step, threshold_fire


def params(**kw):
    base = dict(leak_c=0.1, integ_c=0.2, refractory_steps=3, threshold=1.0,
                spont_prob=0.0, inhib_ratio=0.0, density=1)
    base.update(kw)
    return ModelParams(**base)


def reference_euler(v, c_l, c_i, inp):
    return v - c_l * v + c_i * inp


class TestMembraneStep:
    def test_rest_is_fixed_point(self):
        for c_l in (0.0, 0.3, 1.0):
            assert membrane_step(NeuronState(0.0), params(leak_c=c_l), 0.0).potential == 0.0

    @pytest.mark.parametrize("v, inp, expected", [
        (0.5, 2.0, 0.85),   # two excitatory spikes
        (1.0, -1.0, 0.7),   # one inhibitory spike
    ])
    def test_worked_examples(self, v, inp, expected):
        out = membrane_step(NeuronState(v), params(), inp)
        assert out.potential == pytest.approx(expected, abs=1e-12)
        assert out.potential == pytest.approx(reference_euler(v, 0.1, 0.2, inp), abs=1e-15)

    def test_refractory_ignores_input_and_holds_rest(self):
        out = membrane_step(NeuronState(0.0, refractory_remaining=2), params(), 5.0)
        assert out.potential == 0.0
        assert not out.fired

    def test_negative_potential_allowed(self):
        out = membrane_step(NeuronState(0.0), params(), -3.0)
        assert out.potential < 0


class TestThresholdFire:
    def test_fires_at_exact_threshold(self):
        out = threshold_fire(NeuronState(1.0), params(threshold=1.0), 0.99)
        assert out.fired and out.potential == 0.0 and out.refractory_remaining == 3

    def test_silent_below_threshold_without_spontaneous(self):
        assert not threshold_fire(NeuronState(0.0), params(spont_prob=0.0), 0.0).fired

    def test_certain_spontaneous(self):
        out = threshold_fire(NeuronState(0.0), params(spont_prob=1.0, refractory_steps=4), 0.999)
        assert out.fired and out.refractory_remaining == 4

    def test_refractory_blocks_and_counts_down(self):
        out = threshold_fire(NeuronState(5.0, refractory_remaining=2), params(spont_prob=1.0), 0.0)
        assert not out.fired
        assert out.refractory_remaining == 1


def test_params_validation():
    with pytest.raises(ValidationError):
        params(threshold=0.0)
    with pytest.raises(ValidationError):
        params(spont_prob=1.5)
    with pytest.raises(ValidationError):
        params(refractory_steps=-1)


@settings(max_examples=60, deadline=None)
@given(
    c_l=st.floats(0.0, 1.0), c_i=st.floats(0.0, 1.0), refr=st.integers(0, 10),
    thr=st.floats(0.1, 2.0), p=st.floats(0.0, 0.5), seed=st.integers(0, 2**32 - 1),
)
def test_refractory_lockout_property(c_l, c_i, refr, thr, p, seed):
    rng = np.random.default_rng(seed)
    prm = params(leak_c=c_l, integ_c=c_i, refractory_steps=refr, threshold=thr, spont_prob=p)
    state = NeuronState()
    last = None
    for t in range(400):
        entering = state.refractory_remaining
        state = neuron_step(state, prm, float(rng.integers(-2, 4)), rng.random())
        assert state.refractory_remaining <= refr
        if state.fired:
            assert entering == 0
            assert state.potential == 0.0
            if last is not None:
                assert t - last > refr
            last = t


@settings(max_examples=50)
@given(v0=st.floats(0.001, 10.0), c_l=st.floats(0.001, 1.0))
def test_leak_decays_monotonically_to_rest(v0, c_l):
    prm = params(leak_c=c_l, threshold=100.0)
    state = NeuronState(v0)
    prev = v0
    for _ in range(50):
        state = membrane_step(state, prm, 0.0)
        assert 0.0 <= state.potential <= prev
        prev = state.potential


def test_determinism():
    prm = params(spont_prob=0.3)
    a = neuron_step(NeuronState(0.4, 0, False, True), prm, 1.0, 0.25)
    b = neuron_step(NeuronState(0.4, 0, False, True), prm, 1.0, 0.25)
    assert a == b
