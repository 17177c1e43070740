import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_plate.atoms import (
    AtomSpec,
    StaticAtom,
    Transition,
    alpha_dynamic,
    alpha_imag,
    alpha_static,
    far_zone,
    load_atom,
    save_atom,
)
from casimir_plate.errors import InvalidAtom, InvalidConfig, PoleProximity

ONE = AtomSpec((Transition(1.0, 1.0),), label="one")

transitions = st.lists(
    st.tuples(st.floats(1e-2, 1e2), st.floats(1e-3, 1e2)), min_size=1, max_size=5
)


def test_single_transition_examples():
    assert alpha_dynamic(ONE, 0.0) == pytest.approx(2 / 3, rel=1e-15)
    assert alpha_imag(ONE, 0.0) == pytest.approx(2 / 3, rel=1e-15)
    assert alpha_imag(ONE, 1.0) == pytest.approx(1 / 3, rel=1e-15)
    assert alpha_imag(ONE, 100.0) == pytest.approx((2 / 3) / 10001, rel=1e-4)
    assert alpha_static(ONE) == pytest.approx(2 / 3, rel=1e-15)
    assert alpha_static(AtomSpec(((2.0, 1.0),))) == pytest.approx(1 / 3, rel=1e-15)


def test_two_transitions_static():
    atom = AtomSpec(((2.0, 3.0), (1.0, 1.0)))
    # hand sum: (2/3)(1*1/1 + 2*3/4)
    assert alpha_static(atom) == pytest.approx(5 / 3, rel=1e-15)
    assert [t.k for t in atom.transitions] == [1.0, 2.0]


def test_pole_guard():
    with pytest.raises(PoleProximity) as exc:
        alpha_dynamic(ONE, 1.0)
    assert exc.value.k_p0 == 1.0
    with pytest.raises(PoleProximity):
        alpha_dynamic(ONE, 1.0 + 5e-7)
    assert np.isfinite(alpha_dynamic(ONE, 1.0 + 2e-6))
    loose = AtomSpec(ONE.transitions, pole_guard=1e-2)
    with pytest.raises(PoleProximity):
        loose.alpha_dynamic(np.array([0.5, 0.995]))


@pytest.mark.parametrize(
    "bad",
    [(), ((0.0, 1.0),), ((-1.0, 1.0),), ((math.inf, 1.0),), ((1.0, -1.0),), ((1.0, 0.0), (2.0, 0.0))],
)
def test_invalid_atoms(bad):
    with pytest.raises(InvalidAtom):
        AtomSpec(bad)


def test_static_atom():
    a = StaticAtom(2.5)
    assert a.alpha_static() == a.alpha_imag(7.0) == a.alpha_dynamic(3.0) == 2.5
    assert np.array_equal(a.alpha_imag(np.arange(3.0)), [2.5, 2.5, 2.5])
    assert far_zone(a) is a
    assert far_zone(ONE).alpha0 == pytest.approx(2 / 3)
    with pytest.raises(InvalidAtom):
        StaticAtom(0.0)


@given(transitions)
def test_zero_frequency_consistency(trans):
    atom = AtomSpec(tuple(trans))
    a0 = atom.alpha_static()
    assert atom.alpha_imag(0.0) == pytest.approx(a0, rel=1e-15)
    assert atom.alpha_dynamic(0.0) == pytest.approx(a0, rel=1e-15)
    assert a0 > 0


@given(transitions)
def test_imaginary_axis_monotone(trans):
    atom = AtomSpec(tuple(trans))
    u = np.concatenate([[0.0], np.geomspace(1e-4, 1e3, 300)])
    vals = atom.alpha_imag(u)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) <= 0)
    # u^2 alpha(iu) -> (2/3) sum k mu2 at large u
    tail = 2 / 3 * sum(t.k * t.mu2 for t in atom.transitions)
    k_max = atom.transitions[-1].k
    assert vals[-1] * u[-1] ** 2 == pytest.approx(tail, rel=2 * (k_max / u[-1]) ** 2 + 1e-14)


@given(transitions, st.floats(0.01, 0.99))
def test_enhanced_below_first_resonance(trans, frac):
    atom = AtomSpec(tuple(trans))
    k = frac * atom.transitions[0].k
    assert atom.alpha_dynamic(k) > atom.alpha_static()


@given(transitions)
def test_json_round_trip(tmp_path_factory, trans):
    atom = AtomSpec(tuple(trans), label="x")
    path = tmp_path_factory.mktemp("atoms") / "a.json"
    save_atom(atom, path)
    back = load_atom(path)
    assert back.transitions == atom.transitions
    assert back.label == "x"


def test_loader_canonicalises_and_validates(tmp_path):
    p = tmp_path / "atom.json"
    p.write_text(json.dumps({"label": "rb", "transitions": [{"k": 3.0, "mu2": 1.0}, {"k": 1.0, "mu2": 2.0}]}))
    atom = load_atom(p)
    assert [t.k for t in atom.transitions] == [1.0, 3.0]
    p.write_text(json.dumps({"transitions": [{"k": -1.0, "mu2": 1.0}]}))
    with pytest.raises(InvalidConfig):
        load_atom(p)
    p.write_text('{"transitions": [')
    with pytest.raises(InvalidConfig, match="line 1, column"):
        load_atom(p)
    with pytest.raises(InvalidConfig, match="nope.json"):
        load_atom(tmp_path / "nope.json")
