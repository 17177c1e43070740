import math

import mpmath
import numpy as np
import pytest
from conftest import positions
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import far_zone_exact, free_space_bracket_integral
from scipy import integrate

import casimir_plate.potential as pot
from casimir_plate.atoms import AtomSpec, StaticAtom
from casimir_plate.errors import (
    EndpointSingularity,
    ExtrapolationUnstable,
    InvalidGrid,
    QuadratureFailure,
    ResonantIntegrand,
)
from casimir_plate.geometry import PlateGeometry, from_axes
from casimir_plate.quadrature import QuadratureConfig
from casimir_plate.tensors import dipole_kernel_plate, tau_plate

C23 = -23 / (4 * math.pi)
UNIT = StaticAtom(1.0)
ONE = AtomSpec(((1.0, 1.0),))
TWO = AtomSpec(((0.7, 2.0), (3.0, 0.5)))
alphas = st.floats(0.1, 10.0)


def free_space_mpmath(atom_a, atom_b, R):
    """Imaginary-axis integral with the bracket kept in its 1/(uR) form."""
    def alpha(atom, u):
        return mpmath.mpf(2) / 3 * sum(t.k * t.mu2 / (t.k**2 + u**2) for t in atom.transitions)

    def f(u):
        x = u * R
        bracket = 1 + 2 / x + 5 / x**2 + 6 / x**3 + 3 / x**4
        return u**4 * alpha(atom_a, u) * alpha(atom_b, u) * bracket * mpmath.exp(-2 * x)

    with mpmath.workdps(30):
        return float(-mpmath.quad(f, [0, 1 / R, 10 / R, mpmath.inf]) / (mpmath.pi * R**2))


# free space ----------------------------------------------------------------

def test_bracket_integral_is_23_over_4():
    assert free_space_bracket_integral() == pytest.approx(23 / 4, rel=0, abs=0)


@pytest.mark.parametrize("R", [1e-2, 1.0, 7.5, 1e3])
def test_free_space_static_anchor(R):
    res = pot.cp_free_space(StaticAtom(2.0), StaticAtom(0.5), R)
    assert res.reduced_coefficient == pytest.approx(C23, rel=1e-8)
    assert res.value == pytest.approx(C23 / R**7, rel=1e-8)
    assert res.method == "free_space"
    assert 0 <= res.error_estimate <= 1e-8 * abs(res.value)


@pytest.mark.parametrize("atoms", [(ONE, ONE), (ONE, TWO), (TWO, TWO)])
@pytest.mark.parametrize("R", [0.1, 1.0, 5.0, 40.0])
def test_free_space_dynamic_matches_independent_quadrature(atoms, R):
    res = pot.cp_free_space(*atoms, R)
    assert res.value == pytest.approx(free_space_mpmath(*atoms, R), rel=1e-9)


def test_free_space_single_transition_far_zone():
    res = pot.cp_free_space(ONE, ONE, 100.0)
    assert res.reduced_coefficient == pytest.approx(C23, rel=5e-3)


def test_free_space_strictly_decreasing():
    values = [abs(pot.cp_free_space(ONE, TWO, R).value) for R in np.geomspace(0.05, 500, 30)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_free_space_rejects_bad_separation():
    with pytest.raises(ValueError):
        pot.cp_free_space(UNIT, UNIT, 0.0)


def test_free_space_quadrature_failure_is_reported():
    q = QuadratureConfig(max_subdivisions=1, rel_tol=1e-14, abs_tol=1e-300)
    with pytest.raises(QuadratureFailure):
        pot.cp_free_space(ONE, TWO, 0.01, q)


# closed form ---------------------------------------------------------------

@given(positions(), alphas, alphas)
def test_closed_form_against_exact_evaluation(pos, a, b):
    g = PlateGeometry(*pos)
    d, i, m = far_zone_exact(*pos)
    res = pot.cp_far_zone_plate(a, b, g)
    assert res.value == pytest.approx(a * b * (d + i + m), rel=1e-12)
    assert res.diagnostics["mixed"] == pytest.approx(a * b * m, rel=1e-12)


def test_stacked_example():
    res = pot.cp_far_zone_plate(1.0, 1.0, from_axes(1.0, 2.0, 0.0))
    expected = C23 * (1 + 3.0**-7) + 48 / (math.pi * 1 * 3 * 4**5)
    assert res.value == pytest.approx(expected, rel=1e-15)
    assert res.method == "far_zone_closed"


def test_on_plate_example():
    for R in (0.5, 1.0, 3.0):
        res = pot.cp_far_zone_plate(1.0, 1.0, from_axes(0.0, 0.0, R))
        assert res.reduced_coefficient == pytest.approx(-13 / (2 * math.pi), rel=1e-14)


def test_plate_at_infinity():
    res = pot.cp_far_zone_plate(1.0, 1.0, from_axes(1e6, 1e6, 1.0))
    assert res.reduced_coefficient == pytest.approx(C23, rel=1e-12)


@given(positions(), alphas, alphas)
def test_exchange_symmetry(pos, a, b):
    g = PlateGeometry(*pos)
    fwd = pot.cp_far_zone_plate(a, b, g).value
    rev = pot.cp_far_zone_plate(b, a, g.swapped()).value
    assert rev == pytest.approx(fwd, rel=1e-13)


@given(positions())
def test_term_signs(pos):
    d, i, m = pot.far_zone_terms(1.0, 1.0, PlateGeometry(*pos))
    assert d < 0 and i < 0 and m >= 0


def test_free_space_recovery_ladder():
    gaps = []
    for h in np.geomspace(1.0, 1e4, 15):
        g = PlateGeometry((0, 0, h), (0.3, 0.4, h + 0.5))
        _, image, mixed = pot.far_zone_terms(1.0, 1.0, g)
        gaps.append(abs(image + mixed))
        total = pot.cp_far_zone_plate(1.0, 1.0, g).reduced_coefficient
        assert abs(total - C23) <= gaps[-1] * g.R**7 + 1e-15
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-12 * abs(C23)


# correlation integral ------------------------------------------------------

@given(positions(), st.floats(0.05, 30.0))
def test_phase_groups_rebuild_the_contraction(pos, k):
    g = PlateGeometry(*pos)
    direct = k**3 * np.sum(tau_plate(k, g).matrix * dipole_kernel_plate(k, g).matrix)
    rebuilt = float(pot.correlation_integrand(np.array([k]), g)[0])
    # each phase group is a product of two outgoing prefactors; for kR << 1
    # they cancel against each other, so the tolerance scales with their size
    size = k**2 / g.R + k / g.R**2 + 1 / g.R**3
    assert rebuilt == pytest.approx(direct, abs=1e-13 * size * size)


@pytest.mark.parametrize("geom", [from_axes(1, 2, 0), from_axes(1, 2, 3), from_axes(0, 0, 1),
                                  from_axes(0.05, 50, 0.5), from_axes(0.05, 0.05, 5), from_axes(3, 0, 1)])
def test_correlation_modes_match_closed_form(geom):
    ref = pot.cp_far_zone_plate(1.0, 1.0, geom).value
    wick = pot.cp_plate_correlation(UNIT, UNIT, geom, mode="wick")
    abel = pot.cp_plate_correlation(UNIT, UNIT, geom, mode="abel")
    assert wick.value == pytest.approx(ref, rel=1e-10)
    assert abel.value == pytest.approx(ref, rel=1e-6)
    assert wick.method == "correlation_wick" and abel.method == "correlation_abel"
    assert wick.diagnostics["static"] and wick.diagnostics["cross_checkable"]


@settings(max_examples=10)
@given(positions())
def test_wick_and_abel_agree(pos):
    g = PlateGeometry(*pos)
    w = pot.cp_plate_correlation(StaticAtom(1.3), StaticAtom(0.4), g, mode="wick").value
    a = pot.cp_plate_correlation(StaticAtom(1.3), StaticAtom(0.4), g, mode="abel").value
    assert a == pytest.approx(w, rel=1e-6)


@pytest.mark.parametrize("R", [0.5, 2.0, 20.0])
def test_dynamic_wick_recovers_free_space(R):
    g = PlateGeometry((0, 0, 1e6), (0, R, 1e6))
    plate = pot.cp_plate_correlation(ONE, TWO, g, mode="wick")
    assert plate.value == pytest.approx(pot.cp_free_space(ONE, TWO, R).value, rel=1e-6)
    assert not plate.diagnostics["cross_checkable"]


def test_abel_rejects_dynamic_atoms():
    with pytest.raises(ResonantIntegrand):
        pot.cp_plate_correlation(ONE, UNIT, from_axes(1, 2, 0), mode="abel")
    with pytest.raises(ValueError):
        pot.cp_plate_correlation(UNIT, UNIT, from_axes(1, 2, 0), mode="contour")


def test_abel_flags_growing_residuals(monkeypatch):
    # sample noise that alternates in sign is amplified by high-order extrapolation
    def noisy(a, coeff_fn, fractions, quad, n_panels_cap=0):
        return 1.0 + 1e-6 * (-1.0) ** np.arange(len(fractions))

    monkeypatch.setattr(pot, "_abel_phase", noisy)
    with pytest.raises(ExtrapolationUnstable):
        pot.cp_plate_correlation(UNIT, UNIT, from_axes(1, 2, 0), mode="abel")


def test_abel_diagnostics_record_schedule():
    q = QuadratureConfig()
    res = pot.cp_plate_correlation(UNIT, UNIT, from_axes(1, 2, 0.5), q, mode="abel")
    assert res.diagnostics["regulator_fractions"] == list(q.regulator_fractions)
    assert len(res.diagnostics["phases"]) == 3


# double integral -----------------------------------------------------------

@pytest.mark.parametrize("t_over_R", [0.5, 2.0])
def test_laplace_plate_against_quadrature(t_over_R):
    g = from_axes(0.7, 1.6, 1.1)
    t = t_over_R * g.R
    closed = pot.laplace_tau_plate(t, g)
    for l in range(3):
        for m in range(3):
            num, _ = integrate.quad(lambda k: k**3 * math.exp(-k * t) * tau_plate(k, g).matrix[l, m],
                                    0, np.inf, limit=400, epsabs=0, epsrel=1e-12)
            assert closed[l, m] == pytest.approx(num, rel=1e-8, abs=1e-13 * np.max(np.abs(closed)))


@pytest.mark.parametrize("geom", [from_axes(1, 2, 0), from_axes(0.3, 4, 2), from_axes(0, 0, 1), from_axes(5, 5, 0.1)])
def test_double_integral_matches_closed_form(geom):
    res = pot.cp_plate_double_integral_far(2.0, 0.5, geom)
    assert res.value == pytest.approx(pot.cp_far_zone_plate(2.0, 0.5, geom).value, rel=1e-9)
    assert res.method == "double_integral_far"


def test_double_integral_plate_at_infinity():
    res = pot.cp_plate_double_integral_far(1.0, 1.0, from_axes(1e5, 1e5, 1.0))
    assert res.reduced_coefficient == pytest.approx(C23, rel=1e-8)


def test_double_integral_endpoint_check(monkeypatch):
    monkeypatch.setattr(pot, "laplace_tau_plate", lambda t, g: np.full((3, 3), np.inf))
    with pytest.raises(EndpointSingularity):
        pot.cp_plate_double_integral_far(1.0, 1.0, from_axes(1, 2, 0))


# convergence and determinism -----------------------------------------------

@pytest.mark.parametrize("method", ["wick", "double", "free"])
def test_tightening_tolerance_stays_within_error_estimate(method):
    geom = from_axes(0.4, 1.7, 0.9)
    atoms = (ONE, TWO) if method != "double" else (UNIT, UNIT)
    prev = None
    for rel in (1e-6, 5e-7, 2.5e-7, 1.25e-7, 1e-10):
        q = QuadratureConfig(rel_tol=rel)
        res = pot.evaluate(method, *atoms, geom, q)
        if prev is not None:
            assert abs(res.value - prev.value) <= max(prev.error_estimate, 4 * np.finfo(float).eps * abs(prev.value))
        prev = res


def test_results_are_bitwise_reproducible():
    geom = from_axes(0.4, 1.7, 0.9)
    for m in pot.PLATE_METHODS:
        a = pot.evaluate(m, UNIT, UNIT, geom)
        b = pot.evaluate(m, UNIT, UNIT, geom)
        assert a.value == b.value and a.error_estimate == b.error_estimate


def test_evaluate_dispatch():
    geom = from_axes(1, 2, 0)
    assert pot.evaluate("free", UNIT, UNIT, geom).value == pytest.approx(C23, rel=1e-8)
    with pytest.raises(ValueError):
        pot.evaluate("nope", UNIT, UNIT, geom)
    d = pot.evaluate("far", ONE, ONE, geom).to_dict()
    assert d["method"] == "far_zone_closed" and d["R"] == 1.0 and d["Rbar"] == 3.0


# comparison ----------------------------------------------------------------

def _grid():
    return [from_axes(za, zb, rho) for za in (0.3, 2.0) for zb in (0.5, 4.0) for rho in (0.0, 1.5)]


def test_compare_far_zone_grid_passes():
    report = pot.compare_methods(ONE, TWO, _grid(), tol=1e-5)
    assert report.all_passed
    assert report.numerical_failures == 0
    for row in report.rows:
        assert set(row.results) == set(pot.PLATE_METHODS)
        assert row.max_deviation <= 1e-5
        assert len(row.deviations()) == 6


def test_compare_single_method():
    report = pot.compare_methods(UNIT, UNIT, [from_axes(1, 2, 0)], methods=("far",))
    row = report.rows[0]
    assert row.passed and row.max_deviation == 0.0
    assert row.results["far"].value == pot.cp_far_zone_plate(1.0, 1.0, from_axes(1, 2, 0)).value


def test_compare_isolates_invalid_rows():
    from casimir_plate.io import geometry_or_error

    grid = [from_axes(1, 2, 0), geometry_or_error((0, 0, -1), (0, 0, 1)), from_axes(1, 3, 1)]
    report = pot.compare_methods(UNIT, UNIT, grid)
    assert [r.passed for r in report.rows] == [True, False, True]
    assert "z >= 0" in report.rows[1].error
    assert not report.all_passed


def test_compare_records_method_failures():
    report = pot.compare_methods(ONE, ONE, [from_axes(1, 2, 0)], methods=("far", "abel"), far_zone_only=False)
    row = report.rows[0]
    assert "ResonantIntegrand" in row.failures["abel"]
    assert not row.passed and report.numerical_failures == 1


def test_compare_parallel_matches_serial():
    grid = _grid()[:4]
    serial = pot.compare_methods(UNIT, UNIT, grid, methods=("far", "wick"))
    parallel = pot.compare_methods(UNIT, UNIT, grid, methods=("far", "wick"), jobs=2)
    for a, b in zip(serial.rows, parallel.rows):
        assert a.index == b.index
        assert a.results["wick"].value == b.results["wick"].value


def test_compare_empty_grid():
    with pytest.raises(InvalidGrid):
        pot.compare_methods(UNIT, UNIT, [])
