import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latchem2d.errors import DomainError, RegimeError
from latchem2d.hamiltonians.mediator import (MediatorParamsI, MediatorParamsII, build_mediator_I,
                                             build_mediator_II, build_mediator_II_basis)
from latchem2d.lattice import LatticeSpec
from latchem2d.mediators import (bound_wavefunction, delta_B_asymptote, delta_II, franck_condon_hopping,
                                 pairwise_energy_expansion, solve_bound_state_I, two_site_bound_energy,
                                 v_I_curve, v_I_prefactor, v_II_asymptotic, v_II_closed_form, v_II_curve,
                                 v_II_decay_length, v_II_lattice)
from latchem2d.solvers import ed_extremal
from latchem2d.special import EULER_GAMMA


@pytest.mark.parametrize("U", [2.0, 4.0, 8.0])
def test_bound_state_root_matches_ed(U):
    lat = LatticeSpec(40, "periodic")
    p = MediatorParamsI(U)
    ed = ed_extremal(build_mediator_I(lat, p, [(20, 20)]), "highest").ground
    assert solve_bound_state_I(p, lat, "lattice-sum").E_B == pytest.approx(ed, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(U=st.floats(0.8, 20.0))
def test_bound_state_properties(U):
    b = solve_bound_state_I(MediatorParamsI(U))
    assert b.E_B > 4.0 and b.delta_B == pytest.approx(b.E_B - 4.0)
    assert b.residual < 1e-10
    # strong coupling: the boson sits on the impurity
    if U > 15:
        assert b.E_B == pytest.approx(U, rel=0.1)


def test_delta_B_asymptote_small_coupling():
    for U in (1.0, 1.5):
        assert solve_bound_state_I(MediatorParamsI(U)).delta_B == pytest.approx(delta_B_asymptote(U), rel=0.05)


def test_unknown_method():
    with pytest.raises(DomainError):
        solve_bound_state_I(MediatorParamsI(2.0), method="guess")
    with pytest.raises(DomainError):
        solve_bound_state_I(MediatorParamsI(2.0), None, "lattice-sum")


def test_bound_wavefunction_is_ed_eigenvector():
    lat = LatticeSpec(16, "periodic")
    p = MediatorParamsI(3.0)
    b = solve_bound_state_I(p, lat, "lattice-sum")
    state, _ = bound_wavefunction(b.E_B, lat, 1.0, center=(5, 7))
    H = build_mediator_I(lat, p, [(5, 7)])
    psi = state.amplitudes
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert np.allclose(H.matvec(psi), b.E_B * psi, atol=1e-10)
    assert np.argmax(np.abs(psi)) == lat.flatten(5, 7)


def test_franck_condon_hopping_is_an_overlap():
    lat = LatticeSpec(30, "periodic")
    for U in (2.0, 4.0, 8.0):
        b = solve_bound_state_I(MediatorParamsI(U), lat, "lattice-sum")
        s0, _ = bound_wavefunction(b.E_B, lat, 1.0, (10, 10))
        s1, _ = bound_wavefunction(b.E_B, lat, 1.0, (11, 10))
        fc = franck_condon_hopping(b.E_B, 0.2, lat)
        assert fc == pytest.approx(0.2 * np.vdot(s0.amplitudes, s1.amplitudes).real, rel=1e-10)
        assert -0.2 < fc < 0


def test_two_site_energy_exceeds_single_site_and_decays():
    p = MediatorParamsI(2.0)
    lat = LatticeSpec(60, "periodic")
    b = solve_bound_state_I(p, lat, "lattice-sum")
    ups = [two_site_bound_energy(p, (d, 0), lat, "lattice-sum", b.E_B) for d in (1, 2, 4, 8)]
    assert all(u > b.E_B for u in ups)
    assert np.all(np.diff(ups) < 0)


def test_two_site_root_matches_ed():
    lat = LatticeSpec(30, "periodic")
    p = MediatorParamsI(2.0)
    curve_root = v_I_curve(p, lat, [2, 3, 5], "root")
    curve_ed = v_I_curve(p, lat, [2, 3, 5], "ed")
    assert np.allclose(curve_root.values, curve_ed.values, atol=1e-8)


def test_v_I_analytic_mode():
    c = v_I_curve(MediatorParamsI(1.25), None, [3, 4, 5], "analytic")
    delta = delta_B_asymptote(1.25)
    assert c.values[0] * 3 == pytest.approx(2 * math.sqrt(delta) * math.exp(-EULER_GAMMA), rel=1e-12)
    assert v_I_prefactor(1.25) == pytest.approx(c.values[0] * 3)
    assert c.is_positive_decreasing()
    with pytest.raises(DomainError):
        v_I_curve(MediatorParamsI(1.25), None, [0, 1])


def test_delta_II_sign_and_error():
    det = delta_II(MediatorParamsII(U=4.3, g=0.3), 2)
    assert det.delta_bare == pytest.approx(0.3)
    assert det.E2 > 0 and det.delta_II > det.delta_bare
    with pytest.raises(RegimeError):
        delta_II(MediatorParamsII(U=3.9, g=0.3), 2)


def test_v_II_forms_agree():
    g, delta = 0.3, 0.2
    d = np.array([20.0, 40.0])
    ratio = v_II_closed_form(d, g, delta) / v_II_asymptotic(d, g, delta)
    assert np.all(np.abs(ratio - 1) < 1.0 / (d * math.sqrt(delta)))
    lat = LatticeSpec(200, "periodic")
    for x in (3, 6):
        assert v_II_lattice((x, 0), g, delta, lat) == pytest.approx(v_II_closed_form(x, g, delta), rel=0.05)
    assert v_II_decay_length(0.25) == pytest.approx(1.0)


def test_v_II_curve_window():
    c = v_II_curve(MediatorParamsII(U=4.1, g=0.3), 2, [1, 2, 3, 4, 6], LatticeSpec(30, "periodic"))
    x = c.distances * math.sqrt(c.meta["delta_II"])
    assert np.array_equal(c.in_window, x > 1)
    assert np.isnan(c.extra["asymptotic"][~c.in_window]).all()
    assert "lattice" in c.extra and c.is_positive_decreasing()


def test_pair_term_reproduces_ed_energy_differences():
    lat = LatticeSpec(8, "periodic")
    p = MediatorParamsII(U=4.6, g=0.15)

    def ed(d):
        sites = [(2, 4), (2 + d, 4)]
        return ed_extremal(build_mediator_II(build_mediator_II_basis(lat, 2, sites), p).total(), "highest").ground

    far_ed = ed(4)
    far = pairwise_energy_expansion([(2, 4), (6, 4)], p, lat).fourth
    for d in (1, 2, 3):
        pw = pairwise_energy_expansion([(2, 4), (2 + d, 4)], p, lat)
        assert ed(d) - far_ed == pytest.approx(pw.fourth - far, rel=0.02)


def test_pairwise_expansion_bookkeeping():
    p = MediatorParamsII(U=4.3, g=0.3)
    pw = pairwise_energy_expansion([(0, 0), (3, 0), (0, 4)], p)
    assert pw.zeroth == pytest.approx(3 * 4.3)
    assert len(pw.pairs) == 3
    assert pw.pairs[(1, 2)] == pytest.approx(float(v_II_closed_form(5.0, 0.3, pw.delta_II)))
    assert pw.total == pytest.approx(pw.zeroth + pw.second + pw.fourth)
    with pytest.raises(RegimeError):
        pairwise_energy_expansion([(0, 0), (1, 0)], MediatorParamsII(U=4.3, g=1.0), strict=True)
