"""
Tests for Closed-Form Oracles
"""
import pytest
import sys
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ddsim.exceptions import OracleDomainError
from ddsim.physics.decoupling import PulseSchedule, evolve_pulsed, parse_cycle
from ddsim.physics.models import ModelKind, create_model, initial_state, state_distance
from ddsim.physics.numerics import gaussian_state, make_grid
from ddsim.physics.oracles import (
    ORACLE_DOMAINS,
    eps_qp2,
    eps_qp2_printed,
    evaluate,
    f_q2p2,
    harmonic_propagator,
    phi_nt,
    q2p2_reference_propagator,
    qp_limit_apply,
    qp_rotated_coherence,
    shallow_pocket_coherence,
    un_q2p2_generator,
    un_qp_error,
)

PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)


class TestQP2Error:
    """Tests for the q (+) p^2 decoupling error."""

    def test_zero_time(self):
        """No evolution, no error."""
        assert eps_qp2(0.0, 4, 1.0) == 0.0

    def test_value(self):
        """1 - cos(t^3/8n) e^{-gamma t^2/4n}."""
        assert eps_qp2(2.0, 1, 1.0) == pytest.approx(1.0 - np.cos(1.0) * np.exp(-1.0))

    def test_falls_with_n(self):
        """More cycles, smaller error."""
        errors = [eps_qp2(3.0, n, 1.0) for n in (1, 2, 4, 8, 16, 32)]
        assert all(a > b for a, b in zip(errors, errors[1:]))
        assert errors[-1] < 0.1

    def test_printed_phase_is_half(self):
        """The alternative form uses half the relative phase."""
        assert eps_qp2_printed(2.0, 1, 1.0) == pytest.approx(1.0 - np.cos(0.5) * np.exp(-1.0))

    @pytest.mark.parametrize("gamma", [0.01, 1.0, 7.5])
    def test_bounded(self, gamma):
        """The error stays in [0, 2] over a wide (t, n) range."""
        for t in np.linspace(0.0, 20.0, 81):
            for n in (1, 2, 3, 7, 32, 1000):
                value = eps_qp2(float(t), n, gamma)
                assert 0.0 <= value <= 2.0, (t, n)

    @pytest.mark.parametrize("t,n,gamma", [(-1.0, 1, 1.0), (1.0, 0, 1.0), (1.0, 2.5, 1.0), (1.0, 1, 0.0)])
    def test_domain(self, t, n, gamma):
        """Negative t, bad n or non-positive gamma are outside the domain."""
        with pytest.raises(OracleDomainError):
            eps_qp2(t, n, gamma)


class TestQPLimit:
    """Tests for the q (+) p limit and its error."""

    def test_error_formula(self):
        """2|sin(t^2/16n)| with small-angle constant t^2/8n."""
        assert un_qp_error(4.0, 1) == pytest.approx(2.0 * abs(np.sin(1.0)))
        assert un_qp_error(1.0, 1000) == pytest.approx(1.0 / 8000.0, rel=1e-6)

    def test_pulsed_distance_matches_error(self):
        """||U_n psi - limit psi|| equals the closed form for any state."""
        grid = make_grid(16.0, 512)
        model = create_model(ModelKind.QP, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid, center=0.5, width=0.9))
        limit = qp_limit_apply(grid, 1.0, psi)
        for n in (2, 8, 32):
            pulsed = evolve_pulsed(model, PulseSchedule(parse_cycle("1,X"), 1.0, n), psi)
            assert state_distance(pulsed, limit) == pytest.approx(un_qp_error(1.0, n), abs=1e-9)

    def test_limit_is_unitary(self):
        """The limit propagator keeps the norm."""
        grid = make_grid(16.0, 512)
        model = create_model(ModelKind.QP, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid))
        assert qp_limit_apply(grid, 2.0, psi).norm() == pytest.approx(1.0, abs=1e-12)

    def test_rotated_coherence(self):
        """|rho_01| decays as e^{-gamma sqrt(2) t / 2}."""
        assert qp_rotated_coherence(0.0, 1.0) == pytest.approx(0.5)
        value = qp_rotated_coherence(1.5, 2.0)
        assert abs(value) == pytest.approx(0.5 * np.exp(-1.5 * np.sqrt(2.0)))


class TestQ2P2:
    """Tests for the q^2 (+) p^2 generator."""

    def test_f_small_t(self):
        """f(t) = 1 + t^2/6 + O(t^4)."""
        assert f_q2p2(0.0) == 1.0
        for t in (1e-5, 1e-3, 0.05, 0.2):
            assert f_q2p2(t) == pytest.approx(1.0 + t ** 2 / 6.0, abs=1e-4)

    def test_f_known_values(self):
        """f(1) = 2 pi / (3 sqrt 3); f(sqrt 2) = pi / 2 on the continuous branch."""
        assert f_q2p2(1.0) == pytest.approx(2.0 * np.pi / (3.0 * np.sqrt(3.0)))
        assert f_q2p2(np.sqrt(2.0)) == pytest.approx(np.pi / 2.0)
        assert f_q2p2(1.5) > f_q2p2(np.sqrt(2.0))

    @pytest.mark.parametrize("t", [-0.1, 2.0, 3.0, float("nan")])
    def test_f_domain(self, t):
        """0 <= t < 2."""
        with pytest.raises(OracleDomainError):
            f_q2p2(t)

    def test_generator_domain(self):
        """n must exceed t/2."""
        un_q2p2_generator(1.0, 1)
        with pytest.raises(OracleDomainError):
            un_q2p2_generator(4.0, 2)

    def test_generator_limit(self):
        """At large n the generator tends to (t/2)(q^2+p^2) with no squeeze."""
        gen = un_q2p2_generator(1.0, 1000)
        assert gen.oscillator == pytest.approx(0.5, abs=1e-6)
        assert gen.squeeze == pytest.approx(0.5 / 2000.0, rel=1e-6)

    def test_generator_matches_pulsed(self):
        """Pulsed evolution equals e^{iG} on a small grid."""
        grid = make_grid(12.0, 256)
        model = create_model(ModelKind.Q2P2, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid, center=1.0))
        for n in (4, 8):
            pulsed = evolve_pulsed(model, PulseSchedule(parse_cycle("1,X"), 1.0, n), psi)
            reference = q2p2_reference_propagator(grid, 1.0, n) @ psi.data.reshape(-1)
            assert np.sqrt(np.sum(np.abs(pulsed.data.reshape(-1) - reference) ** 2) * grid.dx) < 1e-6

    def test_harmonic_identity_at_zero(self):
        """e^{0} is the identity."""
        grid = make_grid(4.0, 32)
        assert np.allclose(harmonic_propagator(grid, 0.0), np.eye(32))


class TestShallowPocket:
    """Tests for the shallow-pocket coherence."""

    def test_uncut_closed_form(self):
        """Without a cutoff p_+(t) = (1 + e^{-gamma t})/2."""
        for t in (0.1, 0.5, 1.0, 3.0):
            assert shallow_pocket_coherence(t, 4.0) == pytest.approx(0.5 * (1.0 + np.exp(-4.0 * t)), abs=1e-8)

    def test_zero_time(self):
        """p_+(0) = 1."""
        assert shallow_pocket_coherence(0.0, 4.0, cutoff=2.0) == 1.0

    def test_cutoff_flat_onset(self):
        """A bounded spectrum gives a quadratic, not linear, onset."""
        assert shallow_pocket_coherence(0.01, 4.0, cutoff=2.0) > 0.999
        assert shallow_pocket_coherence(0.01, 4.0) < 0.99

    def test_large_cutoff_approaches_uncut(self):
        """A far cutoff barely changes the result."""
        cut = shallow_pocket_coherence(0.5, 4.0, cutoff=1e4)
        assert cut == pytest.approx(shallow_pocket_coherence(0.5, 4.0), abs=1e-3)

    def test_domain(self):
        """Negative t or non-positive cutoff are refused."""
        with pytest.raises(OracleDomainError):
            shallow_pocket_coherence(-1.0, 4.0)
        with pytest.raises(OracleDomainError):
            shallow_pocket_coherence(1.0, 4.0, cutoff=0.0)


class TestComb:
    """Tests for the Friedrichs-Lee comb."""

    def test_support(self):
        """phi vanishes outside [-t/2, 0)."""
        s = np.array([-3.5, -3.0001, 0.0, 0.5])
        assert np.all(phi_nt(4, 6.0, s) == 0.0)

    def test_signs(self):
        """Each window of length t/2n starts negative and ends positive."""
        n, t = 4, 6.0
        period = t / (2 * n)
        assert phi_nt(n, t, -period + 0.1 * period) < 0
        assert phi_nt(n, t, -0.1 * period) > 0

    def test_norm(self):
        """||phi||^2 = 1 - e^{-t/2}."""
        t, n = 6.0, 5
        ds = t / (2 * n * 2000)
        s = -t / 2 + (np.arange(int(round(t / 2 / ds))) + 0.5) * ds
        assert np.sum(phi_nt(n, t, s) ** 2) * ds == pytest.approx(1.0 - np.exp(-t / 2), abs=1e-6)

    def test_scalar_input(self):
        """Scalars in, floats out."""
        assert isinstance(phi_nt(2, 1.0, -0.1), float)


class TestEvaluate:
    """Tests for named oracle evaluation."""

    def test_known_oracle(self):
        """evaluate reports the value and the domain it was checked against."""
        result = evaluate("f_q2p2", t=1.0)
        assert result.value == pytest.approx(f_q2p2(1.0))
        assert result.domain == ORACLE_DOMAINS["f_q2p2"]
        assert result.parameters == {"t": 1.0}

    def test_unknown_oracle(self):
        """Unknown names raise a domain error."""
        with pytest.raises(OracleDomainError):
            evaluate("bogus")

    def test_out_of_domain(self):
        """Domain checks apply through evaluate."""
        with pytest.raises(OracleDomainError):
            evaluate("un_q2p2_generator", t=4.0, n=1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
