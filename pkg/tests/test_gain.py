import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nwave import (
    ComponentSpec,
    FrequencyResponse,
    SystemTopology,
    assemble,
    bosma_correlation,
    build_canceler_topology,
    canceler_ports,
    correlation_gain,
    embedded_covariance,
    external_excitation_correlation,
    gain,
    reduce_to_external,
    response,
)

from conftest import F0, S_ARRAY, S_LNA, make_spec, pol, random_passive_topology


def unit(n, i):
    v = np.zeros(n, dtype=complex)
    v[i] = 1.0
    return v


class TestResponse:
    def test_zero_source(self):
        topo = build_canceler_topology(make_spec(), F0)
        sysm = assemble(topo, F0)
        np.testing.assert_array_equal(response(sysm, np.zeros(14)), np.zeros(14))

    def test_unconnected_two_port_gives_s_column(self):
        s = np.array([[pol(0.2, 30), pol(0.1, -10)], [pol(3, -150), pol(0.3, 5)]])
        topo = SystemTopology((ComponentSpec("l", FrequencyResponse.constant(s)),), ())
        b = response(assemble(topo, F0), unit(2, 0))
        np.testing.assert_allclose(b, s[:, 0])

    def test_single_path_amplitudes_by_hand(self):
        """Matched amplifiers and ideal hybrids leave one single-pass path."""
        spec = make_spec(s_l11=0j)
        topo = build_canceler_topology(spec, F0)
        ports = canceler_ports(topo)
        sysm = assemble(topo, F0)
        b = response(sysm, ports.antenna_delta(0))
        e90 = np.exp(1j * np.pi / 2)
        s_l21 = S_LNA[1, 0]
        expected_out1 = s_l21 * (e90 / np.sqrt(2)) * S_ARRAY[0, 0]
        expected_out2 = s_l21 * (e90 / np.sqrt(2)) * S_ARRAY[1, 0]
        assert b[ports.lna_outputs[0]] == pytest.approx(expected_out1, rel=1e-12)
        assert b[ports.lna_outputs[1]] == pytest.approx(expected_out2, rel=1e-12)


class TestGain:
    def test_through_identity(self):
        s = np.array([[0, 1], [1, 0]], dtype=complex)
        topo = SystemTopology((ComponentSpec("t", FrequencyResponse.constant(s)),), ())
        sysm = assemble(topo, F0)
        a_cov = embedded_covariance(2, [0], [[1.0]])
        assert gain(sysm, a_cov, unit(2, 1), unit(2, 0)) == pytest.approx(1.0)

    def test_single_amplifier(self):
        topo = SystemTopology(
            (ComponentSpec("l", FrequencyResponse.constant(S_LNA)),), ()
        )
        sysm = assemble(topo, F0)
        a_cov = embedded_covariance(2, [0], [[1.0]])
        assert gain(sysm, a_cov, unit(2, 1), unit(2, 0)) == pytest.approx(9.0, rel=1e-12)

    def test_zero_excitation_rejected(self):
        topo = SystemTopology(
            (ComponentSpec("l", FrequencyResponse.constant(S_LNA)),), ()
        )
        with pytest.raises(ValueError, match="not positive"):
            gain(assemble(topo, F0), np.zeros((2, 2)), unit(2, 1), unit(2, 0))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_passive_gain_bounded_by_one(self, seed):
        rng = np.random.default_rng(seed)
        topo = random_passive_topology(rng)
        sysm = assemble(topo, F0)
        ext = topo.external_ports
        P = topo.n_ports
        src = ext[int(rng.integers(len(ext)))]
        out = ext[int(rng.integers(len(ext)))]
        a_cov = embedded_covariance(P, [src], [[1.0]])
        g = gain(sysm, a_cov, unit(P, out), unit(P, src))
        assert g <= 1.0 + 1e-9

    @settings(max_examples=15, deadline=None)
    @given(
        st.floats(min_value=0.1, max_value=5.0),
        st.floats(min_value=0.0, max_value=360.0),
        st.floats(min_value=0.1, max_value=5.0),
    )
    def test_scaling_invariance(self, wmag, wdeg, dmag):
        topo = build_canceler_topology(make_spec(), F0)
        ports = canceler_ports(topo)
        sysm = assemble(topo, F0)
        a_cov = embedded_covariance(
            14, ports.antenna_inputs, bosma_correlation(S_ARRAY, 290.0)
        )
        w, d = ports.output_selector(0), ports.antenna_delta(0)
        ref = gain(sysm, a_cov, w, d)
        assert gain(sysm, a_cov, pol(wmag, wdeg) * w, dmag * d) == pytest.approx(ref, rel=1e-10)


class TestCorrelationGain:
    def make_isolated_pair(self):
        s = np.array([[0, 0], [pol(2, -30), 0]], dtype=complex)
        return SystemTopology(
            (
                ComponentSpec("a", FrequencyResponse.constant(s)),
                ComponentSpec("b", FrequencyResponse.constant(s)),
            ),
            (),
        )

    def test_isolated_chains_share_nothing(self):
        topo = self.make_isolated_pair()
        sysm = assemble(topo, F0)
        a_cov = embedded_covariance(4, [0], [[1.0]])  # single uncorrelated drive
        g12 = correlation_gain(sysm, a_cov, unit(4, 1), unit(4, 3), unit(4, 0), unit(4, 0))
        assert g12 == pytest.approx(0.0, abs=1e-15)

    def test_zero_input_correlation_rejected(self):
        topo = self.make_isolated_pair()
        sysm = assemble(topo, F0)
        a_cov = np.diag([1.0, 0, 1.0, 0]).astype(complex)
        with pytest.raises(ValueError, match="zero"):
            correlation_gain(sysm, a_cov, unit(4, 1), unit(4, 3), unit(4, 0), unit(4, 2))

    def test_canceler_correlation_gain_stays_on(self):
        """The correlated scene response survives at the coherence nulls."""
        from nwave.sweep import apply_parameter

        spec = make_spec(s_l11=S_LNA[0, 0])
        vals = []
        for p_h in np.arange(0.0, 180.1, 15.0):
            topo = build_canceler_topology(apply_parameter(spec, "P_H", p_h), F0)
            ports = canceler_ports(topo)
            sysm = assemble(topo, F0)
            a_cov = embedded_covariance(
                14, ports.antenna_inputs, bosma_correlation(S_ARRAY, 290.0)
            )
            g12 = correlation_gain(
                sysm,
                a_cov,
                ports.output_selector(0),
                ports.output_selector(1),
                ports.antenna_delta(0),
                ports.antenna_delta(1),
            )
            vals.append(abs(g12))
        vals = np.array(vals)
        assert np.all(vals > 0.5)
        # flat to within a factor of two around the mid-scale value
        assert vals.max() / vals.min() < 2.0

    def test_quadrature_point_value_by_hand(self):
        """At 90 degrees no reflections survive, so the single-pass value is exact."""
        spec = make_spec(s_l11=S_LNA[0, 0])
        topo = build_canceler_topology(spec, F0)
        ports = canceler_ports(topo)
        sysm = assemble(topo, F0)
        a_cov = embedded_covariance(
            14, ports.antenna_inputs, bosma_correlation(S_ARRAY, 290.0)
        )
        g12 = correlation_gain(
            sysm,
            a_cov,
            ports.output_selector(0),
            ports.output_selector(1),
            ports.antenna_delta(0),
            ports.antenna_delta(1),
        )
        m = S_ARRAY @ S_ARRAY.conj().T
        expected = (
            abs(S_LNA[1, 0]) ** 2 / 2 * (m - m @ m)[0, 1] / m[0, 1] * (-1)
        ) * -1
        # |S_L21|^2 / L_H scaled by the array scattering factor (1 - tr M)
        assert abs(g12) == pytest.approx(4.5 * (1 - np.trace(m).real), rel=1e-10)
        assert abs(g12) == pytest.approx(abs(expected), rel=1e-10)


class TestExternalExcitation:
    def test_cold_sky_is_silent(self):
        np.testing.assert_array_equal(
            external_excitation_correlation(S_ARRAY, 0.0), np.zeros((2, 2))
        )

    def test_matches_thermal_form(self):
        a = external_excitation_correlation(S_ARRAY, 5800.0)
        np.testing.assert_allclose(a, bosma_correlation(S_ARRAY, 5800.0), atol=1e-9)

    def test_equilibrium_difference_vanishes(self):
        t_a = 290.0
        diff = external_excitation_correlation(S_ARRAY, t_a) - external_excitation_correlation(
            S_ARRAY, t_a
        )
        np.testing.assert_array_equal(diff, np.zeros((2, 2)))

    def test_sky_contrast_drives_the_interferometer(self):
        """Zero output in equilibrium, nonzero when the sky differs."""
        spec = make_spec(s_l11=S_LNA[0, 0])
        topo = build_canceler_topology(spec, F0)
        ports = canceler_ports(topo)
        sysm = assemble(topo, F0)

        def output_cross(t_sky, t_a):
            delta = external_excitation_correlation(
                S_ARRAY, t_sky
            ) - external_excitation_correlation(S_ARRAY, t_a)
            a_cov = embedded_covariance(14, ports.antenna_inputs, delta)
            qs = sysm.q @ sysm.s
            b = qs @ a_cov @ qs.conj().T
            w1, w2 = ports.output_selector(0), ports.output_selector(1)
            return complex(w1.conj() @ b @ w2)

        assert output_cross(290.0, 290.0) == pytest.approx(0.0, abs=1e-12)
        assert abs(output_cross(5800.0, 290.0)) > 1.0
