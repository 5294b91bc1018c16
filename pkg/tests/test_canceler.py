import numpy as np
import pytest

from nwave import (
    ComponentSpec,
    FrequencyResponse,
    IdealHybrid,
    LnaSpec,
    MeasuredHybrid,
    NoiseParams,
    PortRef,
    StubMatchSpec,
    SystemTopology,
    TopologyError,
    active_reflection_at_lna,
    assemble,
    build_canceler_topology,
    canceler_ports,
    extrapolated_lna_noise_params,
    ideal_hybrid_s,
    phase_shifter_s,
    reduce_to_external,
    sky_temperature,
    stub_match_s,
    wavelength,
)

from conftest import (
    F0,
    HYBRID_ROLES_4PORT,
    S_LNA,
    lna_s,
    make_spec,
    pol,
    synthetic_hybrid,
    synthetic_hybrid_matrix,
)


class TestIdealHybrid:
    def test_zero_phase_all_real(self):
        s = ideal_hybrid_s(0.0)
        nz = s[np.abs(s) > 0]
        np.testing.assert_allclose(nz, np.full(4, 1 / np.sqrt(2)))

    def test_quadrature_phase(self):
        s = ideal_hybrid_s(90.0)
        assert s[0, 1] == pytest.approx(1j / np.sqrt(2))
        assert s[1, 0] == pytest.approx(1j / np.sqrt(2))

    def test_power_split_structure(self):
        p = 63.0
        s = ideal_hybrid_s(p)
        ss = s @ s.conj().T
        e = np.exp(1j * np.deg2rad(p))
        expected = np.diag([1.0, 0.5, 0.5]).astype(complex)
        expected[1, 2] = e / 2
        expected[2, 1] = np.conj(e) / 2
        np.testing.assert_allclose(ss, expected, atol=1e-15)

    def test_reciprocal_and_matched(self):
        s = ideal_hybrid_s(42.0)
        np.testing.assert_allclose(s, s.T)
        np.testing.assert_allclose(np.diag(s), 0, atol=1e-15)

    def test_common_reflection_keeps_row_norm(self):
        s = ideal_hybrid_s(90.0, pol(0.2, 45))
        assert np.linalg.norm(s[0]) == pytest.approx(1.0)
        assert s[0, 0] == pytest.approx(pol(0.2, 45))


class TestPhaseShifter:
    def test_zero_is_through(self):
        np.testing.assert_allclose(phase_shifter_s(0.0), [[0, 1], [1, 0]])

    def test_half_turn_flips_sign(self):
        s = phase_shifter_s(180.0)
        assert s[1, 0] == pytest.approx(-1.0)

    def test_cascade_adds_phases(self):
        dp1, dp2 = 37.0, 101.0
        topo = SystemTopology(
            (
                ComponentSpec("a", FrequencyResponse.constant(phase_shifter_s(dp1))),
                ComponentSpec("b", FrequencyResponse.constant(phase_shifter_s(dp2))),
            ),
            ((PortRef(0, 1), PortRef(1, 0)),),
        )
        s_ext = reduce_to_external(assemble(topo, F0))
        np.testing.assert_allclose(
            s_ext[1, 0], phase_shifter_s(dp1 + dp2)[1, 0], atol=1e-15
        )


class TestStubMatch:
    def test_degenerate_limit_is_through(self):
        s = stub_match_s(StubMatchSpec(0.0, 1e-24), F0)
        np.testing.assert_allclose(s, [[0, 1], [1, 0]], atol=1e-12)

    def test_half_wave_line(self):
        s = stub_match_s(StubMatchSpec(0.5, 1e-24), F0)
        assert s[1, 0] == pytest.approx(-1.0, rel=1e-12)

    @pytest.mark.parametrize("length", [0.1, 0.3, 0.77])
    @pytest.mark.parametrize("cap", [1e-12, 101e-12, 991e-12])
    def test_lossless(self, length, cap):
        s = stub_match_s(StubMatchSpec(length, cap), F0)
        np.testing.assert_allclose(s @ s.conj().T, np.eye(2), atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            StubMatchSpec(-0.1, 1e-12)
        with pytest.raises(ValueError):
            StubMatchSpec(0.1, 0.0)


class TestTopologyBuilder:
    def test_ideal_port_count(self):
        topo = build_canceler_topology(make_spec(), F0)
        assert topo.n_ports == 14
        assert len(topo.external_ports) == 2

    def test_with_matching_networks(self):
        spec = make_spec(match=StubMatchSpec(0.3, 10e-12))
        topo = build_canceler_topology(spec, F0)
        assert topo.n_ports == 18
        ports = canceler_ports(topo)
        assert len(ports.lna_outputs) == 2

    def test_four_port_hybrids_get_terminations(self):
        spec = make_spec(hybrid=synthetic_hybrid())
        topo = build_canceler_topology(spec, F0)
        assert topo.n_ports == 18
        names = [c.name for c in topo.components]
        assert "termination1" in names and "termination2" in names
        k = np.sum(assemble(topo, F0).k, axis=1)
        assert np.count_nonzero(k == 0) == 2  # amplifier outputs only

    def test_shifter_fold_matches_phase_offset(self):
        """Folding a shifter into the arm equals lowering the hybrid phase."""
        spec = make_spec().with_phases(25.0)
        topo = build_canceler_topology(spec, F0)
        s_hybrid = assemble(topo, F0).s[4:7, 4:7]
        np.testing.assert_allclose(s_hybrid, ideal_hybrid_s(65.0), atol=1e-15)

    def test_measured_roles_are_canonicalized(self):
        scrambled_roles = {"common": 2, "port90": 0, "port0": 3, "isolated": 1}
        base = synthetic_hybrid_matrix(F0)
        perm = [scrambled_roles[r] for r in ("common", "port90", "port0", "isolated")]
        scrambled = np.empty_like(base)
        inv = np.argsort(perm)
        scrambled = base[np.ix_(inv, inv)][np.ix_(perm, perm)]  # sanity identity
        hybrid = MeasuredHybrid(
            FrequencyResponse.constant(base[np.ix_(inv, inv)]), scrambled_roles
        )
        np.testing.assert_allclose(hybrid.response(0.0).at(F0), base, atol=1e-15)

    def test_bad_roles_rejected(self):
        data = FrequencyResponse.constant(synthetic_hybrid_matrix(F0))
        with pytest.raises(TopologyError, match="roles"):
            MeasuredHybrid(data, {"common": 0, "port90": 1, "port0": 2})
        with pytest.raises(TopologyError, match="exactly once"):
            MeasuredHybrid(
                data, {"common": 0, "port90": 0, "port0": 2, "isolated": 3}
            )

    def test_hybrid_loss(self):
        assert IdealHybrid(90.0).loss() == pytest.approx(2.0)
        loss = synthetic_hybrid().loss(F0)
        assert 1.8 < loss < 2.6


class TestActiveReflection:
    def test_quadrature_decoupling_hides_the_array(self):
        for seed in range(3):
            rng = np.random.default_rng(seed)
            s_a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            s_a = 0.4 * (s_a + s_a.T) / 2
            g1, g2 = active_reflection_at_lna(make_spec(antenna=s_a), F0)
            assert abs(g1) < 1e-14 and abs(g2) < 1e-14

    def test_common_reflection_shows_through(self):
        gamma = pol(0.2, 45)
        spec = make_spec(hybrid=IdealHybrid(90.0, gamma))
        g1, g2 = active_reflection_at_lna(spec, F0)
        assert g1 == pytest.approx(gamma, rel=1e-12)
        assert g2 == pytest.approx(gamma, rel=1e-12)

    def test_in_phase_hybrid_averages_reflections(self):
        ga, gr = pol(0.25, 30), pol(0.4, -50)
        spec = make_spec(
            antenna=np.diag([ga, ga]).astype(complex), hybrid=IdealHybrid(0.0)
        )
        spec = type(spec)(
            **{
                **spec.__dict__,
                "replica": FrequencyResponse.constant(np.diag([gr, gr]).astype(complex)),
            }
        )
        g1, _ = active_reflection_at_lna(spec, F0)
        assert g1 == pytest.approx((ga + gr) / 2, rel=1e-12)

    def test_terminated_replica_with_imperfect_hybrid_feels_coupling(self):
        """With a reflective hybrid arm, array coupling reaches the amplifier plane."""
        def gact(s_a12):
            s_a = np.array([[pol(0.3, 100), s_a12], [s_a12, pol(0.3, 100)]])
            spec = make_spec(antenna=s_a, hybrid=synthetic_hybrid())
            spec = type(spec)(
                **{
                    **spec.__dict__,
                    "replica": FrequencyResponse.constant(np.zeros((2, 2))),
                }
            )
            return active_reflection_at_lna(spec, F0)[0]

        assert abs(gact(pol(0.2, -60)) - gact(0j)) > 1e-4


class TestExtrapolatedNoise:
    def test_reference_point(self):
        p = extrapolated_lna_noise_params(0.1)
        assert p.t_min == pytest.approx(1.74)
        assert p.lange_n == pytest.approx(0.31)
        y = (1 - p.gamma_opt) / (1 + p.gamma_opt) / 50.0
        assert y == pytest.approx(0.005 - 0.0005j, rel=1e-12)

    def test_lower_point(self):
        assert extrapolated_lna_noise_params(0.05).t_min == pytest.approx(0.87)

    def test_matched_admittance_identity(self):
        # gamma = 0 corresponds to Y = 1/Z0 = 0.02 S in this mapping
        y = (1 - 0.0) / (1 + 0.0) / 50.0
        assert y == pytest.approx(0.02)

    def test_range_guard(self):
        with pytest.raises(ValueError):
            extrapolated_lna_noise_params(0.9)
        with pytest.raises(ValueError):
            extrapolated_lna_noise_params(0.0)


class TestSky:
    def test_unit_wavelength(self):
        assert sky_temperature(1.0) == pytest.approx(60.0)

    def test_band_edges_match_quoted_scale(self):
        t50 = sky_temperature(wavelength(50e6))
        t100 = sky_temperature(wavelength(100e6))
        assert t50 == pytest.approx(5800.0, rel=0.05)
        assert t100 == pytest.approx(1000.0, rel=0.05)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            sky_temperature(0.0)
