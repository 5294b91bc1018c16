"""Shared reference values and synthetic fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from nwave import (
    CancelerSystemSpec,
    ComponentSpec,
    FrequencyResponse,
    IdealHybrid,
    LnaSpec,
    MeasuredHybrid,
    NoiseParams,
    PortRef,
    SystemTopology,
    TouchstoneDocument,
)

F0 = 100e6
T_MIN = 25.0
LANGE_N = 0.03


def pol(mag: float, deg: float) -> complex:
    return mag * np.exp(1j * np.deg2rad(deg))


# reference two-element array and amplifier
S_ARRAY = np.array(
    [[pol(0.3, 100), pol(0.2, -60)], [pol(0.2, -60), pol(0.3, 100)]]
)
S_LNA = np.array(
    [[pol(0.2, -75), pol(0.01, 150)], [pol(3, -150), pol(0.3, -100)]]
)
GAMMA_OPT = pol(0.2, 100)


def lna_s(s11: complex) -> np.ndarray:
    s = S_LNA.copy()
    s[0, 0] = s11
    return s


def make_spec(
    *,
    gamma_opt: complex = 0j,
    s_l11: complex = 0j,
    hybrid: IdealHybrid | MeasuredHybrid | None = None,
    t_antenna: float = 290.0,
    t_replica: float = 0.0,
    t_hybrid: float = 0.0,
    t_lna: float = 290.0,
    match=None,
    antenna: np.ndarray | None = None,
) -> CancelerSystemSpec:
    s_a = S_ARRAY if antenna is None else antenna
    return CancelerSystemSpec.symmetric(
        antenna=FrequencyResponse.constant(s_a),
        hybrid=hybrid or IdealHybrid(90.0),
        lna=LnaSpec(
            FrequencyResponse.constant(lna_s(s_l11)),
            NoiseParams(T_MIN, LANGE_N, gamma_opt),
        ),
        match=match,
        t_antenna=t_antenna,
        t_replica=t_replica,
        t_hybrid=t_hybrid,
        t_lna=t_lna,
    )


def fig_baseline_spec() -> CancelerSystemSpec:
    """Matched noise and input: the starting configuration of the phase sweeps."""
    return make_spec()


def fig_reflective_lna_spec() -> CancelerSystemSpec:
    return make_spec(s_l11=S_LNA[0, 0])


def fig_mismatched_opt_spec() -> CancelerSystemSpec:
    return make_spec(s_l11=S_LNA[0, 0], gamma_opt=GAMMA_OPT)


def fig_warm_spec() -> CancelerSystemSpec:
    return make_spec(
        s_l11=S_LNA[0, 0], gamma_opt=GAMMA_OPT, t_replica=290.0, t_hybrid=290.0
    )


def coherence_baseline_spec() -> CancelerSystemSpec:
    """Amplifier noise only: T_A = T_R = T_H = 0."""
    return make_spec(t_antenna=0.0)


def coherence_reflective_spec() -> CancelerSystemSpec:
    return make_spec(t_antenna=0.0, s_l11=S_LNA[0, 0])


def coherence_mismatched_spec() -> CancelerSystemSpec:
    return make_spec(t_antenna=0.0, s_l11=S_LNA[0, 0], gamma_opt=GAMMA_OPT)


_IDEAL_QUAD_4PORT = np.array(
    [
        [0, 1j, 1, 0],
        [1j, 0, 0, 1],
        [1, 0, 0, 1j],
        [0, 1, 1j, 0],
    ],
    dtype=complex,
) / np.sqrt(2)

HYBRID_ROLES_4PORT = {"common": 0, "port90": 1, "port0": 2, "isolated": 3}


def synthetic_hybrid_matrix(f_hz: float) -> np.ndarray:
    """Deterministic imperfect quadrature hybrid around 100 MHz.

    Small reflections, finite isolation, amplitude imbalance, and a few
    degrees of phase error with a mild frequency slope; scaled to stay
    passive.
    """
    x = (f_hz - F0) / F0
    s = _IDEAL_QUAD_4PORT.copy()
    s[0, 1] *= 0.97 * np.exp(1j * np.deg2rad(-3.0 + 8.0 * x))
    s[1, 0] = s[0, 1]
    s[0, 2] *= 1.02 * np.exp(1j * np.deg2rad(1.5 - 5.0 * x))
    s[2, 0] = s[0, 2]
    s[1, 3] *= 0.99 * np.exp(1j * np.deg2rad(2.0))
    s[3, 1] = s[1, 3]
    s[2, 3] *= 1.01 * np.exp(1j * np.deg2rad(-1.0))
    s[3, 2] = s[2, 3]
    for i, (mag, deg) in enumerate([(0.06, -30), (0.05, 80), (0.04, 150), (0.05, -120)]):
        s[i, i] = pol(mag, deg + 20 * x)
    s[0, 3] = s[3, 0] = pol(0.02, 10)
    s[1, 2] = s[2, 1] = pol(0.015, -45)
    norm = np.linalg.norm(s, 2)
    if norm > 0.999:
        s *= 0.999 / norm
    return s


def synthetic_hybrid_document() -> TouchstoneDocument:
    freqs = np.array([90e6, 100e6, 110e6])
    mats = np.stack([synthetic_hybrid_matrix(f) for f in freqs])
    return TouchstoneDocument(
        n_ports=4,
        freq_unit="Hz",
        parameter_kind="S",
        format="RI",
        reference_impedance=50.0,
        frequencies=freqs,
        matrices=mats,
        comments=("synthetic quadrature hybrid for tests",),
    )


def synthetic_hybrid() -> MeasuredHybrid:
    return MeasuredHybrid(
        FrequencyResponse.sampled(
            synthetic_hybrid_document().frequencies,
            synthetic_hybrid_document().matrices,
        ),
        HYBRID_ROLES_4PORT,
    )


def wideband_array_response(n_points: int = 26) -> FrequencyResponse:
    """Smooth, highly reflective two-element array over 50 to 100 MHz."""
    freqs = np.linspace(50e6, 100e6, n_points)
    mats = []
    for f in freqs:
        x = (f - 50e6) / 50e6
        s11 = pol(0.92 - 0.05 * x, 150.0 - 40.0 * x)
        s12 = pol(0.28 - 0.08 * x, -70.0 - 50.0 * x)
        s = np.array([[s11, s12], [s12, s11]])
        norm = np.linalg.norm(s, 2)
        if norm > 0.98:
            s *= 0.98 / norm
        mats.append(s)
    return FrequencyResponse.sampled(freqs, np.stack(mats))


def random_passive_topology(rng: np.random.Generator, max_components: int = 5):
    """Random all-passive topology with at least one external port.

    Component spectral norms stay below 0.9 so every interconnection is
    comfortably solvable.
    """
    n_comps = int(rng.integers(2, max_components + 1))
    comps = []
    for i in range(n_comps):
        n = int(rng.integers(1, 4))
        s = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        s *= rng.uniform(0.3, 0.9) / np.linalg.norm(s, 2)
        comps.append(
            ComponentSpec(f"c{i}", FrequencyResponse.constant(s), temperature=290.0)
        )
    refs = [
        PortRef(i, p) for i, c in enumerate(comps) for p in range(c.n_ports)
    ]
    order = rng.permutation(len(refs))
    shuffled = [refs[int(k)] for k in order]
    connections = []
    while len(shuffled) >= 3:  # leave at least one external port
        if rng.random() < 0.3:
            break
        connections.append((shuffled.pop(), shuffled.pop()))
    return SystemTopology(tuple(comps), tuple(connections))


@pytest.fixture
def reference_spec():
    return fig_mismatched_opt_spec()
