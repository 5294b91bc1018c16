"""Reference component values shared by the experiment scripts."""

import numpy as np

from nwave import (
    CancelerSystemSpec,
    FrequencyResponse,
    IdealHybrid,
    LnaSpec,
    NoiseParams,
    TouchstoneDocument,
)

F0 = 100e6


def pol(mag, deg):
    return mag * np.exp(1j * np.deg2rad(deg))


S_ARRAY = np.array([[pol(0.3, 100), pol(0.2, -60)], [pol(0.2, -60), pol(0.3, 100)]])
S_LNA = np.array([[pol(0.2, -75), pol(0.01, 150)], [pol(3, -150), pol(0.3, -100)]])
NOISE = NoiseParams(t_min=25.0, lange_n=0.03, gamma_opt=pol(0.2, 100))


def reference_spec(
    *,
    gamma_opt=0j,
    s_l11=0j,
    hybrid=None,
    t_antenna=290.0,
    t_replica=0.0,
    t_hybrid=0.0,
    t_lna=290.0,
    match=None,
):
    s = S_LNA.copy()
    s[0, 0] = s_l11
    return CancelerSystemSpec.symmetric(
        antenna=FrequencyResponse.constant(S_ARRAY),
        hybrid=hybrid or IdealHybrid(90.0),
        lna=LnaSpec(FrequencyResponse.constant(s), NoiseParams(25.0, 0.03, gamma_opt)),
        match=match,
        t_antenna=t_antenna,
        t_replica=t_replica,
        t_hybrid=t_hybrid,
        t_lna=t_lna,
    )


def synthetic_wideband_array(n_points=51):
    """Smooth, highly reflective closely-spaced pair over 50 to 100 MHz."""
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
    return TouchstoneDocument(
        n_ports=2,
        freq_unit="Hz",
        parameter_kind="S",
        format="RI",
        reference_impedance=50.0,
        frequencies=freqs,
        matrices=np.stack(mats),
        comments=("synthetic wideband two-element array",),
    )


def synthetic_quadrature_hybrid():
    """Imperfect four-port 90-degree hybrid sampled around 100 MHz."""
    ideal = np.array(
        [[0, 1j, 1, 0], [1j, 0, 0, 1], [1, 0, 0, 1j], [0, 1, 1j, 0]], dtype=complex
    ) / np.sqrt(2)

    def at(f):
        x = (f - F0) / F0
        s = ideal.copy()
        s[0, 1] *= 0.97 * np.exp(1j * np.deg2rad(-3.0 + 8.0 * x))
        s[1, 0] = s[0, 1]
        s[0, 2] *= 1.02 * np.exp(1j * np.deg2rad(1.5 - 5.0 * x))
        s[2, 0] = s[0, 2]
        s[1, 3] *= 0.99 * np.exp(1j * np.deg2rad(2.0))
        s[3, 1] = s[1, 3]
        s[2, 3] *= 1.01 * np.exp(1j * np.deg2rad(-1.0))
        s[3, 2] = s[2, 3]
        for i, (mag, deg) in enumerate(
            [(0.06, -30), (0.05, 80), (0.04, 150), (0.05, -120)]
        ):
            s[i, i] = pol(mag, deg + 20 * x)
        s[0, 3] = s[3, 0] = pol(0.02, 10)
        s[1, 2] = s[2, 1] = pol(0.015, -45)
        norm = np.linalg.norm(s, 2)
        if norm > 0.999:
            s *= 0.999 / norm
        return s

    freqs = np.array([90e6, 100e6, 110e6])
    return TouchstoneDocument(
        n_ports=4,
        freq_unit="Hz",
        parameter_kind="S",
        format="RI",
        reference_impedance=50.0,
        frequencies=freqs,
        matrices=np.stack([at(f) for f in freqs]),
        comments=("synthetic quadrature hybrid",),
    )


def maybe_plot(args, draw):
    """Call ``draw(plt)`` and save a figure when --plot was requested."""
    if not getattr(args, "plot", False):
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    draw(plt)
