"""Noise-correlation matrices and the receiver figures built from them.

All correlations are carried in kelvin: the spectral density of each
noise-wave product is divided by k*B, so a matched load at 290 K has a
1x1 correlation matrix equal to 290.  Bandwidth never appears.

Passive components get thermal (Bosma) correlations from their
scattering block and physical temperature; amplifiers get the standard
two-port noise-wave matrix from their noise parameters, scaled linearly
with physical temperature around 290 K.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .network import (
    AssembledSystem,
    SystemTopology,
    assemble,
)

T0 = 290.0


class NonPhysicalNoiseWarning(UserWarning):
    """A correlation matrix came out indefinite (e.g. a gain block fed to Bosma)."""


@dataclass(frozen=True)
class NoiseParams:
    """Amplifier noise quadruple: T_min, Lange invariant N, and Gamma_opt."""

    t_min: float
    lange_n: float
    gamma_opt: complex

    def __post_init__(self):
        object.__setattr__(self, "gamma_opt", complex(self.gamma_opt))
        if self.t_min < 0:
            raise ValueError("t_min must be >= 0 K")
        if self.lange_n < 0:
            raise ValueError("lange_n must be >= 0")
        if abs(self.gamma_opt) >= 1:
            raise ValueError(f"|gamma_opt| must be < 1, got {abs(self.gamma_opt):g}")


def hermitize(c: np.ndarray) -> np.ndarray:
    """(C + C†)/2, killing the anti-Hermitian drift of long congruence chains."""
    return 0.5 * (c + c.conj().T)


def _warn_if_indefinite(c: np.ndarray, context: str) -> None:
    trace = float(np.real(np.trace(c)))
    lo = float(np.linalg.eigvalsh(c)[0])
    if lo < -1e-9 * abs(trace):
        warnings.warn(
            f"{context}: correlation matrix is indefinite "
            f"(min eigenvalue {lo:.3g} K, trace {trace:.3g} K)",
            NonPhysicalNoiseWarning,
            stacklevel=3,
        )


def bosma_correlation(s_pass: np.ndarray, temperatures) -> np.ndarray:
    """Thermal noise-wave correlation (I - S S†) T of a passive block, in kelvin.

    ``temperatures`` is a scalar or a per-port vector; each port's row
    of the diagonal temperature matrix uses its component's physical
    temperature.  A block with gain (||S|| > 1) produces an indefinite
    result, which is flagged with a warning rather than rejected.
    """
    s = np.asarray(s_pass, dtype=complex)
    n = s.shape[0]
    t = np.broadcast_to(np.asarray(temperatures, dtype=float), (n,))
    c = hermitize((np.eye(n) - s @ s.conj().T) * t)
    _warn_if_indefinite(c, "bosma_correlation")
    return c


def lna_noise_correlation(s_l: np.ndarray, params: NoiseParams, t_lna: float) -> np.ndarray:
    """Two-port amplifier noise-wave correlation in kelvin.

    Index 0 is the input-port wave, index 1 the output-port wave.  The
    matrix scales linearly with the physical temperature ``t_lna``
    around 290 K.
    """
    s = np.asarray(s_l, dtype=complex)
    s11, s21 = s[0, 0], s[1, 0]
    if s21 == 0:
        raise ValueError("lna_noise_correlation: S21 must be nonzero")
    g = params.gamma_opt
    g2 = abs(g) ** 2
    denom = 1.0 - g2
    tm = params.t_min / T0
    n4 = 4.0 * params.lange_n
    c11 = tm * (abs(s11) ** 2 - 1.0) + n4 * abs(1.0 - s11 * g) ** 2 / denom
    c22 = abs(s21) ** 2 * (tm + n4 * g2 / denom)
    c12 = s11 / s21 * c22 - n4 * np.conj(s21) * np.conj(g) / denom
    return t_lna * np.array([[c11, c12], [np.conj(c12), c22]])


def _resolve_temperatures(
    topology: SystemTopology, temperature_overrides
) -> list[float]:
    temps = [c.temperature for c in topology.components]
    if temperature_overrides:
        for key, value in temperature_overrides.items():
            temps[topology.component_index(key)] = float(value)
    return temps


def system_noise_correlation(
    topology: SystemTopology,
    f: float,
    temperature_overrides: dict | None = None,
    *,
    system: AssembledSystem | None = None,
) -> np.ndarray:
    """Correlation of all component source waves, block-diagonal, in kelvin.

    The whole passive leading block gets one Bosma evaluation with the
    per-port physical temperatures; each amplifier contributes its own
    2x2 block.  Distinct components are uncorrelated.
    ``temperature_overrides`` maps component name (or index) to a
    temperature in kelvin, overriding the topology values; an amplifier
    overridden to 0 K is silent.
    """
    if system is None:
        system = assemble(topology, f)
    temps = _resolve_temperatures(topology, temperature_overrides)
    P = topology.n_ports
    c = np.zeros((P, P), dtype=complex)

    npass = topology.n_passive_ports
    if npass:
        t_pass = np.concatenate(
            [
                np.full(comp.n_ports, temps[i])
                for i, comp in enumerate(topology.components)
                if not comp.is_active
            ]
        )
        c[:npass, :npass] = bosma_correlation(system.s[:npass, :npass], t_pass)

    for i, comp in enumerate(topology.components):
        if comp.is_active:
            sl = topology.component_slice(i)
            c[sl, sl] = lna_noise_correlation(system.s[sl, sl], comp.noise, temps[i])
    return c


def output_noise_correlation(system: AssembledSystem, c: np.ndarray) -> np.ndarray:
    """Correlation Q C Q† of the waves leaving every port, in kelvin."""
    q = system.q
    return hermitize(q @ c @ q.conj().T)


def selection_vector(n_ports: int, weights: dict[int, complex]) -> np.ndarray:
    """Length-P complex vector with the given entries, zero elsewhere."""
    w = np.zeros(n_ports, dtype=complex)
    for idx, val in weights.items():
        w[idx] = val
    return w


def _quadratic_form(system: AssembledSystem, c: np.ndarray, w_i, w_j) -> complex:
    # w_i† Q C Q† w_j evaluated with two adjoint solves instead of a full Q C Q†
    q = system.q
    yi = q.conj().T @ np.asarray(w_i, dtype=complex)
    yj = yi if w_j is w_i else q.conj().T @ np.asarray(w_j, dtype=complex)
    return complex(yi.conj() @ c @ yj)


def beam_noise_temperature(
    topology: SystemTopology,
    f: float,
    w: np.ndarray,
    t_a_reference: float = T0,
    antenna=0,
) -> float:
    """Beam-equivalent receiver noise temperature for beam weights ``w``.

    The numerator is the beam output power with the antenna silent and
    every other source at its physical value; the denominator is the
    output power with only the antenna radiating, at ``t_a_reference``.
    The result is referenced to an isotropic environment at the same
    temperature, so it does not depend on ``t_a_reference``.

    ``antenna`` names (or indexes) the component playing the antenna
    array role; ``w`` must weigh the beamformer-facing external ports.
    """
    ai = topology.component_index(antenna)
    aname = topology.components[ai].name
    system = assemble(topology, f)

    c_num = system_noise_correlation(topology, f, {aname: 0.0}, system=system)
    silent = {comp.name: 0.0 for comp in topology.components}
    silent[aname] = t_a_reference
    c_den = system_noise_correlation(topology, f, silent, system=system)

    num = np.real(_quadratic_form(system, c_num, w, w))
    den = np.real(_quadratic_form(system, c_den, w, w))
    if den <= 0:
        raise ValueError(
            "beam weights have no antenna response (denominator is not positive)"
        )
    return float(t_a_reference * num / den)


def mutual_coherence(
    topology: SystemTopology, f: float, w_i: np.ndarray, w_j: np.ndarray
) -> complex:
    """Cross-correlation of two beam outputs in kelvin, all sources active."""
    system = assemble(topology, f)
    c = system_noise_correlation(topology, f, system=system)
    return _quadratic_form(system, c, w_i, w_j)
