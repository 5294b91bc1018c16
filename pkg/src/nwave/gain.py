"""Deterministic signal response and gain figures of an assembled system.

Source waves enter through the same per-port slots as the incident
waves, so with internal noise off the port response is b = Q S a_s.
Gains are ratios of output wave power (or cross-power) to the
corresponding entries of the excitation covariance, making them
invariant to any nonzero rescaling of the selection vectors.
"""

from __future__ import annotations

import numpy as np

from .network import AssembledSystem


def response(system: AssembledSystem, a_s: np.ndarray) -> np.ndarray:
    """Waves leaving every port for source waves ``a_s``, noise silenced."""
    return system.q @ (system.s @ np.asarray(a_s, dtype=complex))


def _normalized(v, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError(f"{what}: selection vector is zero")
    return v / norm


def _output_cross(system: AssembledSystem, a_cov: np.ndarray, w_i, w_j) -> complex:
    qs = system.q @ system.s
    yi = qs.conj().T @ w_i
    yj = yi if w_j is w_i else qs.conj().T @ w_j
    return complex(yi.conj() @ np.asarray(a_cov, dtype=complex) @ yj)


def gain(system: AssembledSystem, a_cov: np.ndarray, w: np.ndarray, delta: np.ndarray) -> float:
    """Power gain from the excitation selected by ``delta`` to the output ``w``.

    ``a_cov`` is the excitation covariance in kelvin (nonzero only on
    the driven slots).  Both selection vectors are normalized
    internally, so the result is invariant to rescaling either one.
    """
    w = _normalized(w, "gain")
    d = _normalized(delta, "gain")
    den = np.real(d.conj() @ np.asarray(a_cov, dtype=complex) @ d)
    if den <= 0:
        raise ValueError("gain: excitation power selected by delta is not positive")
    num = np.real(_output_cross(system, a_cov, w, w))
    return float(num / den)


def correlation_gain(
    system: AssembledSystem,
    a_cov: np.ndarray,
    w_i: np.ndarray,
    w_j: np.ndarray,
    delta_k: np.ndarray,
    delta_l: np.ndarray,
) -> complex:
    """Ratio of output cross-correlation (i, j) to input cross-correlation (k, l).

    Selection vectors are normalized internally (scale-free ratio).
    """
    wi = _normalized(w_i, "correlation_gain")
    wj = _normalized(w_j, "correlation_gain")
    dk = _normalized(delta_k, "correlation_gain")
    dl = _normalized(delta_l, "correlation_gain")
    den = complex(dk.conj() @ np.asarray(a_cov, dtype=complex) @ dl)
    if abs(den) == 0:
        raise ValueError("correlation_gain: input cross-correlation is zero")
    return _output_cross(system, a_cov, wi, wj) / den


def external_excitation_correlation(
    s_antenna: np.ndarray, t_sky: float, t_antenna: float = 0.0
) -> np.ndarray:
    """Excitation covariance of an isotropic scene at ``t_sky``, in kelvin.

    For a lossless array the ohmic branch (thermal correlation at the
    antenna temperature minus the external term at the same temperature)
    vanishes identically, so ``t_antenna`` does not contribute; the
    argument is kept so callers can state the assumed equilibrium
    temperature explicitly.
    """
    s = np.asarray(s_antenna, dtype=complex)
    n = s.shape[0]
    c_ext = (np.eye(n) - s @ s.conj().T) * float(t_sky)
    return 0.5 * (c_ext + c_ext.conj().T)


def embedded_covariance(n_ports: int, slots, block: np.ndarray) -> np.ndarray:
    """Place a small covariance ``block`` at global ``slots`` of a P×P zero matrix."""
    a = np.zeros((n_ports, n_ports), dtype=complex)
    idx = np.ix_(list(slots), list(slots))
    a[idx] = block
    return a
