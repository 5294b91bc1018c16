"""Two-element array with a replica-array coupling canceler.

Wiring of the builder, per channel i = 1, 2:

    antenna_i  <->  hybrid_i 90-degree arm   (phase shifter folded in)
    replica_i  <->  hybrid_i  0-degree arm
    hybrid_i common  <-> [optional stub match] <->  amplifier_i input

Amplifier outputs are the external beamformer-facing ports.  The phase
shifters are ideal matched two-ports, so folding one into a hybrid arm
is exact: it multiplies that arm's row and column by exp(-j*phase).
Four-port hybrids get an internal matched termination on the isolated
port.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .network import (
    ComponentSpec,
    FrequencyResponse,
    PortRef,
    SystemTopology,
    TopologyError,
    Z0,
    assemble,
    reduce_to_external,
)
from .noisewave import NoiseParams, T0

SPEED_OF_LIGHT = 299792458.0


def ideal_hybrid_s(phase_deg: float, common_reflection: complex = 0j) -> np.ndarray:
    """3x3 quadrature-hybrid matrix: port 0 common, port 1 the phased arm, port 2 the 0-degree arm.

    With a nonzero common-port reflection the two through paths are
    rescaled to keep the common row at unit norm.
    """
    gamma = complex(common_reflection)
    if abs(gamma) >= 1:
        raise ValueError("common reflection magnitude must be < 1")
    t = math.sqrt((1.0 - abs(gamma) ** 2) / 2.0)
    e = cmath.exp(1j * math.radians(phase_deg))
    return np.array(
        [
            [gamma, t * e, t],
            [t * e, 0, 0],
            [t, 0, 0],
        ],
        dtype=complex,
    )


def phase_shifter_s(delta_deg: float) -> np.ndarray:
    """Matched lossless two-port with transmission exp(-j*delta)."""
    t = cmath.exp(-1j * math.radians(delta_deg))
    return np.array([[0, t], [t, 0]], dtype=complex)


@dataclass(frozen=True)
class StubMatchSpec:
    """Series 50 ohm line (length in wavelengths) followed by a shunt capacitor."""

    line_length_wavelengths: float
    shunt_capacitance_farads: float
    characteristic_impedance: float = Z0

    def __post_init__(self):
        if self.line_length_wavelengths < 0:
            raise ValueError("line length must be >= 0")
        if self.shunt_capacitance_farads <= 0:
            raise ValueError("shunt capacitance must be > 0")


def stub_match_s(spec: StubMatchSpec, f: float) -> np.ndarray:
    """Two-port of the matching section at ``f``; port 0 is the line side.

    The electrical length is defined at the analysis frequency, so only
    the capacitor's admittance varies with ``f``.  The network is
    lossless by construction.
    """
    if f <= 0:
        raise ValueError("frequency must be positive")
    z0 = spec.characteristic_impedance
    theta = 2.0 * math.pi * spec.line_length_wavelengths
    y = 1j * 2.0 * math.pi * f * spec.shunt_capacitance_farads
    # ABCD cascade: line, then shunt admittance
    a_l = np.array([[math.cos(theta), 1j * z0 * math.sin(theta)],
                    [1j * math.sin(theta) / z0, math.cos(theta)]])
    a_c = np.array([[1.0, 0.0], [y, 1.0]])
    a, b, c, d = (a_l @ a_c).ravel()
    denom = a + b / z0 + c * z0 + d
    return np.array(
        [
            [(a + b / z0 - c * z0 - d) / denom, 2.0 * (a * d - b * c) / denom],
            [2.0 / denom, (-a + b / z0 - c * z0 + d) / denom],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class IdealHybrid:
    phase_deg: float = 90.0
    common_reflection: complex = 0j

    @property
    def n_ports(self) -> int:
        return 3

    def response(self, extra_phase_deg: float = 0.0) -> FrequencyResponse:
        s = ideal_hybrid_s(self.phase_deg, self.common_reflection)
        return FrequencyResponse.constant(_fold_arm_phase(s, extra_phase_deg))

    def loss(self, f: float | None = None) -> float:
        s = ideal_hybrid_s(self.phase_deg, self.common_reflection)
        return 1.0 / abs(s[1, 0]) ** 2


_ROLE_NAMES = ("common", "port90", "port0", "isolated")


@dataclass(frozen=True)
class MeasuredHybrid:
    """Hybrid taken from measured data, with a user-supplied port role map.

    ``roles`` maps role names ("common", "port90", "port0" and, for
    four-ports, "isolated") to physical port indices of the data.  The
    stored response is re-ordered into that canonical role order.
    """

    data: FrequencyResponse
    roles: dict

    def __post_init__(self):
        n = self.data.n_ports
        if n not in (3, 4):
            raise TopologyError(f"hybrid data must be a 3- or 4-port, got {n} ports")
        needed = _ROLE_NAMES[:n]
        if sorted(self.roles) != sorted(needed):
            raise TopologyError(f"port roles must be exactly {needed}, got {sorted(self.roles)}")
        perm = [self.roles[r] for r in needed]
        if sorted(perm) != list(range(n)):
            raise TopologyError(f"port roles must cover ports 0..{n - 1} exactly once")

    @property
    def n_ports(self) -> int:
        return self.data.n_ports

    def _canonical(self) -> FrequencyResponse:
        perm = [self.roles[r] for r in _ROLE_NAMES[: self.n_ports]]
        if self.data.frequencies is None:
            return FrequencyResponse.constant(self.data.matrices[np.ix_(perm, perm)])
        mats = self.data.matrices[:, perm, :][:, :, perm]
        return FrequencyResponse.sampled(self.data.frequencies, mats)

    def response(self, extra_phase_deg: float = 0.0) -> FrequencyResponse:
        canon = self._canonical()
        if canon.frequencies is None:
            return FrequencyResponse.constant(
                _fold_arm_phase(canon.matrices, extra_phase_deg)
            )
        mats = np.stack([_fold_arm_phase(m, extra_phase_deg) for m in canon.matrices])
        return FrequencyResponse.sampled(canon.frequencies, mats)

    def loss(self, f: float) -> float:
        return 1.0 / abs(self._canonical().at(f)[1, 0]) ** 2


def _fold_arm_phase(s: np.ndarray, extra_phase_deg: float) -> np.ndarray:
    if extra_phase_deg == 0.0:
        return np.array(s)
    d = np.ones(s.shape[0], dtype=complex)
    d[1] = cmath.exp(-1j * math.radians(extra_phase_deg))
    return (s * d[:, None]) * d[None, :]


@dataclass(frozen=True)
class LnaSpec:
    response: FrequencyResponse
    noise: NoiseParams

    def __post_init__(self):
        if self.response.n_ports != 2:
            raise TopologyError("amplifier must be a two-port")


@dataclass(frozen=True)
class CancelerSystemSpec:
    """Full description of the two-element canceler receiver.

    Nominally identical pairs (arrays, hybrids, amplifiers, matches) are
    stored separately so they can be perturbed independently.
    """

    antenna: FrequencyResponse
    replica: FrequencyResponse
    hybrid1: IdealHybrid | MeasuredHybrid
    hybrid2: IdealHybrid | MeasuredHybrid
    lna1: LnaSpec
    lna2: LnaSpec
    phase_shift1_deg: float = 0.0
    phase_shift2_deg: float = 0.0
    # a matching section is usually a StubMatchSpec; a raw two-port
    # FrequencyResponse is accepted for perturbed or measured sections
    match1: StubMatchSpec | FrequencyResponse | None = None
    match2: StubMatchSpec | FrequencyResponse | None = None
    t_antenna: float = T0
    t_replica: float = T0
    t_hybrid: float = T0
    t_lna: float = T0
    t_termination: float | None = None

    def __post_init__(self):
        for name in ("antenna", "replica"):
            if getattr(self, name).n_ports != 2:
                raise TopologyError(f"{name} must be a two-port (two elements)")
        if (self.match1 is None) != (self.match2 is None):
            raise TopologyError("matching networks must be present in both channels or neither")

    @classmethod
    def symmetric(
        cls,
        antenna: FrequencyResponse,
        hybrid: IdealHybrid | MeasuredHybrid,
        lna: LnaSpec,
        *,
        replica: FrequencyResponse | None = None,
        match: StubMatchSpec | None = None,
        **temps,
    ) -> "CancelerSystemSpec":
        """Both channels identical; the replica defaults to a copy of the array."""
        return cls(
            antenna=antenna,
            replica=antenna if replica is None else replica,
            hybrid1=hybrid,
            hybrid2=hybrid,
            lna1=lna,
            lna2=lna,
            match1=match,
            match2=match,
            **temps,
        )

    def with_phases(self, dp1: float, dp2: float | None = None) -> "CancelerSystemSpec":
        return replace(
            self,
            phase_shift1_deg=dp1,
            phase_shift2_deg=dp1 if dp2 is None else dp2,
        )


@dataclass(frozen=True)
class CancelerPorts:
    """Global port bookkeeping of a built canceler topology."""

    antenna_inputs: tuple[int, int]
    lna_inputs: tuple[int, int]
    lna_outputs: tuple[int, int]
    hybrid_arm90: tuple[int, int]
    n_ports: int

    def output_selector(self, channel: int) -> np.ndarray:
        w = np.zeros(self.n_ports, dtype=complex)
        w[self.lna_outputs[channel]] = 1.0
        return w

    def equal_beam(self) -> np.ndarray:
        w = np.zeros(self.n_ports, dtype=complex)
        w[list(self.lna_outputs)] = 1.0
        return w

    def antenna_delta(self, element: int) -> np.ndarray:
        d = np.zeros(self.n_ports, dtype=complex)
        d[self.antenna_inputs[element]] = 1.0
        return d


def build_canceler_topology(spec: CancelerSystemSpec, f: float) -> SystemTopology:
    """Materialize the spec into a component list and connection list at ``f``.

    Port count is 14 for ideal three-port hybrids, plus 4 with matching
    networks, plus 4 with four-port hybrids (two extra hybrid ports and
    two termination one-ports).
    """
    hybrids = [
        spec.hybrid1.response(spec.phase_shift1_deg),
        spec.hybrid2.response(spec.phase_shift2_deg),
    ]
    four_port = spec.hybrid1.n_ports == 4 or spec.hybrid2.n_ports == 4

    components = [
        ComponentSpec("antenna", spec.antenna, spec.t_antenna),
        ComponentSpec("replica", spec.replica, spec.t_replica),
        ComponentSpec("hybrid1", hybrids[0], spec.t_hybrid),
        ComponentSpec("hybrid2", hybrids[1], spec.t_hybrid),
    ]
    if four_port:
        t_term = spec.t_hybrid if spec.t_termination is None else spec.t_termination
        load = FrequencyResponse.constant([[0.0]])
        components.append(ComponentSpec("termination1", load, t_term))
        components.append(ComponentSpec("termination2", load, t_term))
    if spec.match1 is not None:
        for name, match in (("match1", spec.match1), ("match2", spec.match2)):
            if isinstance(match, FrequencyResponse):
                resp = match
                if resp.n_ports != 2:
                    raise TopologyError(f"{name}: matching network must be a two-port")
            else:
                resp = FrequencyResponse.sampled([f], [stub_match_s(match, f)])
            components.append(ComponentSpec(name, resp, spec.t_hybrid))
    components.append(ComponentSpec("lna1", spec.lna1.response, spec.t_lna, spec.lna1.noise))
    components.append(ComponentSpec("lna2", spec.lna2.response, spec.t_lna, spec.lna2.noise))

    index = {c.name: i for i, c in enumerate(components)}
    connections = [
        (PortRef(index["antenna"], 0), PortRef(index["hybrid1"], 1)),
        (PortRef(index["antenna"], 1), PortRef(index["hybrid2"], 1)),
        (PortRef(index["replica"], 0), PortRef(index["hybrid1"], 2)),
        (PortRef(index["replica"], 1), PortRef(index["hybrid2"], 2)),
    ]
    if four_port:
        for ch in (1, 2):
            if components[index[f"hybrid{ch}"]].n_ports != 4:
                raise TopologyError("both hybrids must be four-ports to use terminations")
            connections.append(
                (PortRef(index[f"hybrid{ch}"], 3), PortRef(index[f"termination{ch}"], 0))
            )
    for ch in (1, 2):
        common = PortRef(index[f"hybrid{ch}"], 0)
        if spec.match1 is not None:
            connections.append((common, PortRef(index[f"match{ch}"], 0)))
            connections.append(
                (PortRef(index[f"match{ch}"], 1), PortRef(index[f"lna{ch}"], 0))
            )
        else:
            connections.append((common, PortRef(index[f"lna{ch}"], 0)))

    return SystemTopology(tuple(components), tuple(connections))


def canceler_ports(topology: SystemTopology) -> CancelerPorts:
    """Recover the interesting global port indices from a built topology."""
    def g(name: str, port: int) -> int:
        return topology.global_index(PortRef(topology.component_index(name), port))

    return CancelerPorts(
        antenna_inputs=(g("antenna", 0), g("antenna", 1)),
        lna_inputs=(g("lna1", 0), g("lna2", 0)),
        lna_outputs=(g("lna1", 1), g("lna2", 1)),
        hybrid_arm90=(g("hybrid1", 1), g("hybrid2", 1)),
        n_ports=topology.n_ports,
    )


def active_reflection_at_lna(spec: CancelerSystemSpec, f: float) -> tuple[complex, complex]:
    """Reflection looking into the network from each amplifier input plane.

    Computed by removing the amplifiers and reducing the rest of the
    network to its (two) external ports.
    """
    full = build_canceler_topology(spec, f)
    keep = [c for c in full.components if c.name not in ("lna1", "lna2")]
    name_to_new = {c.name: i for i, c in enumerate(keep)}
    conns = []
    for a, b in full.connections:
        ca, cb = full.components[a.component].name, full.components[b.component].name
        if ca in ("lna1", "lna2") or cb in ("lna1", "lna2"):
            continue
        conns.append(
            (PortRef(name_to_new[ca], a.port), PortRef(name_to_new[cb], b.port))
        )
    bare = SystemTopology(tuple(keep), tuple(conns))
    s_ext = reduce_to_external(assemble(bare, f))
    if s_ext.shape != (2, 2):
        raise TopologyError(f"expected two amplifier-side ports, got {s_ext.shape[0]}")
    return complex(s_ext[0, 0]), complex(s_ext[1, 1])


def extrapolated_lna_noise_params(f_ghz: float) -> NoiseParams:
    """Low-frequency noise quadruple of the wideband amplifier model.

    Valid only in the extrapolation regime 0 < f <= 0.8 GHz.
    """
    if not 0.0 < f_ghz <= 0.8:
        raise ValueError(f"extrapolation valid for 0 < f <= 0.8 GHz, got {f_ghz:g}")
    t_min = T0 * 0.06 * f_ghz
    lange_n = 0.34 - 0.3 * f_ghz
    y_opt = (0.01 * f_ghz + 0.004) - 1j * 0.005 * f_ghz
    gamma_opt = (1.0 - Z0 * y_opt) / (1.0 + Z0 * y_opt)
    return NoiseParams(t_min=t_min, lange_n=lange_n, gamma_opt=gamma_opt)


def sky_temperature(wavelength_m: float) -> float:
    """Diffuse sky noise temperature of the power-law model, in kelvin."""
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    return 60.0 * wavelength_m ** 2.55


def wavelength(f_hz: float) -> float:
    """Free-space wavelength in meters."""
    if f_hz <= 0:
        raise ValueError("frequency must be positive")
    return SPEED_OF_LIGHT / f_hz
