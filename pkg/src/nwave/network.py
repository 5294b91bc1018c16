"""Multiport interconnection: block scattering matrix, connection matrix, solve.

A system is a list of components (each an n-port with scattering data
and a physical temperature, optionally with amplifier noise parameters)
plus a list of port-to-port connections.  Assembly stacks the component
matrices into a block-diagonal S, encodes the connections in a 0/1
matrix K with ``a = K b``, and the resolvent Q = (I - S K)^-1 maps
per-port source waves to the waves leaving every port.

Ports that appear in no connection are external and are implicitly
terminated in the reference impedance (their K rows are zero, so no
wave re-enters the system there).  A single 50 ohm reference impedance
is assumed for all ports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, TYPE_CHECKING

import numpy as np

from . import touchstone as ts

if TYPE_CHECKING:  # pragma: no cover
    from .noisewave import NoiseParams

Z0 = 50.0

CONDITION_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-10


class TopologyError(ValueError):
    """Invalid component list or connection list."""


class FrequencyCoverageError(ValueError):
    """A component has no scattering data at the requested frequency."""


class UnstableSystemError(RuntimeError):
    """(I - S K) is singular or too ill-conditioned to trust."""


@dataclass(frozen=True)
class FrequencyResponse:
    """Scattering data of one n-port, constant or sampled over frequency.

    ``matrices`` is either a single (n, n) matrix (valid at every
    frequency) or an (F, n, n) stack paired with a strictly increasing
    ``frequencies`` grid in Hz, interpolated linearly on real and
    imaginary parts.
    """

    matrices: np.ndarray
    frequencies: np.ndarray | None = None

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        object.__setattr__(self, "matrices", mats)
        if self.frequencies is None:
            if mats.ndim != 2 or mats.shape[0] != mats.shape[1]:
                raise TopologyError(f"constant response must be square, got {mats.shape}")
        else:
            freqs = np.asarray(self.frequencies, dtype=float)
            object.__setattr__(self, "frequencies", freqs)
            if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
                raise TopologyError(f"sampled response must be (F, n, n), got {mats.shape}")
            if freqs.ndim != 1 or len(freqs) != mats.shape[0]:
                raise TopologyError("frequency grid does not match matrix stack")
            if len(freqs) > 1 and not np.all(np.diff(freqs) > 0):
                raise TopologyError("frequency grid must be strictly increasing")

    @classmethod
    def constant(cls, s) -> "FrequencyResponse":
        return cls(matrices=np.asarray(s, dtype=complex))

    @classmethod
    def sampled(cls, frequencies, matrices) -> "FrequencyResponse":
        return cls(matrices=np.asarray(matrices, dtype=complex), frequencies=frequencies)

    @classmethod
    def from_touchstone(cls, doc: ts.TouchstoneDocument) -> "FrequencyResponse":
        if doc.parameter_kind != "S":
            raise TopologyError(
                f"{doc.parameter_kind}-parameter data cannot be used as a scattering block"
            )
        if abs(doc.reference_impedance - Z0) > 1e-9:
            raise TopologyError(
                f"reference impedance {doc.reference_impedance:g} ohm differs from "
                f"{Z0:g} ohm; renormalization is not performed"
            )
        return cls.sampled(doc.frequencies, doc.matrices)

    @property
    def n_ports(self) -> int:
        return self.matrices.shape[-1]

    def covers(self, f: float) -> bool:
        if self.frequencies is None:
            return True
        return bool(self.frequencies[0] <= f <= self.frequencies[-1])

    def at(self, f: float) -> np.ndarray:
        if self.frequencies is None:
            return self.matrices
        if not self.covers(f):
            raise FrequencyCoverageError(
                f"no scattering data at {f:g} Hz "
                f"(grid spans [{self.frequencies[0]:g}, {self.frequencies[-1]:g}] Hz)"
            )
        return ts.interpolate_matrices(self.frequencies, self.matrices, f)


class PortRef(NamedTuple):
    component: int
    port: int


@dataclass(frozen=True)
class ComponentSpec:
    """One sub-network: scattering data, physical temperature, optional noise.

    A component with ``noise`` set is an active two-port amplifier whose
    internal noise follows its noise parameters; otherwise the component
    is passive and its noise is thermal.
    """

    name: str
    response: FrequencyResponse
    temperature: float = 290.0
    noise: "NoiseParams | None" = None

    def __post_init__(self):
        if not self.name:
            raise TopologyError("component name must be non-empty")
        if self.temperature < 0:
            raise TopologyError(f"{self.name}: temperature must be >= 0 K")
        if self.noise is not None and self.response.n_ports != 2:
            raise TopologyError(f"{self.name}: active components must be two-ports")

    @property
    def n_ports(self) -> int:
        return self.response.n_ports

    @property
    def is_active(self) -> bool:
        return self.noise is not None


@dataclass(frozen=True)
class SystemTopology:
    """Ordered components plus unordered port-to-port connections.

    Passive components must precede active ones so the passive ports
    form one contiguous leading block.  Each port may appear in at most
    one connection; a port cannot connect to itself.
    """

    components: tuple[ComponentSpec, ...]
    connections: tuple[tuple[PortRef, PortRef], ...] = ()

    def __post_init__(self):
        comps = tuple(self.components)
        conns = tuple(
            (PortRef(*a), PortRef(*b)) for a, b in self.connections
        )
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "connections", conns)
        if not comps:
            raise TopologyError("topology needs at least one component")
        names = [c.name for c in comps]
        if len(set(names)) != len(names):
            raise TopologyError(f"duplicate component names: {names}")
        seen_active = False
        for c in comps:
            if c.is_active:
                seen_active = True
            elif seen_active:
                raise TopologyError(
                    f"passive component {c.name!r} listed after an active one; "
                    "passive components must come first"
                )
        used: set[PortRef] = set()
        for a, b in conns:
            for ref in (a, b):
                if not (0 <= ref.component < len(comps)):
                    raise TopologyError(f"dangling port reference {ref}")
                if not (0 <= ref.port < comps[ref.component].n_ports):
                    raise TopologyError(f"dangling port reference {ref}")
            if a == b:
                raise TopologyError(f"port {a} connected to itself")
            for ref in (a, b):
                if ref in used:
                    raise TopologyError(f"port {ref} used in more than one connection")
                used.add(ref)

    @cached_property
    def port_offsets(self) -> tuple[int, ...]:
        offsets = []
        total = 0
        for c in self.components:
            offsets.append(total)
            total += c.n_ports
        return tuple(offsets)

    @property
    def n_ports(self) -> int:
        return self.port_offsets[-1] + self.components[-1].n_ports

    @cached_property
    def n_passive_ports(self) -> int:
        return sum(c.n_ports for c in self.components if not c.is_active)

    def global_index(self, ref: PortRef) -> int:
        return self.port_offsets[ref.component] + ref.port

    def component_slice(self, index: int) -> slice:
        off = self.port_offsets[index]
        return slice(off, off + self.components[index].n_ports)

    @cached_property
    def external_ports(self) -> tuple[int, ...]:
        connected = set()
        for a, b in self.connections:
            connected.add(self.global_index(a))
            connected.add(self.global_index(b))
        return tuple(i for i in range(self.n_ports) if i not in connected)

    def component_index(self, name_or_index) -> int:
        if isinstance(name_or_index, int):
            if not (0 <= name_or_index < len(self.components)):
                raise TopologyError(f"no component with index {name_or_index}")
            return name_or_index
        for i, c in enumerate(self.components):
            if c.name == name_or_index:
                return i
        raise TopologyError(f"no component named {name_or_index!r}")


def build_K(topology: SystemTopology) -> np.ndarray:
    """Symmetric 0/1 connection matrix with ``a = K b``.

    Rows of external ports are all zero: nothing re-enters there.
    """
    P = topology.n_ports
    K = np.zeros((P, P))
    for a, b in topology.connections:
        i, j = topology.global_index(a), topology.global_index(b)
        K[i, j] = K[j, i] = 1.0
    return K


@dataclass
class AssembledSystem:
    """Block-diagonal S and connection matrix K of one topology at one frequency."""

    topology: SystemTopology
    frequency: float
    s: np.ndarray
    k: np.ndarray

    @property
    def n_ports(self) -> int:
        return self.s.shape[0]

    @property
    def external_ports(self) -> tuple[int, ...]:
        return self.topology.external_ports

    @cached_property
    def q(self) -> np.ndarray:
        P = self.n_ports
        a = np.eye(P) - self.s @ self.k
        cond = np.linalg.cond(a)
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise UnstableSystemError(
                f"unstable interconnection at {self.frequency:g} Hz "
                f"(condition estimate {cond:.3g})"
            )
        q = np.linalg.solve(a, np.eye(P))
        residual = np.max(np.abs(a @ q - np.eye(P)))
        if residual > RESIDUAL_LIMIT:
            raise UnstableSystemError(
                f"solve residual {residual:.3g} exceeds {RESIDUAL_LIMIT:g} "
                f"at {self.frequency:g} Hz"
            )
        return q


def assemble(topology: SystemTopology, f: float) -> AssembledSystem:
    """Stack component scattering matrices at ``f`` into one system."""
    P = topology.n_ports
    s = np.zeros((P, P), dtype=complex)
    for i, comp in enumerate(topology.components):
        if not comp.response.covers(f):
            raise FrequencyCoverageError(
                f"component {comp.name!r} has no data at {f:g} Hz"
            )
        s[topology.component_slice(i), topology.component_slice(i)] = comp.response.at(f)
    return AssembledSystem(topology=topology, frequency=f, s=s, k=build_K(topology))


def compute_Q(system: AssembledSystem) -> np.ndarray:
    """Resolvent (I - S K)^-1 of the assembled system."""
    return system.q


def reduce_to_external(system: AssembledSystem) -> np.ndarray:
    """Composite scattering matrix seen at the external ports.

    Entries follow the sorted order of the external global indices.
    """
    ext = list(system.external_ports)
    if not ext:
        raise TopologyError("no external ports to reduce to")
    qs = system.q @ system.s
    return qs[np.ix_(ext, ext)]
