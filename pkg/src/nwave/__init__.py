"""Noise-wave analysis of interconnected multiport networks.

Assembles component scattering blocks and their interconnections into
b = S(Kb + a_s) + c, propagates thermal and amplifier noise waves
through the resolvent, and evaluates beam noise temperature, output
coherence, and gain.  The canceler and sweep layers reproduce the
two-element replica-array coupling-canceler analyses; the CLI drives
batch runs from JSON configs.
"""

from .network import (
    AssembledSystem,
    ComponentSpec,
    FrequencyCoverageError,
    FrequencyResponse,
    PortRef,
    SystemTopology,
    TopologyError,
    UnstableSystemError,
    Z0,
    assemble,
    build_K,
    compute_Q,
    reduce_to_external,
)
from .noisewave import (
    NoiseParams,
    T0,
    beam_noise_temperature,
    bosma_correlation,
    lna_noise_correlation,
    mutual_coherence,
    output_noise_correlation,
    selection_vector,
    system_noise_correlation,
)
from .gain import (
    correlation_gain,
    embedded_covariance,
    external_excitation_correlation,
    gain,
    response,
)
from .canceler import (
    CancelerPorts,
    CancelerSystemSpec,
    IdealHybrid,
    LnaSpec,
    MeasuredHybrid,
    StubMatchSpec,
    active_reflection_at_lna,
    build_canceler_topology,
    canceler_ports,
    extrapolated_lna_noise_params,
    ideal_hybrid_s,
    phase_shifter_s,
    sky_temperature,
    stub_match_s,
    wavelength,
)
from .sweep import (
    Histogram,
    MatchCandidate,
    MonteCarloResult,
    MonteCarloSpec,
    NullSearchResult,
    PhaseTuner,
    SweepResult,
    SweepSpec,
    find_coherence_nulls,
    gamma_contour_grid,
    histogram,
    matching_search,
    monte_carlo,
    perturb_spec,
    run_sweep,
    sweep_grid,
)
from .touchstone import (
    TouchstoneDocument,
    TouchstoneError,
    interpolate_at,
    parse_touchstone,
    write_touchstone,
)

__version__ = "0.1.0"
