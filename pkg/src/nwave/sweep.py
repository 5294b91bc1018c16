"""Parameter sweeps, null searches, matching grid search, and Monte-Carlo runs.

The hot loops (null refinement, Monte-Carlo tuning) go through
:class:`PhaseTuner`, which reuses one assembled system and re-applies
the two phase-shifter settings as diagonal phase factors on the hybrid
arm ports.  That transform is exact, so the tuner agrees with the
general per-point path to machine precision; the agreement is covered
by tests.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .canceler import (
    CancelerSystemSpec,
    IdealHybrid,
    LnaSpec,
    MeasuredHybrid,
    StubMatchSpec,
    active_reflection_at_lna,
    build_canceler_topology,
    canceler_ports,
    stub_match_s,
)
from .gain import correlation_gain, embedded_covariance
from .network import FrequencyResponse, UnstableSystemError, assemble
from .noisewave import (
    T0,
    bosma_correlation,
    lna_noise_correlation,
    system_noise_correlation,
)

SWEEP_OUTPUTS = ("Trec", "T12", "G12", "Gact")
SWEEP_PARAMETERS = ("P_H", "dP_H", "dP_H1", "dP_H2", "frequency")


def sweep_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid start, start+step, ...; the endpoint is included when
    (stop - start) is an integer number of steps."""
    if step <= 0:
        raise ValueError("step must be > 0")
    if start > stop:
        raise ValueError("start must be <= stop")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    step: float
    outputs: tuple[str, ...] = ("Trec", "T12")

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(
                f"unknown sweep parameter {self.parameter!r}; expected one of {SWEEP_PARAMETERS}"
            )
        for out in self.outputs:
            if out not in SWEEP_OUTPUTS:
                raise ValueError(f"unknown output {out!r}; expected a subset of {SWEEP_OUTPUTS}")
        sweep_grid(self.start, self.stop, self.step)  # validates

    @property
    def values(self) -> np.ndarray:
        return sweep_grid(self.start, self.stop, self.step)


@dataclass
class SweepResult:
    parameter: str
    parameter_column: str
    values: np.ndarray
    columns: dict[str, np.ndarray]
    status: list[str]

    def argmin(self, column: str) -> tuple[float, float]:
        """(parameter value, column value) at the smallest finite entry."""
        col = self.columns[column]
        ok = np.isfinite(col)
        if not ok.any():
            raise ValueError(f"no finite values in column {column!r}")
        idx = int(np.flatnonzero(ok)[np.argmin(col[ok])])
        return float(self.values[idx]), float(col[idx])

    def to_csv(self, fp) -> None:
        header = [self.parameter_column, *self.columns.keys(), "status"]
        fp.write(",".join(header) + "\n")
        cols = list(self.columns.values())
        for i, v in enumerate(self.values):
            row = [f"{v:.17g}"]
            row += [f"{c[i]:.17g}" for c in cols]
            row.append(self.status[i].replace(",", ";"))
            fp.write(",".join(row) + "\n")


_PARAMETER_COLUMNS = {
    "P_H": "P_H_deg",
    "dP_H": "dP_H_deg",
    "dP_H1": "dP_H1_deg",
    "dP_H2": "dP_H2_deg",
    "frequency": "frequency_Hz",
}


def apply_parameter(spec: CancelerSystemSpec, name: str, value: float) -> CancelerSystemSpec:
    if name == "P_H":
        if not (isinstance(spec.hybrid1, IdealHybrid) and isinstance(spec.hybrid2, IdealHybrid)):
            raise ValueError("P_H sweeps require ideal hybrids in both channels")
        return replace(
            spec,
            hybrid1=replace(spec.hybrid1, phase_deg=value),
            hybrid2=replace(spec.hybrid2, phase_deg=value),
        )
    if name == "dP_H":
        return spec.with_phases(value)
    if name == "dP_H1":
        return replace(spec, phase_shift1_deg=value)
    if name == "dP_H2":
        return replace(spec, phase_shift2_deg=value)
    raise ValueError(f"unknown parameter {name!r}")


def _columns_for(outputs) -> list[str]:
    cols: list[str] = []
    for out in outputs:
        if out == "Trec":
            cols.append("Trec_K")
        elif out == "T12":
            cols += ["|T12|_K", "arg_T12_deg"]
        elif out == "G12":
            cols += ["|G12|", "arg_G12_deg"]
        elif out == "Gact":
            cols += ["|Gact1|", "arg_Gact1_deg", "|Gact2|", "arg_Gact2_deg"]
    return cols


def evaluate_point(spec: CancelerSystemSpec, f: float, outputs) -> dict[str, float]:
    """All requested outputs of one configuration at one frequency."""
    topology = build_canceler_topology(spec, f)
    ports = canceler_ports(topology)
    system = assemble(topology, f)
    q = system.q
    out: dict[str, float] = {}

    def quad(c, wa, wb):
        ya = q.conj().T @ wa
        yb = ya if wb is wa else q.conj().T @ wb
        return complex(ya.conj() @ c @ yb)

    for name in outputs:
        if name == "Trec":
            w = ports.equal_beam()
            c_num = system_noise_correlation(topology, f, {"antenna": 0.0}, system=system)
            silent = {c.name: 0.0 for c in topology.components}
            silent["antenna"] = T0
            c_den = system_noise_correlation(topology, f, silent, system=system)
            den = np.real(quad(c_den, w, w))
            if den <= 0:
                raise ValueError("beam has no antenna response")
            out["Trec_K"] = T0 * np.real(quad(c_num, w, w)) / den
        elif name == "T12":
            c = system_noise_correlation(topology, f, system=system)
            t12 = quad(c, ports.output_selector(0), ports.output_selector(1))
            out["|T12|_K"] = abs(t12)
            out["arg_T12_deg"] = math.degrees(np.angle(t12))
        elif name == "G12":
            s_a = spec.antenna.at(f)
            a_cov = embedded_covariance(
                ports.n_ports, ports.antenna_inputs, bosma_correlation(s_a, T0)
            )
            g12 = correlation_gain(
                system,
                a_cov,
                ports.output_selector(0),
                ports.output_selector(1),
                ports.antenna_delta(0),
                ports.antenna_delta(1),
            )
            out["|G12|"] = abs(g12)
            out["arg_G12_deg"] = math.degrees(np.angle(g12))
        elif name == "Gact":
            g1, g2 = active_reflection_at_lna(spec, f)
            out["|Gact1|"] = abs(g1)
            out["arg_Gact1_deg"] = math.degrees(np.angle(g1))
            out["|Gact2|"] = abs(g2)
            out["arg_Gact2_deg"] = math.degrees(np.angle(g2))
        else:
            raise ValueError(f"unknown output {name!r}")
    return out


def run_sweep(spec: CancelerSystemSpec, sweep: SweepSpec, frequency_hz: float) -> SweepResult:
    """One row per grid point; per-point numerical failures are flagged, not fatal."""
    values = sweep.values
    col_names = _columns_for(sweep.outputs)
    columns = {name: np.full(len(values), np.nan) for name in col_names}
    status = ["ok"] * len(values)
    for i, v in enumerate(values):
        try:
            if sweep.parameter == "frequency":
                point_spec, f = spec, float(v)
            else:
                point_spec, f = apply_parameter(spec, sweep.parameter, float(v)), frequency_hz
            row = evaluate_point(point_spec, f, sweep.outputs)
        except (UnstableSystemError, ValueError, ArithmeticError) as exc:
            status[i] = f"error: {exc}"
            continue
        for name, val in row.items():
            columns[name][i] = val
    return SweepResult(
        parameter=sweep.parameter,
        parameter_column=_PARAMETER_COLUMNS[sweep.parameter],
        values=values,
        columns=columns,
        status=status,
    )


class PhaseTuner:
    """Batched |T12| and Trec evaluation versus the two phase-shifter settings.

    The underlying system is assembled once with both shifters at zero;
    a setting (dp1, dp2) multiplies the hybrid arm rows and columns of S
    by exp(-j dp), and transforms the source correlations congruently.
    """

    def __init__(self, spec: CancelerSystemSpec, frequency_hz: float):
        base = spec.with_phases(0.0, 0.0)
        self.spec = spec
        self.frequency_hz = frequency_hz
        self.topology = build_canceler_topology(base, frequency_hz)
        self.ports = canceler_ports(self.topology)
        self.system = assemble(self.topology, frequency_hz)
        self._s0 = self.system.s
        self._eye = np.eye(self.topology.n_ports)

        # column gather encoding K: (S K)[:, j] = S[:, partner[j]] or 0
        k = self.system.k
        P = self.topology.n_ports
        partner = np.zeros(P, dtype=int)
        mask = np.zeros(P)
        for j in range(P):
            rows = np.flatnonzero(k[:, j])
            if len(rows):
                partner[j] = rows[0]
                mask[j] = 1.0
        self._partner = partner
        self._mask = mask

        self._c_phys = system_noise_correlation(
            self.topology, frequency_hz, system=self.system
        )
        self._c_num = system_noise_correlation(
            self.topology, frequency_hz, {"antenna": 0.0}, system=self.system
        )
        silent = {c.name: 0.0 for c in self.topology.components}
        silent["antenna"] = T0
        self._c_den = system_noise_correlation(
            self.topology, frequency_hz, silent, system=self.system
        )
        self._w12 = np.stack(
            [self.ports.output_selector(0), self.ports.output_selector(1)], axis=1
        )
        self._w_sum = self.ports.equal_beam()[:, None]

    def _phase_diag(self, dp1, dp2) -> np.ndarray:
        dp1 = np.atleast_1d(np.asarray(dp1, dtype=float))
        dp2 = np.atleast_1d(np.asarray(dp2, dtype=float))
        if dp1.shape != dp2.shape:
            raise ValueError("dp1 and dp2 must have the same shape")
        d = np.ones((len(dp1), self.topology.n_ports), dtype=complex)
        g1, g2 = self.ports.hybrid_arm90
        d[:, g1] = np.exp(-1j * np.deg2rad(dp1))
        d[:, g2] = np.exp(-1j * np.deg2rad(dp2))
        return d

    def _adjoint_solve(self, d: np.ndarray, w: np.ndarray) -> np.ndarray:
        # returns z with z = conj(d) * (A^-H w), so quadratic forms use the
        # untransformed correlation matrices
        s = d[:, :, None] * self._s0[None, :, :] * d[:, None, :]
        sk = s[:, :, self._partner] * self._mask[None, None, :]
        a = self._eye[None, :, :] - sk
        x = np.linalg.solve(a.conj().transpose(0, 2, 1), np.broadcast_to(
            w, (a.shape[0],) + w.shape
        ))
        residual = np.max(np.abs(a.conj().transpose(0, 2, 1) @ x - w))
        if not np.isfinite(residual) or residual > 1e-8:
            raise UnstableSystemError(
                f"tuner solve residual {residual:.3g} at {self.frequency_hz:g} Hz"
            )
        return d.conj()[:, :, None] * x

    def t12_many(self, dp1, dp2) -> np.ndarray:
        """Complex coherence between the two outputs, one value per setting."""
        d = self._phase_diag(dp1, dp2)
        z = self._adjoint_solve(d, self._w12)
        return np.einsum("gp,pq,gq->g", z[:, :, 0].conj(), self._c_phys, z[:, :, 1])

    def trec_many(self, dp1, dp2) -> np.ndarray:
        d = self._phase_diag(dp1, dp2)
        z = self._adjoint_solve(d, self._w_sum)[:, :, 0]
        num = np.einsum("gp,pq,gq->g", z.conj(), self._c_num, z).real
        den = np.einsum("gp,pq,gq->g", z.conj(), self._c_den, z).real
        if np.any(den <= 0):
            raise ValueError("beam has no antenna response")
        return T0 * num / den

    def metric_many(self, metric: str, dp1, dp2) -> np.ndarray:
        if metric == "t12":
            return np.abs(self.t12_many(dp1, dp2))
        if metric == "trec":
            return self.trec_many(dp1, dp2)
        raise ValueError(f"unknown metric {metric!r}")

    def t12(self, dp1: float, dp2: float) -> complex:
        return complex(self.t12_many([dp1], [dp2])[0])

    def trec(self, dp1: float, dp2: float) -> float:
        return float(self.trec_many([dp1], [dp2])[0])


@dataclass(frozen=True)
class NullSearchResult:
    """Local minima of a joint phase sweep after refinement."""

    nulls: tuple[tuple[float, float], ...]  # (phase_deg, metric value)
    resolution_deg: float
    metric: str
    degenerate: bool = False

    @property
    def phases(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.nulls)


def _refine_minimum(
    evaluate, x0: float, lo: float, hi: float, coarse_step: float, refine_step: float
) -> tuple[float, float]:
    x = x0
    step = coarse_step / 4.0
    while True:
        step = max(step, refine_step)
        for _ in range(200):  # walk until the window brackets a local minimum
            grid = np.clip(x + step * np.arange(-4, 5), lo, hi)
            vals = evaluate(grid)
            j = int(np.argmin(vals))
            if 0 < j < len(grid) - 1 or grid[j] in (lo, hi):
                x = float(grid[j])
                break
            x = float(grid[j])
        if step <= refine_step:
            grid = np.clip(x + refine_step * np.arange(-1, 2), lo, hi)
            vals = evaluate(grid)
            j = int(np.argmin(vals))
            return float(grid[j]), float(vals[j])
        step /= 4.0


def find_coherence_nulls(
    spec: CancelerSystemSpec,
    frequency_hz: float,
    phase_start_deg: float = 0.0,
    phase_stop_deg: float = 180.0,
    coarse_step_deg: float = 1.0,
    refine_step_deg: float = 0.005,
    metric: str = "t12",
    axis: str = "dP_H",
) -> NullSearchResult:
    """Coarse joint phase sweep, then local refinement of every dip.

    ``axis="dP_H"`` sweeps both phase shifters together; ``axis="P_H"``
    sweeps the ideal-hybrid phase itself (a joint shifter setting of
    -P_H on a zero-phase hybrid, which is the same system).  A sweep
    whose metric never rises above numerical dust is reported as a
    degenerate trough with no discrete nulls.
    """
    if refine_step_deg > coarse_step_deg:
        raise ValueError("refine step must be <= coarse step")
    if axis == "dP_H":
        tuner = PhaseTuner(spec, frequency_hz)
        evaluate = lambda xs: tuner.metric_many(metric, xs, xs)
    elif axis == "P_H":
        tuner = PhaseTuner(apply_parameter(spec, "P_H", 0.0), frequency_hz)
        evaluate = lambda xs: tuner.metric_many(metric, -np.asarray(xs), -np.asarray(xs))
    else:
        raise ValueError(f"unknown axis {axis!r}")
    grid = sweep_grid(phase_start_deg, phase_stop_deg, coarse_step_deg)
    vals = evaluate(grid)

    peak = float(np.max(vals))
    if peak <= 1e-12 or peak - float(np.min(vals)) <= 1e-9 * peak:
        return NullSearchResult((), refine_step_deg, metric, degenerate=True)

    candidates = [
        float(grid[i])
        for i in range(1, len(grid) - 1)
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]
    ]
    # a dip running into a range edge is still a tunable minimum; ask for a
    # genuine dip (below mid-range), not a one-sample wiggle at a peak
    mid = 0.5 * (peak + float(np.min(vals)))
    if vals[0] < vals[1] and vals[0] < mid:
        candidates.insert(0, float(grid[0]))
    if vals[-1] < vals[-2] and vals[-1] < mid:
        candidates.append(float(grid[-1]))
    if not candidates:
        raise ValueError("no minimum in the scanned phase range")

    refined: list[tuple[float, float]] = []
    for x0 in candidates:
        x, v = _refine_minimum(
            evaluate, x0, phase_start_deg, phase_stop_deg, coarse_step_deg, refine_step_deg
        )
        for k, (xp, vp) in enumerate(refined):
            if abs(x - xp) <= max(2 * refine_step_deg, 0.5 * coarse_step_deg):
                if v < vp:
                    refined[k] = (x, v)
                break
        else:
            refined.append((x, v))
    refined.sort()
    return NullSearchResult(tuple(refined), refine_step_deg, metric)


@dataclass(frozen=True)
class MatchCandidate:
    match: StubMatchSpec
    null_phases_deg: tuple[float, float]
    null_values_k: tuple[float, float]
    separation_deg: float


def matching_search(
    spec: CancelerSystemSpec,
    frequency_hz: float,
    line_lengths=None,
    capacitances=None,
    coincidence_tolerance_deg: float = 4.0,
    coarse_step_deg: float = 1.0,
    refine_step_deg: float = 0.005,
    phase_start_deg: float = 0.0,
    phase_stop_deg: float = 180.0,
) -> list[MatchCandidate]:
    """Grid search for matching sections that pull the two coherence nulls together.

    For each candidate the two deepest nulls are located; candidates
    whose null separation is below the tolerance are returned, closest
    pair first.  The result may be empty.
    """
    if line_lengths is None:
        line_lengths = sweep_grid(0.0, 1.0, 0.1)
    if capacitances is None:
        capacitances = sweep_grid(1e-12, 1e-9, 10e-12)
    found: list[MatchCandidate] = []
    for length in line_lengths:
        for cap in capacitances:
            m = StubMatchSpec(float(length), float(cap))
            trial = replace(spec, match1=m, match2=m)
            try:
                result = find_coherence_nulls(
                    trial,
                    frequency_hz,
                    phase_start_deg=phase_start_deg,
                    phase_stop_deg=phase_stop_deg,
                    coarse_step_deg=coarse_step_deg,
                    refine_step_deg=refine_step_deg,
                )
            except (UnstableSystemError, ValueError):
                continue
            if result.degenerate or len(result.nulls) < 2:
                continue
            deepest = sorted(result.nulls, key=lambda nv: nv[1])[:2]
            sep = abs(deepest[0][0] - deepest[1][0])
            if sep < coincidence_tolerance_deg:
                found.append(
                    MatchCandidate(
                        match=m,
                        null_phases_deg=(deepest[0][0], deepest[1][0]),
                        null_values_k=(deepest[0][1], deepest[1][1]),
                        separation_deg=sep,
                    )
                )
    found.sort(key=lambda c: c.separation_deg)
    return found


@dataclass(frozen=True)
class MonteCarloSpec:
    """Component-mismatch study: every scattering element's magnitude and
    phase (in degrees), and each amplifier's gamma_opt, gets an independent
    relative perturbation drawn uniformly from ±relative_fraction."""

    relative_fraction: float
    iterations: int
    seed: int
    absolute_phase_jitter_deg: float = 0.0

    def __post_init__(self):
        if not 0 <= self.relative_fraction < 1:
            raise ValueError("relative_fraction must be in [0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def _perturb_matrix(m: np.ndarray, fraction: float, rng, jitter_deg: float) -> np.ndarray:
    mag = np.abs(m)
    phase_deg = np.degrees(np.angle(m))
    u = rng.uniform(-fraction, fraction, size=(2,) + m.shape)
    mag = mag * (1.0 + u[0])
    phase_deg = phase_deg * (1.0 + u[1])
    if jitter_deg > 0.0:
        phase_deg = phase_deg + rng.uniform(-jitter_deg, jitter_deg, size=m.shape)
    return mag * np.exp(1j * np.deg2rad(phase_deg))


def _perturb_scalar(v: complex, fraction: float, rng, jitter_deg: float) -> complex:
    return complex(_perturb_matrix(np.array([[v]]), fraction, rng, jitter_deg)[0, 0])


def perturb_spec(
    spec: CancelerSystemSpec,
    frequency_hz: float,
    fraction: float,
    rng,
    absolute_phase_jitter_deg: float = 0.0,
) -> CancelerSystemSpec:
    """Independent mismatch draw for every component, materialized at one frequency.

    The perturbed system is single-frequency; the phase-shifter settings
    are left untouched so they remain available as tuning knobs.
    """

    def pert(m):
        return _perturb_matrix(
            np.asarray(m, dtype=complex), fraction, rng, absolute_phase_jitter_deg
        )

    f = frequency_hz
    antenna = FrequencyResponse.constant(pert(spec.antenna.at(f)))
    replica = FrequencyResponse.constant(pert(spec.replica.at(f)))

    def pert_hybrid(h):
        s = pert(h.response(0.0).at(f))
        roles = {name: i for i, name in enumerate(("common", "port90", "port0", "isolated")[: h.n_ports])}
        return MeasuredHybrid(FrequencyResponse.constant(s), roles)

    hybrid1 = pert_hybrid(spec.hybrid1)
    hybrid2 = pert_hybrid(spec.hybrid2)

    def pert_match(m):
        if m is None:
            return None
        s = m if isinstance(m, FrequencyResponse) else FrequencyResponse.constant(stub_match_s(m, f))
        return FrequencyResponse.constant(pert(s.at(f)))

    match1 = pert_match(spec.match1)
    match2 = pert_match(spec.match2)

    def pert_lna(lna):
        s = pert(lna.response.at(f))
        g = _perturb_scalar(lna.noise.gamma_opt, fraction, rng, absolute_phase_jitter_deg)
        return LnaSpec(FrequencyResponse.constant(s), replace(lna.noise, gamma_opt=g))

    lna1 = pert_lna(spec.lna1)
    lna2 = pert_lna(spec.lna2)

    return replace(
        spec,
        antenna=antenna,
        replica=replica,
        hybrid1=hybrid1,
        hybrid2=hybrid2,
        match1=match1,
        match2=match2,
        lna1=lna1,
        lna2=lna2,
    )


@dataclass
class MonteCarloResult:
    min_t12_k: np.ndarray
    phase1_deg: np.ndarray
    phase2_deg: np.ndarray
    seed: int
    relative_fraction: float
    tune: str
    frequency_hz: float

    def share_below(self, threshold_k: float) -> float:
        return float(np.mean(self.min_t12_k < threshold_k))


def _iteration_rng(seed: int, iteration: int):
    # substream derived from (seed, iteration): reproducible and order-free
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, iteration])))


def _tune_joint(tuner: PhaseTuner, start, stop, coarse, refine) -> tuple[float, float, float]:
    grid = sweep_grid(start, stop, coarse)
    vals = np.abs(tuner.t12_many(grid, grid))
    j = int(np.argmin(vals))
    evaluate = lambda xs: np.abs(tuner.t12_many(xs, xs))
    x, v = _refine_minimum(evaluate, float(grid[j]), start, stop, coarse, refine)
    return x, x, v


def _tune_independent(
    tuner: PhaseTuner, center: tuple[float, float], window: float, refine: float
) -> tuple[float, float, float]:
    # 5x5 shrinking-grid descent, clamped to the window box around the center
    c1, c2 = center
    lo1, hi1 = c1 - window, c1 + window
    lo2, hi2 = c2 - window, c2 + window
    x1, x2 = c1, c2
    step = window / 2.0
    offsets = np.arange(-2, 3)
    while True:
        step = max(step, refine)
        for _ in range(200):
            g1 = np.clip(x1 + step * offsets, lo1, hi1)
            g2 = np.clip(x2 + step * offsets, lo2, hi2)
            m1, m2 = np.meshgrid(g1, g2, indexing="ij")
            vals = np.abs(tuner.t12_many(m1.ravel(), m2.ravel())).reshape(m1.shape)
            i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
            moved = (g1[i] != x1) or (g2[j] != x2)
            x1, x2 = float(g1[i]), float(g2[j])
            interior = 0 < i < len(g1) - 1 and 0 < j < len(g2) - 1
            if interior or not moved:
                break
        if step <= refine:
            return x1, x2, float(vals[i, j])
        step /= 3.0


def monte_carlo(
    spec: CancelerSystemSpec,
    mc: MonteCarloSpec,
    frequency_hz: float,
    tune: str = "independent",
    phase_start_deg: float = 0.0,
    phase_stop_deg: float = 180.0,
    coarse_step_deg: float = 1.0,
    refine_step_deg: float = 0.005,
    independent_window_deg: float = 3.0,
    threads: int = 1,
) -> MonteCarloResult:
    """Distribution of the tunable minimum of |T12| under component mismatch.

    Per iteration the spec is perturbed, then the joint phase setting is
    swept and refined; with ``tune="independent"`` the two phases are
    additionally trimmed separately inside a ±window box around the
    joint optimum, which keeps the independent result at or below the
    joint one.  Results are reproducible from the seed alone and do not
    depend on the thread count.
    """
    if tune not in ("none", "joint", "independent"):
        raise ValueError(f"unknown tuning mode {tune!r}")

    def one(iteration: int) -> tuple[float, float, float]:
        rng = _iteration_rng(mc.seed, iteration)
        trial = perturb_spec(
            spec, frequency_hz, mc.relative_fraction, rng, mc.absolute_phase_jitter_deg
        )
        tuner = PhaseTuner(trial, frequency_hz)
        if tune == "none":
            p1 = spec.phase_shift1_deg
            p2 = spec.phase_shift2_deg
            return p1, p2, abs(tuner.t12(p1, p2))
        p1, p2, v = _tune_joint(
            tuner, phase_start_deg, phase_stop_deg, coarse_step_deg, refine_step_deg
        )
        if tune == "independent":
            q1, q2, vi = _tune_independent(
                tuner, (p1, p2), independent_window_deg, refine_step_deg
            )
            if vi <= v:
                p1, p2, v = q1, q2, vi
        return p1, p2, v

    indices = range(mc.iterations)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, indices))
    else:
        rows = [one(i) for i in indices]

    p1s, p2s, vs = (np.array([r[k] for r in rows]) for k in range(3))
    return MonteCarloResult(
        min_t12_k=vs,
        phase1_deg=p1s,
        phase2_deg=p2s,
        seed=mc.seed,
        relative_fraction=mc.relative_fraction,
        tune=tune,
        frequency_hz=frequency_hz,
    )


@dataclass(frozen=True)
class Histogram:
    bin_edges_k: np.ndarray
    counts: np.ndarray
    n_suppressed: int


def histogram(values, bin_width_k: float, cutoff_k: float) -> Histogram:
    """Counts per bin over [0, cutoff); values at or above the cutoff are suppressed."""
    if bin_width_k <= 0:
        raise ValueError("bin width must be > 0")
    if cutoff_k <= 0:
        raise ValueError("cutoff must be > 0")
    vals = np.asarray(values, dtype=float)
    n_bins = int(math.ceil(cutoff_k / bin_width_k - 1e-9))
    edges = bin_width_k * np.arange(n_bins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    suppressed = int(np.sum(vals >= edges[-1])) if vals.size else 0
    return Histogram(bin_edges_k=edges, counts=counts, n_suppressed=suppressed)


@dataclass(frozen=True)
class ContourResult:
    radii: np.ndarray
    phases_deg: np.ndarray
    values: np.ndarray  # (len(radii), len(phases))
    argmin: tuple[float, float, float]  # radius, phase_deg, value


def gamma_contour_grid(
    spec: CancelerSystemSpec,
    frequency_hz: float,
    radii=None,
    phases_deg=None,
    metric: str = "trec",
) -> ContourResult:
    """Evaluate Trec or |T12| over a polar grid of amplifier gamma_opt values.

    Only the amplifier noise blocks depend on gamma_opt, so the system
    solve is done once and each grid point costs two 2x2 forms.
    """
    if radii is None:
        radii = sweep_grid(0.0, 0.98, 0.02)
    if phases_deg is None:
        phases_deg = sweep_grid(0.0, 355.0, 5.0)
    radii = np.asarray(radii, dtype=float)
    phases_deg = np.asarray(phases_deg, dtype=float)
    if np.any(radii >= 1) or np.any(radii < 0):
        raise ValueError("gamma_opt radii must lie in [0, 1)")
    if metric not in ("trec", "t12"):
        raise ValueError(f"unknown metric {metric!r}")

    topology = build_canceler_topology(spec, frequency_hz)
    ports = canceler_ports(topology)
    system = assemble(topology, frequency_hz)
    q = system.q

    lna_names = ("lna1", "lna2")
    lna_slices = [topology.component_slice(topology.component_index(n)) for n in lna_names]
    lna_s = [system.s[sl, sl] for sl in lna_slices]
    lna_specs = [spec.lna1, spec.lna2]
    t_lna = spec.t_lna

    def zero_lna(c):
        c = c.copy()
        for sl in lna_slices:
            c[sl, sl] = 0.0
        return c

    if metric == "trec":
        w = ports.equal_beam()
        y = q.conj().T @ w
        c_num = zero_lna(
            system_noise_correlation(topology, frequency_hz, {"antenna": 0.0}, system=system)
        )
        silent = {c.name: 0.0 for c in topology.components}
        silent["antenna"] = T0
        c_den = system_noise_correlation(topology, frequency_hz, silent, system=system)
        base = float(np.real(y.conj() @ c_num @ y))
        den = float(np.real(y.conj() @ c_den @ y))
        if den <= 0:
            raise ValueError("beam has no antenna response")
        y_lna = [y[sl] for sl in lna_slices]

        def value(gamma):
            acc = base
            for yi, s, ln in zip(y_lna, lna_s, lna_specs):
                cl = lna_noise_correlation(s, replace(ln.noise, gamma_opt=gamma), t_lna)
                acc += float(np.real(yi.conj() @ cl @ yi))
            return T0 * acc / den

    else:
        y1 = q.conj().T @ ports.output_selector(0)
        y2 = q.conj().T @ ports.output_selector(1)
        c_phys = zero_lna(system_noise_correlation(topology, frequency_hz, system=system))
        base12 = complex(y1.conj() @ c_phys @ y2)
        y1_lna = [y1[sl] for sl in lna_slices]
        y2_lna = [y2[sl] for sl in lna_slices]

        def value(gamma):
            acc = base12
            for ya, yb, s, ln in zip(y1_lna, y2_lna, lna_s, lna_specs):
                cl = lna_noise_correlation(s, replace(ln.noise, gamma_opt=gamma), t_lna)
                acc += complex(ya.conj() @ cl @ yb)
            return abs(acc)

    values = np.empty((len(radii), len(phases_deg)))
    for i, r in enumerate(radii):
        for j, ph in enumerate(phases_deg):
            values[i, j] = value(r * np.exp(1j * np.deg2rad(ph)))
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    return ContourResult(
        radii=radii,
        phases_deg=phases_deg,
        values=values,
        argmin=(float(radii[i]), float(phases_deg[j]), float(values[i, j])),
    )
