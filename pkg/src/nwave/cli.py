"""Batch front end: JSON config in, CSV results plus a JSON metadata sidecar out.

Usage:
    nwave <analysis> --config cfg.json --out outdir [--seed N] [--threads N]

The analysis name must match ``analysis.kind`` in the config when that
field is present.  Exit status: 0 success, 2 config error, 3 numerical
failure.  Outputs are bit-identical for identical config and seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .canceler import (
    CancelerSystemSpec,
    IdealHybrid,
    LnaSpec,
    MeasuredHybrid,
    StubMatchSpec,
    extrapolated_lna_noise_params,
)
from .network import FrequencyResponse, TopologyError, UnstableSystemError
from .noisewave import NoiseParams
from .sweep import (
    MonteCarloSpec,
    SweepSpec,
    find_coherence_nulls,
    gamma_contour_grid,
    histogram,
    matching_search,
    monte_carlo,
    run_sweep,
    sweep_grid,
)
from . import touchstone as ts

ANALYSES = (
    "analyze",
    "sweep-phase",
    "contour",
    "null-search",
    "match-search",
    "monte-carlo",
    "wideband",
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    """Anything wrong with the run configuration."""


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def parse_complex(value, where: str) -> complex:
    """Accept {"mag":, "deg":}, {"re":, "im":}, or a bare real number."""
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, dict):
        if set(value) == {"mag", "deg"}:
            return value["mag"] * np.exp(1j * np.deg2rad(value["deg"]))
        if set(value) == {"re", "im"}:
            return complex(value["re"], value["im"])
    raise ConfigError(f"{where}: expected a number, {{mag, deg}}, or {{re, im}}")


def complex_to_json(z: complex) -> dict:
    return {"mag": abs(z), "deg": math.degrees(np.angle(z))}


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where}: expected a matrix (list of rows)")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ConfigError(f"{where}[{i}]: expected a list")
        rows.append([parse_complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    m = np.array(rows, dtype=complex)
    if m.shape[0] != m.shape[1]:
        raise ConfigError(f"{where}: matrix must be square, got {m.shape}")
    return m


def _load_touchstone(path_str: str, base_dir: Path, where: str) -> ts.TouchstoneDocument:
    path = Path(path_str)
    if not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"{where}: Touchstone file not found: {path}")
    suffix = path.suffix.lower()
    if len(suffix) >= 4 and suffix.startswith(".s") and suffix.endswith("p"):
        try:
            n_ports = int(suffix[2:-1])
        except ValueError:
            raise ConfigError(f"{where}: cannot infer port count from {path.name!r}")
    else:
        raise ConfigError(f"{where}: expected a .sNp file name, got {path.name!r}")
    try:
        return ts.parse_touchstone(path.read_text(), n_ports)
    except ts.TouchstoneError as exc:
        raise ConfigError(f"{where}: {path}: {exc}") from exc


def _response(obj, base_dir: Path, where: str) -> FrequencyResponse:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    if "touchstone" in obj:
        doc = _load_touchstone(obj["touchstone"], base_dir, where)
        try:
            return FrequencyResponse.from_touchstone(doc)
        except TopologyError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    if "s" in obj:
        return FrequencyResponse.constant(_matrix(obj["s"], f"{where}.s"))
    raise ConfigError(f"{where}: needs either 's' or 'touchstone'")


def _hybrid(obj, base_dir: Path, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    if "ideal" in obj:
        ideal = obj["ideal"]
        gamma = parse_complex(ideal.get("common_reflection", 0.0), f"{where}.ideal.common_reflection")
        return IdealHybrid(phase_deg=float(ideal.get("phase_deg", 90.0)), common_reflection=gamma)
    if "touchstone" in obj:
        data = _response({"touchstone": obj["touchstone"]}, base_dir, where)
        roles = obj.get("roles")
        if not isinstance(roles, dict):
            raise ConfigError(f"{where}.roles: required for measured hybrids")
        try:
            return MeasuredHybrid(data, {k: int(v) for k, v in roles.items()})
        except TopologyError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: needs either 'ideal' or 'touchstone'")


def _noise_params(obj, where: str) -> NoiseParams | str:
    if obj == "extrapolated":
        return "extrapolated"
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected noise parameters or 'extrapolated'")
    try:
        return NoiseParams(
            t_min=float(obj["t_min"]),
            lange_n=float(obj["lange_n"]),
            gamma_opt=parse_complex(obj["gamma_opt"], f"{where}.gamma_opt"),
        )
    except KeyError as exc:
        raise ConfigError(f"{where}: missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _lna(obj, base_dir: Path, where: str) -> tuple[FrequencyResponse, NoiseParams | str]:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    resp = _response(obj, base_dir, where)
    if "noise" not in obj:
        raise ConfigError(f"{where}.noise: required")
    return resp, _noise_params(obj["noise"], f"{where}.noise")


def _match(obj, where: str) -> StubMatchSpec | None:
    if obj is None:
        return None
    try:
        return StubMatchSpec(
            line_length_wavelengths=float(obj["line_length_wavelengths"]),
            shunt_capacitance_farads=float(obj["shunt_capacitance_farads"]),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(
            f"{where}: needs line_length_wavelengths and shunt_capacitance_farads"
        ) from exc
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def build_system(cfg: dict, base_dir: Path) -> tuple[CancelerSystemSpec, NoiseParams | str]:
    """Canceler spec from the config's ``system`` object.

    Returns the spec plus the noise mode: concrete parameters already
    set on the spec, or the string "extrapolated" when per-frequency
    parameters must be substituted by the analysis.
    """
    sys_cfg = cfg.get("system")
    if not isinstance(sys_cfg, dict):
        raise ConfigError("system: required object")

    antenna = _response(sys_cfg.get("antenna"), base_dir, "system.antenna")
    replica = (
        _response(sys_cfg["replica"], base_dir, "system.replica")
        if "replica" in sys_cfg
        else antenna
    )
    hybrid1 = _hybrid(sys_cfg.get("hybrid"), base_dir, "system.hybrid")
    hybrid2 = _hybrid(sys_cfg["hybrid2"], base_dir, "system.hybrid2") if "hybrid2" in sys_cfg else hybrid1

    lna_resp, noise_mode = _lna(sys_cfg.get("lna"), base_dir, "system.lna")
    if "lna2" in sys_cfg:
        lna2_resp, noise_mode2 = _lna(sys_cfg["lna2"], base_dir, "system.lna2")
        if (noise_mode == "extrapolated") != (noise_mode2 == "extrapolated"):
            raise ConfigError("system.lna2: both amplifiers must use the same noise mode")
    else:
        lna2_resp, noise_mode2 = lna_resp, noise_mode
    placeholder = NoiseParams(0.0, 0.0, 0.0)
    lna1 = LnaSpec(lna_resp, placeholder if noise_mode == "extrapolated" else noise_mode)
    lna2 = LnaSpec(lna2_resp, placeholder if noise_mode2 == "extrapolated" else noise_mode2)

    shifts = sys_cfg.get("phase_shift_deg", 0.0)
    if isinstance(shifts, (int, float)):
        shifts = [shifts, shifts]
    if not (isinstance(shifts, list) and len(shifts) == 2):
        raise ConfigError("system.phase_shift_deg: scalar or [dp1, dp2]")

    match_cfg = sys_cfg.get("match")
    match1 = match2 = None
    if match_cfg is not None:
        if isinstance(match_cfg, list):
            if len(match_cfg) != 2:
                raise ConfigError("system.match: one object or a list of two")
            match1 = _match(match_cfg[0], "system.match[0]")
            match2 = _match(match_cfg[1], "system.match[1]")
        else:
            match1 = match2 = _match(match_cfg, "system.match")

    temps = sys_cfg.get("temperatures", {})
    if not isinstance(temps, dict):
        raise ConfigError("system.temperatures: expected an object")
    known = {"antenna", "replica", "hybrid", "lna", "termination"}
    unknown = set(temps) - known
    if unknown:
        raise ConfigError(f"system.temperatures: unknown keys {sorted(unknown)}")

    try:
        spec = CancelerSystemSpec(
            antenna=antenna,
            replica=replica,
            hybrid1=hybrid1,
            hybrid2=hybrid2,
            lna1=lna1,
            lna2=lna2,
            phase_shift1_deg=float(shifts[0]),
            phase_shift2_deg=float(shifts[1]),
            match1=match1,
            match2=match2,
            t_antenna=float(temps.get("antenna", 290.0)),
            t_replica=float(temps.get("replica", 290.0)),
            t_hybrid=float(temps.get("hybrid", 290.0)),
            t_lna=float(temps.get("lna", 290.0)),
            t_termination=(
                float(temps["termination"]) if "termination" in temps else None
            ),
        )
    except (TopologyError, ValueError) as exc:
        raise ConfigError(f"system: {exc}") from exc
    mode = "extrapolated" if noise_mode == "extrapolated" else "explicit"
    return spec, mode


def _frequency(cfg: dict) -> float:
    f = cfg.get("frequency_hz")
    if not isinstance(f, (int, float)) or f <= 0:
        raise ConfigError("frequency_hz: required positive number")
    return float(f)


def _with_extrapolated_noise(spec: CancelerSystemSpec, f: float) -> CancelerSystemSpec:
    params = extrapolated_lna_noise_params(f / 1e9)
    return replace(
        spec,
        lna1=LnaSpec(spec.lna1.response, params),
        lna2=LnaSpec(spec.lna2.response, params),
    )


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w") as fp:
        fp.write(",".join(header) + "\n")
        for row in rows:
            cells = [c if isinstance(c, str) else _fmt(c) for c in row]
            fp.write(",".join(cells) + "\n")


def _analysis_cfg(cfg: dict, kind: str) -> dict:
    a = cfg.get("analysis", {})
    if not isinstance(a, dict):
        raise ConfigError("analysis: expected an object")
    declared = a.get("kind")
    if declared is not None and declared != kind:
        raise ConfigError(f"analysis.kind is {declared!r} but the command is {kind!r}")
    return a


def _require_explicit_noise(mode: str, kind: str) -> None:
    if mode == "extrapolated":
        raise ConfigError(
            f"analysis {kind!r} needs explicit amplifier noise parameters "
            "(extrapolated noise is only available for 'wideband')"
        )


def _run_analyze(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    from .sweep import evaluate_point

    _require_explicit_noise(mode, "analyze")
    f = _frequency(cfg)
    row = evaluate_point(spec, f, ("Trec", "T12", "G12", "Gact"))
    header = ["frequency_Hz", *row.keys(), "status"]
    _write_csv(out_dir / "results.csv", header, [[f, *row.values(), "ok"]])
    return {"columns": header}


def _run_sweep_phase(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    _require_explicit_noise(mode, "sweep-phase")
    try:
        sweep = SweepSpec(
            parameter=a_cfg.get("parameter", "P_H"),
            start=float(a_cfg.get("start", 0.0)),
            stop=float(a_cfg.get("stop", 180.0)),
            step=float(a_cfg.get("step", 0.1)),
            outputs=tuple(a_cfg.get("outputs", ["Trec", "T12"])),
        )
    except ValueError as exc:
        raise ConfigError(f"analysis: {exc}") from exc
    f = _frequency(cfg) if sweep.parameter != "frequency" else 0.0
    result = run_sweep(spec, sweep, f)
    with (out_dir / "results.csv").open("w") as fp:
        result.to_csv(fp)
    return {"columns": [result.parameter_column, *result.columns.keys(), "status"]}


def _run_contour(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    _require_explicit_noise(mode, "contour")
    f = _frequency(cfg)
    metric = a_cfg.get("metric", "trec")
    radii = sweep_grid(
        float(a_cfg.get("radius_start", 0.0)),
        float(a_cfg.get("radius_stop", 0.98)),
        float(a_cfg.get("radius_step", 0.02)),
    )
    phases = sweep_grid(
        float(a_cfg.get("phase_start", 0.0)),
        float(a_cfg.get("phase_stop", 355.0)),
        float(a_cfg.get("phase_step", 5.0)),
    )
    try:
        result = gamma_contour_grid(spec, f, radii, phases, metric=metric)
    except ValueError as exc:
        raise ConfigError(f"analysis: {exc}") from exc
    value_col = "Trec_K" if metric == "trec" else "|T12|_K"
    rows = [
        [r, p, result.values[i, j], "ok"]
        for i, r in enumerate(result.radii)
        for j, p in enumerate(result.phases_deg)
    ]
    header = ["gamma_opt_mag", "gamma_opt_deg", value_col, "status"]
    _write_csv(out_dir / "results.csv", header, rows)
    return {
        "columns": header,
        "argmin": {
            "gamma_opt_mag": result.argmin[0],
            "gamma_opt_deg": result.argmin[1],
            value_col: result.argmin[2],
        },
    }


def _run_null_search(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    _require_explicit_noise(mode, "null-search")
    f = _frequency(cfg)
    result = find_coherence_nulls(
        spec,
        f,
        phase_start_deg=float(a_cfg.get("start", 0.0)),
        phase_stop_deg=float(a_cfg.get("stop", 180.0)),
        coarse_step_deg=float(a_cfg.get("coarse_step", 1.0)),
        refine_step_deg=float(a_cfg.get("refine_step", 0.005)),
        metric=a_cfg.get("metric", "t12"),
        axis=a_cfg.get("axis", "dP_H"),
    )
    value_col = "Trec_K" if result.metric == "trec" else "|T12|_K"
    axis_col = f"{a_cfg.get('axis', 'dP_H')}_deg"
    _write_csv(
        out_dir / "results.csv",
        [axis_col, value_col, "status"],
        [[p, v, "ok"] for p, v in result.nulls],
    )
    return {
        "columns": [axis_col, value_col, "status"],
        "degenerate": result.degenerate,
        "resolution_deg": result.resolution_deg,
    }


def _run_match_search(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    _require_explicit_noise(mode, "match-search")
    f = _frequency(cfg)
    lines = sweep_grid(
        float(a_cfg.get("line_start", 0.0)),
        float(a_cfg.get("line_stop", 1.0)),
        float(a_cfg.get("line_step", 0.1)),
    )
    caps = sweep_grid(
        float(a_cfg.get("cap_start_farads", 1e-12)),
        float(a_cfg.get("cap_stop_farads", 1e-9)),
        float(a_cfg.get("cap_step_farads", 10e-12)),
    )
    candidates = matching_search(
        spec,
        f,
        line_lengths=lines,
        capacitances=caps,
        coincidence_tolerance_deg=float(a_cfg.get("coincidence_tolerance_deg", 4.0)),
        coarse_step_deg=float(a_cfg.get("coarse_step", 1.0)),
        refine_step_deg=float(a_cfg.get("refine_step", 0.005)),
    )
    header = [
        "line_length_wavelengths",
        "shunt_capacitance_F",
        "null1_deg",
        "null2_deg",
        "separation_deg",
        "|T12|_null1_K",
        "|T12|_null2_K",
        "status",
    ]
    rows = [
        [
            c.match.line_length_wavelengths,
            c.match.shunt_capacitance_farads,
            c.null_phases_deg[0],
            c.null_phases_deg[1],
            c.separation_deg,
            c.null_values_k[0],
            c.null_values_k[1],
            "ok",
        ]
        for c in candidates
    ]
    _write_csv(out_dir / "results.csv", header, rows)
    return {"columns": header, "n_candidates": len(candidates)}


def _run_monte_carlo(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    _require_explicit_noise(mode, "monte-carlo")
    f = _frequency(cfg)
    try:
        mc = MonteCarloSpec(
            relative_fraction=float(a_cfg["relative_fraction"]),
            iterations=int(a_cfg.get("iterations", 100)),
            seed=seed,
            absolute_phase_jitter_deg=float(a_cfg.get("absolute_phase_jitter_deg", 0.0)),
        )
    except KeyError as exc:
        raise ConfigError(f"analysis: missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(f"analysis: {exc}") from exc
    result = monte_carlo(
        spec,
        mc,
        f,
        tune=a_cfg.get("tune", "independent"),
        phase_start_deg=float(a_cfg.get("phase_start", 0.0)),
        phase_stop_deg=float(a_cfg.get("phase_stop", 180.0)),
        coarse_step_deg=float(a_cfg.get("coarse_step", 1.0)),
        refine_step_deg=float(a_cfg.get("refine_step", 0.005)),
        independent_window_deg=float(a_cfg.get("independent_window_deg", 3.0)),
        threads=threads,
    )
    header = ["iteration", "min_|T12|_K", "dP_H1_deg", "dP_H2_deg", "status"]
    rows = [
        [float(i), result.min_t12_k[i], result.phase1_deg[i], result.phase2_deg[i], "ok"]
        for i in range(mc.iterations)
    ]
    _write_csv(out_dir / "results.csv", header, rows)

    hist_cfg = a_cfg.get("histogram", {})
    hist = histogram(
        result.min_t12_k,
        bin_width_k=float(hist_cfg.get("bin_width_k", 0.01)),
        cutoff_k=float(hist_cfg.get("cutoff_k", 1.0)),
    )
    _write_csv(
        out_dir / "histogram.csv",
        ["bin_start_K", "bin_end_K", "count"],
        [
            [hist.bin_edges_k[i], hist.bin_edges_k[i + 1], float(hist.counts[i])]
            for i in range(len(hist.counts))
        ],
    )
    return {
        "columns": header,
        "share_below_10mK": result.share_below(0.01),
        "suppressed_above_cutoff": hist.n_suppressed,
        "files": ["results.csv", "histogram.csv"],
    }


def _run_wideband(spec, mode, cfg, a_cfg, out_dir, seed, threads) -> dict:
    try:
        freqs = sweep_grid(
            float(a_cfg["f_start_hz"]), float(a_cfg["f_stop_hz"]), float(a_cfg["f_step_hz"])
        )
    except KeyError as exc:
        raise ConfigError(f"analysis: missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(f"analysis: {exc}") from exc
    header = [
        "frequency_Hz",
        "dP_null1_deg",
        "|T12|_null1_K",
        "dP_null2_deg",
        "|T12|_null2_K",
        "status",
    ]
    rows = []
    for f in freqs:
        spec_f = _with_extrapolated_noise(spec, f) if mode == "extrapolated" else spec
        try:
            result = find_coherence_nulls(
                spec_f,
                float(f),
                phase_start_deg=float(a_cfg.get("start", 0.0)),
                phase_stop_deg=float(a_cfg.get("stop", 180.0)),
                coarse_step_deg=float(a_cfg.get("coarse_step", 1.0)),
                refine_step_deg=float(a_cfg.get("refine_step", 0.005)),
            )
        except (UnstableSystemError, ValueError) as exc:
            rows.append([float(f), math.nan, math.nan, math.nan, math.nan, f"error: {exc}"])
            continue
        nulls = sorted(result.nulls, key=lambda nv: nv[1])[:2]
        nulls.sort()
        if len(nulls) == 0:
            rows.append([float(f), math.nan, math.nan, math.nan, math.nan, "no-null"])
        elif len(nulls) == 1:
            rows.append([float(f), nulls[0][0], nulls[0][1], math.nan, math.nan, "single-null"])
        else:
            rows.append(
                [float(f), nulls[0][0], nulls[0][1], nulls[1][0], nulls[1][1], "ok"]
            )
    _write_csv(out_dir / "results.csv", header, rows)
    return {"columns": header}


_RUNNERS = {
    "analyze": _run_analyze,
    "sweep-phase": _run_sweep_phase,
    "contour": _run_contour,
    "null-search": _run_null_search,
    "match-search": _run_match_search,
    "monte-carlo": _run_monte_carlo,
    "wideband": _run_wideband,
}


def run(kind: str, config_path: Path, out_dir: Path, seed: int, threads: int) -> int:
    try:
        try:
            raw = config_path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        try:
            cfg = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path}: invalid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError(f"{config_path}: top level must be an object")

        a_cfg = _analysis_cfg(cfg, kind)
        spec, mode = build_system(cfg, config_path.parent)
        out_dir.mkdir(parents=True, exist_ok=True)
        extra = _RUNNERS[kind](spec, mode, cfg, a_cfg, out_dir, seed, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnstableSystemError, FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    meta = {
        "analysis": kind,
        "config_sha256": hashlib.sha256(
            json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest(),
        "seed": seed,
        "threads": threads,
        "version": __version__,
    }
    meta.update(extra)
    meta.setdefault("files", ["results.csv"])
    (out_dir / "metadata.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nwave",
        description="Noise-wave analysis of two-element coupling-canceler receivers",
    )
    sub = parser.add_subparsers(dest="analysis", required=True)
    for kind in ANALYSES:
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--threads",
            type=int,
            default=int(os.environ.get("NWAVE_THREADS", "1")),
        )
    args = parser.parse_args(argv)
    return run(args.analysis, args.config, args.out, args.seed, args.threads)


if __name__ == "__main__":
    sys.exit(main())
