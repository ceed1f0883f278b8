"""Monte Carlo harness: seeded trials, sweeps, aggregation, persistence.

Every trial owns an independent generator derived from
(master_seed, point_index, trial_index), so results do not depend on
execution order or worker count.  Early stopping is evaluated at fixed
chunk boundaries for the same reason: a sweep with the same configuration
and master seed produces byte-identical output files at any parallelism.
"""

import csv
import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayConfig
from .beamformer import (
    BeamformerState,
    EigenSplit,
    adapt_state,
    beamform_outputs,
    constraint_matrix,
    eigensplit,
    stage1_project,
    stage2_weights,
)
from .channel import derive_geometry, wavelength_m
from .codes import CodewordPair, select_pair
from .detector import detect
from .synthesis import AMBIENT_MODELS, Scenario, synthesize_codeword
from .aoa import estimate_aoa, steering_for_angle

SWEEP_AXES = ("snr_db", "d1_m", "code_order")
AOA_MODES = ("per_run", "per_codeword")
BEAMFORMER_MODES = ("per_codeword", "hold")

# Trial-index namespace reserved for the per-point pilot frame.
PILOT_STREAM = 1 << 62

CHUNK_SIZE = 256

WILSON_Z = 1.959963984540054  # two-sided 95%

CSV_COLUMNS = (
    "axis_name",
    "axis_value",
    "code_order",
    "codeword_len",
    "n_antennas",
    "snr_db",
    "d1_m",
    "trials",
    "errors",
    "ber",
    "ci_low",
    "ci_high",
)


class ConfigError(ValueError):
    """A sweep configuration is malformed; the message names the key."""


@dataclass(frozen=True)
class SweepConfig:
    scenario: Scenario
    sweep_axis: str
    axis_values: tuple[float, ...]
    trials_per_point: int = 200_000
    max_errors: int | None = 200
    master_seed: int = 0
    aoa_mode: str = "per_run"
    beamformer_mode: str = "per_codeword"
    grid_step_deg: float = 0.5
    row_plus: int | None = None
    row_minus: int | None = None

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"sweep_axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if len(self.axis_values) == 0:
            raise ConfigError("axis_values must be non-empty")
        if self.trials_per_point < 1:
            raise ConfigError(f"trials_per_point must be >= 1, got {self.trials_per_point}")
        if self.max_errors is not None and self.max_errors < 1:
            raise ConfigError(f"max_errors must be >= 1 or null, got {self.max_errors}")
        if self.aoa_mode not in AOA_MODES:
            raise ConfigError(f"aoa_mode must be one of {AOA_MODES}, got {self.aoa_mode!r}")
        if self.beamformer_mode not in BEAMFORMER_MODES:
            raise ConfigError(
                f"beamformer_mode must be one of {BEAMFORMER_MODES}, got {self.beamformer_mode!r}"
            )
        if not self.grid_step_deg > 0:
            raise ConfigError(f"grid_step_deg must be > 0, got {self.grid_step_deg}")


@dataclass(frozen=True)
class BerRecord:
    axis_name: str
    axis_value: float
    code_order: int
    codeword_len: int
    n_antennas: int
    snr_db: float
    d1_m: float
    trials: int
    errors: int
    ber: float
    ci_low: float
    ci_high: float
    error: str | None = None


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score 95% interval for a binomial proportion.

    Chosen over the normal approximation because error counts near the
    waterfall region are small.
    """
    if trials <= 0:
        return (math.nan, math.nan)
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == trials else min(1.0, center + half)
    return (low, high)


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial; order-independent by construction."""
    return np.random.default_rng([master_seed, point_index, trial_index])


def scenario_for_axis_value(scenario: Scenario, axis: str, value: float) -> Scenario:
    """Template scenario with one sweep-axis field replaced."""
    if axis == "snr_db":
        return dataclasses.replace(scenario, snr_db=float(value))
    if axis == "d1_m":
        g = scenario.geometry
        geometry = derive_geometry(g.d0_m, float(value), g.aoa_direct_deg, g.aoa_scattered_deg)
        return dataclasses.replace(scenario, geometry=geometry)
    if axis == "code_order":
        order = int(value)
        if order != value:
            raise ConfigError(f"code_order axis values must be integers, got {value}")
        return dataclasses.replace(scenario, code_order=order)
    raise ConfigError(f"sweep_axis must be one of {SWEEP_AXES}, got {axis!r}")


def codeword_pair_for(scenario: Scenario, row_plus: int | None, row_minus: int | None) -> CodewordPair:
    """Codeword rows for a scenario; default rows 1 and 2, or 0 and 1 when M = 2."""
    if (row_plus is None) != (row_minus is None):
        raise ConfigError("row_plus and row_minus must be set together")
    if row_plus is None:
        if scenario.codeword_len < 4:
            return select_pair(scenario.code_order, 0, 1)
        return select_pair(scenario.code_order, 1, 2)
    return select_pair(scenario.code_order, row_plus, row_minus)


@dataclass(frozen=True)
class TrialPlan:
    """Per-point precomputation shared by all trials of one sweep point."""

    scenario: Scenario
    pair: CodewordPair
    grid_step_deg: float = 0.5
    aoa_deg: float | None = None           # fixed estimate (per_run AoA)
    split: EigenSplit | None = None        # fixed eigensplit when aoa_deg is set
    state: BeamformerState | None = None   # fixed weights (hold mode)


def prepare_point(
    scenario: Scenario,
    pair: CodewordPair,
    master_seed: int,
    point_index: int = 0,
    aoa_mode: str = "per_run",
    beamformer_mode: str = "per_codeword",
    grid_step_deg: float = 0.5,
) -> TrialPlan:
    """Resolve the shared per-point state for the requested modes.

    ``per_run`` AoA and ``hold`` weights both come from one seeded pilot
    codeword drawn from a trial-index stream no data trial can collide with.
    """
    need_pilot = aoa_mode == "per_run" or beamformer_mode == "hold"
    pilot = None
    if need_pilot:
        rng = trial_rng(master_seed, point_index, PILOT_STREAM)
        symbol = 1 if rng.random() < 0.5 else -1
        pilot = synthesize_codeword(scenario, symbol, pair, rng)

    aoa_deg = None
    split = None
    if aoa_mode == "per_run" or beamformer_mode == "hold":
        aoa_deg = estimate_aoa(pilot.samples, scenario.array, grid_step_deg).angle_deg
        split = eigensplit(constraint_matrix(aoa_deg, scenario.array))

    state = None
    if beamformer_mode == "hold":
        state = adapt_state(split, pilot.samples)

    return TrialPlan(scenario, pair, grid_step_deg, aoa_deg, split, state)


def run_trial(
    scenario: Scenario,
    pair: CodewordPair,
    trial_index: int,
    master_seed: int,
    *,
    point_index: int = 0,
    plan: TrialPlan | None = None,
    aoa_mode: str = "per_run",
    beamformer_mode: str = "per_codeword",
    grid_step_deg: float = 0.5,
) -> int:
    """One end-to-end trial; returns 1 on a bit error, 0 otherwise.

    Deterministic given (master_seed, point_index, trial_index) and the plan
    configuration.
    """
    if plan is None:
        plan = prepare_point(
            scenario, pair, master_seed, point_index, aoa_mode, beamformer_mode, grid_step_deg
        )
    rng = trial_rng(master_seed, point_index, trial_index)
    symbol = 1 if rng.random() < 0.5 else -1
    frame = synthesize_codeword(plan.scenario, symbol, plan.pair, rng)

    if plan.state is not None:
        nu0, nu1 = beamform_outputs(plan.state, frame.samples)
    else:
        split = plan.split
        if split is None:
            aoa_deg = estimate_aoa(frame.samples, plan.scenario.array, plan.grid_step_deg).angle_deg
            split = eigensplit(constraint_matrix(aoa_deg, plan.scenario.array))
        u0, u1 = stage1_project(split, frame.samples)
        v0, _ = stage2_weights(u0)
        v1, _ = stage2_weights(u1)
        nu0 = v0.conj() @ u0
        nu1 = v1.conj() @ u1

    result = detect(nu0, nu1, plan.pair)
    return int(result.decision != symbol)


def _run_chunk(
    plan: TrialPlan, master_seed: int, point_index: int, start: int, count: int
) -> int:
    errors = 0
    for trial_index in range(start, start + count):
        errors += run_trial(
            plan.scenario,
            plan.pair,
            trial_index,
            master_seed,
            point_index=point_index,
            plan=plan,
        )
    return errors


def run_point(
    plan: TrialPlan,
    master_seed: int,
    point_index: int,
    trials: int,
    max_errors: int | None = None,
    threads: int = 1,
) -> tuple[int, int]:
    """Run trials for one sweep point; returns (errors, trials_run).

    Early stopping triggers once the cumulative error count reaches
    ``max_errors`` at a chunk boundary, in trial-index order, so the outcome
    is identical at any worker count.
    """
    chunks = [
        (start, min(CHUNK_SIZE, trials - start)) for start in range(0, trials, CHUNK_SIZE)
    ]
    errors = 0
    done = 0
    if threads <= 1:
        for start, count in chunks:
            errors += _run_chunk(plan, master_seed, point_index, start, count)
            done += count
            if max_errors is not None and errors >= max_errors:
                break
        return errors, done

    with ProcessPoolExecutor(max_workers=threads) as pool:
        window = 4 * threads
        futures = {}
        next_submit = 0
        cursor = 0
        while cursor < len(chunks):
            while next_submit < len(chunks) and len(futures) < window:
                start, count = chunks[next_submit]
                futures[next_submit] = pool.submit(
                    _run_chunk, plan, master_seed, point_index, start, count
                )
                next_submit += 1
            errors += futures.pop(cursor).result()
            done += chunks[cursor][1]
            cursor += 1
            if max_errors is not None and errors >= max_errors:
                for future in futures.values():
                    future.cancel()
                break
    return errors, done


def run_sweep(config: SweepConfig, threads: int = 1, log=None) -> list[BerRecord]:
    """Run every sweep point and aggregate BER records.

    A point whose scenario cannot be built (for example an impossible
    geometry on a d1 sweep) yields a record carrying the error message
    instead of aborting the sweep.
    """
    if threads < 1:
        threads = os.cpu_count() or 1
    records = []
    for point_index, value in enumerate(config.axis_values):
        try:
            scenario = scenario_for_axis_value(config.scenario, config.sweep_axis, value)
            pair = codeword_pair_for(scenario, config.row_plus, config.row_minus)
            plan = prepare_point(
                scenario,
                pair,
                config.master_seed,
                point_index,
                config.aoa_mode,
                config.beamformer_mode,
                config.grid_step_deg,
            )
            errors, trials = run_point(
                plan,
                config.master_seed,
                point_index,
                config.trials_per_point,
                config.max_errors,
                threads,
            )
            ci_low, ci_high = wilson_interval(errors, trials)
            record = BerRecord(
                axis_name=config.sweep_axis,
                axis_value=float(value),
                code_order=scenario.code_order,
                codeword_len=scenario.codeword_len,
                n_antennas=scenario.array.n_antennas,
                snr_db=scenario.snr_db,
                d1_m=scenario.geometry.d1_m,
                trials=trials,
                errors=errors,
                ber=errors / trials,
                ci_low=ci_low,
                ci_high=ci_high,
            )
        except (ValueError, ConfigError) as exc:
            record = BerRecord(
                axis_name=config.sweep_axis,
                axis_value=float(value),
                code_order=config.scenario.code_order,
                codeword_len=config.scenario.codeword_len,
                n_antennas=config.scenario.array.n_antennas,
                snr_db=config.scenario.snr_db,
                d1_m=config.scenario.geometry.d1_m,
                trials=0,
                errors=0,
                ber=math.nan,
                ci_low=math.nan,
                ci_high=math.nan,
                error=str(exc),
            )
        records.append(record)
        if log is not None:
            log(record)
    return records


def _format_value(value) -> str:
    # repr gives the shortest digits that parse back to the same float, so
    # the CSV is both byte-deterministic and lossless to re-read
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results(records, path, sidecar: dict | None = None) -> None:
    """Write records as CSV; optionally write a JSON sidecar next to it.

    The sidecar (same stem, .json suffix) captures the resolved sweep
    configuration and master seed so a result file is reproducible on its
    own.
    """
    path = os.fspath(path)
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_COLUMNS)
            for record in records:
                writer.writerow(
                    [_format_value(getattr(record, column)) for column in CSV_COLUMNS]
                )
        if sidecar is not None:
            with open(_sidecar_path(path), "w") as handle:
                json.dump(sidecar, handle, indent=2, sort_keys=True)
                handle.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results(path) -> list[BerRecord]:
    """Parse a results CSV back into records."""
    records = []
    with open(os.fspath(path), newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV columns in {path}: {reader.fieldnames}")
        for row in reader:
            records.append(
                BerRecord(
                    axis_name=row["axis_name"],
                    axis_value=float(row["axis_value"]),
                    code_order=int(row["code_order"]),
                    codeword_len=int(row["codeword_len"]),
                    n_antennas=int(row["n_antennas"]),
                    snr_db=float(row["snr_db"]),
                    d1_m=float(row["d1_m"]),
                    trials=int(row["trials"]),
                    errors=int(row["errors"]),
                    ber=float(row["ber"]),
                    ci_low=float(row["ci_low"]),
                    ci_high=float(row["ci_high"]),
                )
            )
    return records


def _sidecar_path(path: str) -> str:
    root, _ = os.path.splitext(path)
    return root + ".json"


_SCENARIO_KEYS = {
    "n_antennas",
    "spacing_wavelengths",
    "d0_m",
    "d1_m",
    "aoa_direct_deg",
    "aoa_scattered_deg",
    "lambda_m",
    "frequency_hz",
    "snr_db",
    "code_order",
    "ambient_model",
    "noise_enabled",
    "seed",
}

_SWEEP_KEYS = {
    "scenario",
    "sweep_axis",
    "axis_values",
    "trials_per_point",
    "max_errors",
    "master_seed",
    "aoa_mode",
    "beamformer_mode",
    "grid_step_deg",
    "row_plus",
    "row_minus",
}


def scenario_from_dict(data: dict) -> Scenario:
    """Build a Scenario from a flat config mapping; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ConfigError(f"scenario must be an object, got {type(data).__name__}")
    unknown = set(data) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario key {sorted(unknown)[0]!r}")
    if ("lambda_m" in data) == ("frequency_hz" in data):
        raise ConfigError("scenario needs exactly one of 'lambda_m' or 'frequency_hz'")
    lam = data["lambda_m"] if "lambda_m" in data else wavelength_m(data["frequency_hz"])
    try:
        array = ArrayConfig(
            n_antennas=int(data.get("n_antennas", 8)),
            spacing_wavelengths=float(data.get("spacing_wavelengths", 0.5)),
        )
        geometry = derive_geometry(
            float(data.get("d0_m", 1000.0)),
            float(data.get("d1_m", 2.0)),
            float(data.get("aoa_direct_deg", 60.0)),
            float(data.get("aoa_scattered_deg", 90.0)),
        )
        return Scenario(
            array=array,
            geometry=geometry,
            lambda_m=float(lam),
            snr_db=float(data.get("snr_db", 0.0)),
            code_order=int(data.get("code_order", 10)),
            ambient_model=str(data.get("ambient_model", "complex_gaussian")),
            noise_enabled=bool(data.get("noise_enabled", True)),
            seed=int(data.get("seed", 0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def sweep_config_from_dict(data: dict) -> SweepConfig:
    """Build a SweepConfig from a config mapping; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ConfigError(f"config must be an object, got {type(data).__name__}")
    unknown = set(data) - _SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    if "scenario" not in data:
        raise ConfigError("config is missing the 'scenario' object")
    if "sweep_axis" not in data or "axis_values" not in data:
        raise ConfigError("config needs 'sweep_axis' and 'axis_values'")
    scenario = scenario_from_dict(data["scenario"])
    values = data["axis_values"]
    if not isinstance(values, (list, tuple)):
        raise ConfigError("axis_values must be a list")
    max_errors = data.get("max_errors", 200)
    return SweepConfig(
        scenario=scenario,
        sweep_axis=str(data["sweep_axis"]),
        axis_values=tuple(float(v) for v in values),
        trials_per_point=int(data.get("trials_per_point", 200_000)),
        max_errors=None if max_errors is None else int(max_errors),
        master_seed=int(data.get("master_seed", 0)),
        aoa_mode=str(data.get("aoa_mode", "per_run")),
        beamformer_mode=str(data.get("beamformer_mode", "per_codeword")),
        grid_step_deg=float(data.get("grid_step_deg", 0.5)),
        row_plus=None if data.get("row_plus") is None else int(data["row_plus"]),
        row_minus=None if data.get("row_minus") is None else int(data["row_minus"]),
    )


def sweep_config_to_dict(config: SweepConfig) -> dict:
    """Resolved configuration as plain JSON-ready data (for the sidecar)."""
    scenario = config.scenario
    return {
        "scenario": {
            "n_antennas": scenario.array.n_antennas,
            "spacing_wavelengths": scenario.array.spacing_wavelengths,
            "d0_m": scenario.geometry.d0_m,
            "d1_m": scenario.geometry.d1_m,
            "aoa_direct_deg": scenario.geometry.aoa_direct_deg,
            "aoa_scattered_deg": scenario.geometry.aoa_scattered_deg,
            "lambda_m": scenario.lambda_m,
            "snr_db": scenario.snr_db,
            "code_order": scenario.code_order,
            "ambient_model": scenario.ambient_model,
            "noise_enabled": scenario.noise_enabled,
            "seed": scenario.seed,
        },
        "sweep_axis": config.sweep_axis,
        "axis_values": list(config.axis_values),
        "trials_per_point": config.trials_per_point,
        "max_errors": config.max_errors,
        "master_seed": config.master_seed,
        "aoa_mode": config.aoa_mode,
        "beamformer_mode": config.beamformer_mode,
        "grid_step_deg": config.grid_step_deg,
        "row_plus": config.row_plus,
        "row_minus": config.row_minus,
    }


def single_run_diagnostics(
    scenario: Scenario,
    pair: CodewordPair,
    master_seed: int,
    aoa_mode: str = "per_run",
    beamformer_mode: str = "per_codeword",
    grid_step_deg: float = 0.5,
) -> dict:
    """One seeded end-to-end trial with receiver internals exposed."""
    plan = prepare_point(
        scenario, pair, master_seed, 0, aoa_mode, beamformer_mode, grid_step_deg
    )
    rng = trial_rng(master_seed, 0, 0)
    symbol = 1 if rng.random() < 0.5 else -1
    frame = synthesize_codeword(scenario, symbol, pair, rng)

    if plan.aoa_deg is not None:
        aoa_deg = plan.aoa_deg
        split = plan.split
    else:
        aoa_deg = estimate_aoa(frame.samples, scenario.array, grid_step_deg).angle_deg
        split = eigensplit(constraint_matrix(aoa_deg, scenario.array))
    state = plan.state if plan.state is not None else adapt_state(split, frame.samples)

    nu0, nu1 = beamform_outputs(state, frame.samples)
    result = detect(nu0, nu1, pair)

    a_true = steering_for_angle(scenario.geometry.aoa_direct_deg, 0, scenario.array)
    leak = np.sum(np.abs(split.null_basis.conj().T @ a_true) ** 2) / scenario.array.n_antennas
    null_depth_db = 10.0 * math.log10(leak) if leak > 0 else -math.inf
    return {
        "truth_symbol": symbol,
        "gamma_plus": result.gamma_plus,
        "gamma_minus": result.gamma_minus,
        "decision": result.decision,
        "bit_error": int(result.decision != symbol),
        "aoa_deg": aoa_deg,
        "rank": split.rank,
        "null_depth_db": null_depth_db,
    }
