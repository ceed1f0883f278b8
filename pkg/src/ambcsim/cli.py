"""Command-line entry point.

Subcommands:
  ber-sweep      run a Monte Carlo sweep from a JSON config, write CSV (+ figure)
  single-run     one seeded end-to-end trial with receiver diagnostics
  aoa-test       Bartlett spectrum of a synthesized frame; prints the peak
  spectrum-dump  Bartlett spectrum CSV only

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import csv
import json
import sys

from . import harness
from .aoa import estimate_aoa
from .harness import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambcsim",
        description="Link-level simulator for a null-steering ambient backscatter receiver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_out: bool):
        p.add_argument("--config", required=True, help="JSON sweep/scenario config path")
        p.add_argument("--out", required=needs_out, help="output CSV path")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument(
            "--threads",
            type=int,
            default=0,
            help="worker processes for trials (0 = all available)",
        )
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="config override with a dotted path, e.g. scenario.snr_db=20 (repeatable)",
        )

    p = sub.add_parser("ber-sweep", help="run a BER sweep and write results")
    add_common(p, needs_out=True)
    p.add_argument("--plot", default=None, help="also render the BER curve to this image file")

    p = sub.add_parser("single-run", help="one diagnostic trial")
    add_common(p, needs_out=False)

    for name, help_text in (
        ("aoa-test", "angular spectrum CSV plus printed peak"),
        ("spectrum-dump", "angular spectrum CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        add_common(p, needs_out=True)
        p.add_argument("--plot", default=None, help="also render the spectrum to this image file")

    return parser


def _parse_override(item: str) -> tuple[list[str], object]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not KEY=VALUE")
    key, raw = item.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override {item!r} has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def _apply_overrides(data: dict, overrides: list[str]) -> dict:
    for item in overrides:
        path, value = _parse_override(item)
        node = data
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[path[-1]] = value
    return data


def _load_config(args) -> dict:
    try:
        with open(args.config) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {args.config} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {args.config} must hold a JSON object")
    data = _apply_overrides(data, args.overrides)
    if args.seed is not None:
        data["master_seed"] = args.seed
    return data


def _threads(args) -> int:
    return args.threads if args.threads and args.threads > 0 else 0


def _cmd_ber_sweep(args) -> int:
    config = harness.sweep_config_from_dict(_load_config(args))

    def log(record):
        if record.error is not None:
            print(f"{record.axis_name}={record.axis_value:g}  ERROR: {record.error}")
        else:
            print(
                f"{record.axis_name}={record.axis_value:g}  trials={record.trials}"
                f"  errors={record.errors}  ber={record.ber:.3e}"
                f"  ci95=[{record.ci_low:.3e}, {record.ci_high:.3e}]"
            )

    records = harness.run_sweep(config, threads=_threads(args), log=log)
    harness.write_results(records, args.out, sidecar=harness.sweep_config_to_dict(config))
    if getattr(args, "plot", None):
        from . import report

        report.render_ber_curve(records, args.plot)
    return EXIT_OK


def _cmd_single_run(args) -> int:
    data = _load_config(args)
    config = harness.sweep_config_from_dict(_ensure_sweep_shape(data))
    scenario = config.scenario
    pair = harness.codeword_pair_for(scenario, config.row_plus, config.row_minus)
    diag = harness.single_run_diagnostics(
        scenario,
        pair,
        config.master_seed,
        config.aoa_mode,
        config.beamformer_mode,
        config.grid_step_deg,
    )
    print(f"truth_symbol   {diag['truth_symbol']:+d}")
    print(f"gamma_plus     {diag['gamma_plus']:.6e}")
    print(f"gamma_minus    {diag['gamma_minus']:.6e}")
    print(f"decision       {diag['decision']:+d}")
    print(f"bit_error      {diag['bit_error']}")
    print(f"aoa_deg        {diag['aoa_deg']:.4f}")
    print(f"rank           {diag['rank']}")
    print(f"null_depth_db  {diag['null_depth_db']:.2f}")
    return EXIT_OK


def _cmd_spectrum(args, print_peak: bool) -> int:
    data = _load_config(args)
    config = harness.sweep_config_from_dict(_ensure_sweep_shape(data))
    scenario = config.scenario
    pair = harness.codeword_pair_for(scenario, config.row_plus, config.row_minus)
    rng = harness.trial_rng(config.master_seed, 0, harness.PILOT_STREAM)
    symbol = 1 if rng.random() < 0.5 else -1
    from .synthesis import synthesize_codeword

    frame = synthesize_codeword(scenario, symbol, pair, rng)
    estimate = estimate_aoa(frame.samples, scenario.array, config.grid_step_deg)
    spectrum = estimate.spectrum
    try:
        with open(args.out, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["angle_deg", "power"])
            for angle, power in zip(spectrum.grid_degrees, spectrum.power):
                writer.writerow([f"{angle:.12g}", f"{power:.12g}"])
    except OSError as exc:
        raise OSError(f"cannot write spectrum to {args.out}: {exc}") from exc
    if print_peak:
        flag = "  (low confidence)" if estimate.low_confidence else ""
        print(f"peak {estimate.angle_deg:.2f} deg{flag}")
    if getattr(args, "plot", None):
        from . import report

        report.render_spectrum(spectrum, args.plot, peak_deg=estimate.angle_deg)
    return EXIT_OK


def _ensure_sweep_shape(data: dict) -> dict:
    """Allow scenario-only configs for the diagnostic subcommands."""
    data.setdefault("sweep_axis", "snr_db")
    scenario = data.get("scenario", {})
    snr = scenario.get("snr_db", 0.0) if isinstance(scenario, dict) else 0.0
    data.setdefault("axis_values", [snr])
    return data


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {
        "ber-sweep": _cmd_ber_sweep,
        "single-run": _cmd_single_run,
        "aoa-test": lambda a: _cmd_spectrum(a, print_peak=True),
        "spectrum-dump": lambda a: _cmd_spectrum(a, print_peak=False),
    }
    try:
        return commands[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
