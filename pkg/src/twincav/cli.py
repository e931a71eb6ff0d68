"""Command-line front end: config ingestion, scenario presets, sweeps and
serialization.

Configs are flat ``key = value`` text (UTF-8, ``#`` comments).  Frequencies
are interpreted per ``convention.frequency`` (ordinary = Hz, times 2 pi;
angular = rad/s) and cavity detunings are given as multiples of the
mechanical frequency.  Exit codes: 0 success, 2 config/usage error,
3 numerical divergence, 4 output I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import __version__
from .dynamics import (
    DivergenceError,
    TrajectoryConfig,
    default_initial_cov,
    integrate,
    uniform_thermal_cov,
)
from .entanglement import (
    NegativitySeries,
    Pair,
    TransferReport,
    negativity_series,
    transfer_report,
)
from .model import (
    CavityParams,
    DerivedParams,
    MechanicalParams,
    PhysicalParams,
    derive_params,
    to_angular,
)
from .steady import SteadyState, fixed_points, threshold_report

SCHEMA_VERSION = 1

PRESETS = {
    "fig2-sym": "fig2_sym.cfg",
    "fig2-asym": "fig2_asym.cfg",
    "fig2-left-only": "fig2_left_only.cfg",
    "fig3": "fig3.cfg",
}

REQUIRED_KEYS = [
    "left.length_m",
    "left.finesse",
    "left.wavelength_m",
    "left.power_W",
    "left.detuning",
    "right.length_m",
    "right.finesse",
    "right.wavelength_m",
    "right.power_W",
    "right.detuning",
    "mech.mass_kg",
    "mech.freq",
    "mech.Q",
    "mech.temperature_K",
    "sim.t_end_s",
    "sim.dt_s",
    "sim.sample_every",
    "convention.frequency",
    "drive.mode",
]

OPTIONAL_KEYS = ["sim.init_cov"]

DRIVE_MODES = ("both", "left_only", "right_only")


class ConfigError(Exception):
    """Configuration problem; message names the offending key/line."""


@dataclass(frozen=True)
class Scenario:
    """A fully specified run: physical parameters, integration window and
    drive-side selection, plus the raw key/value map it was built from."""

    name: str
    params: PhysicalParams
    trajectory: TrajectoryConfig
    drive_mode: str
    raw: dict


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    derived: DerivedParams
    steady_states: list[SteadyState]
    threshold_regime: str | None
    series: dict[Pair, NegativitySeries]
    reports: dict[Pair, TransferReport]
    samples_path: Path | None
    summary_path: Path | None


def parse_config_text(text: str, name: str) -> dict:
    """Flat key=value parser; returns {key: (value, line_no)}."""
    entries: dict[str, tuple[str, int]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{name}:{line_no}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{name}:{line_no}: empty key or value")
        if key in entries:
            raise ConfigError(f"{name}:{line_no}: duplicate key {key}")
        entries[key] = (value, line_no)
    return entries


def _get_float(entries: dict, key: str, name: str) -> float:
    value, line_no = entries[key]
    try:
        return float(value)
    except ValueError:
        raise ConfigError(
            f"{name}:{line_no}: key {key} has unparseable numeric value {value!r}"
        ) from None


def _get_int(entries: dict, key: str, name: str) -> int:
    value, line_no = entries[key]
    try:
        return int(value)
    except ValueError:
        raise ConfigError(
            f"{name}:{line_no}: key {key} has unparseable integer value {value!r}"
        ) from None


def scenario_from_entries(entries: dict, name: str) -> Scenario:
    """Validate a parsed key/value map and build the Scenario."""
    for key in REQUIRED_KEYS:
        if key not in entries:
            raise ConfigError(f"{name}: missing required key {key}")
    known = set(REQUIRED_KEYS) | set(OPTIONAL_KEYS)
    for key in entries:
        if key not in known:
            line_no = entries[key][1]
            raise ConfigError(f"{name}:{line_no}: unknown key {key}")

    convention, conv_line = entries["convention.frequency"]
    if convention not in ("ordinary", "angular"):
        raise ConfigError(
            f"{name}:{conv_line}: convention.frequency must be ordinary|angular, "
            f"got {convention!r}"
        )
    drive_mode, mode_line = entries["drive.mode"]
    if drive_mode not in DRIVE_MODES:
        raise ConfigError(
            f"{name}:{mode_line}: drive.mode must be both|left_only|right_only, "
            f"got {drive_mode!r}"
        )

    omega_m = to_angular(_get_float(entries, "mech.freq", name), convention)

    def cavity(side: str) -> CavityParams:
        power = _get_float(entries, f"{side}.power_W", name)
        if drive_mode == "left_only" and side == "right":
            power = 0.0
        if drive_mode == "right_only" and side == "left":
            power = 0.0
        return CavityParams(
            length=_get_float(entries, f"{side}.length_m", name),
            finesse=_get_float(entries, f"{side}.finesse", name),
            wavelength=_get_float(entries, f"{side}.wavelength_m", name),
            drive_power=power,
            drive_detuning=_get_float(entries, f"{side}.detuning", name) * omega_m,
        )

    try:
        params = PhysicalParams(
            left=cavity("left"),
            right=cavity("right"),
            mechanical=MechanicalParams(
                mass=_get_float(entries, "mech.mass_kg", name),
                frequency=omega_m,
                quality_factor=_get_float(entries, "mech.Q", name),
                bath_temperature=_get_float(entries, "mech.temperature_K", name),
            ),
            frequency_convention=convention,
        )
        derived = derive_params(params)
        initial_cov = _initial_cov(entries, name, derived)
        trajectory = TrajectoryConfig(
            t_end=_get_float(entries, "sim.t_end_s", name),
            dt=_get_float(entries, "sim.dt_s", name),
            sample_every=_get_int(entries, "sim.sample_every", name),
            initial_cov=initial_cov,
        )
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    return Scenario(
        name=name,
        params=params,
        trajectory=trajectory,
        drive_mode=drive_mode,
        raw={k: v for k, (v, _) in entries.items()},
    )


def _initial_cov(entries: dict, name: str, derived: DerivedParams):
    if "sim.init_cov" not in entries:
        return None
    value, line_no = entries["sim.init_cov"]
    if value == "default":
        return None
    if value == "uniform":
        return uniform_thermal_cov(derived)
    if value.startswith("cavities:"):
        try:
            occupancy = float(value.split(":", 1)[1])
        except ValueError:
            raise ConfigError(
                f"{name}:{line_no}: bad occupancy in sim.init_cov {value!r}"
            ) from None
        if occupancy < 0:
            raise ConfigError(f"{name}:{line_no}: sim.init_cov occupancy < 0")
        cov = default_initial_cov(derived)
        cov[2, 2] = cov[3, 3] = cov[4, 4] = cov[5, 5] = occupancy + 0.5
        return cov
    raise ConfigError(
        f"{name}:{line_no}: sim.init_cov must be default|uniform|cavities:<n>, "
        f"got {value!r}"
    )


def load_config(path) -> Scenario:
    """Read and validate a scenario configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return scenario_from_entries(parse_config_text(text, path.name), path.stem)


def load_preset(name: str) -> Scenario:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown scenario {name!r}; choose from {', '.join(sorted(PRESETS))}"
        )
    text = resources.files("twincav").joinpath("presets", PRESETS[name]).read_text(
        encoding="utf-8"
    )
    return scenario_from_entries(parse_config_text(text, PRESETS[name]), name)


def _fmt(x: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(x))


def run_scenario(s: Scenario, out_dir=None) -> RunResult:
    """Full pipeline: derive, steady states, integrate, negativities,
    reports; write samples CSV + summary JSON when out_dir is given."""
    derived = derive_params(s.params)
    states = fixed_points(derived)
    try:
        regime = threshold_report(derived).regime_label.value
    except ValueError:
        regime = None

    samples = integrate(derived, s.trajectory)
    series = {pair: negativity_series(samples, pair) for pair in Pair}
    reports = {
        pair: transfer_report(series[pair], derived.omega_m) for pair in Pair
    }

    samples_path = summary_path = None
    if out_dir is not None:
        out = Path(out_dir) / s.name
        out.mkdir(parents=True, exist_ok=True)
        samples_path = out / "samples.csv"
        _write_samples_csv(samples_path, samples, series)
        summary_path = out / "summary.json"
        summary_path.write_text(_summary_json(s, states, reports), encoding="utf-8")

    return RunResult(
        scenario=s,
        derived=derived,
        steady_states=states,
        threshold_regime=regime,
        series=series,
        reports=reports,
        samples_path=samples_path,
        summary_path=summary_path,
    )


def _write_samples_csv(path: Path, samples, series: dict) -> None:
    cols = [series[Pair.ML], series[Pair.MR], series[Pair.LR]]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "t_s,q,p,re_aL,im_aL,re_aR,im_aR,"
            "EN_ML,EN_MR,EN_LR,vmin_ML,vmin_MR,vmin_LR\n"
        )
        for i, sample in enumerate(samples):
            m = sample.mean
            row = [
                sample.t,
                m.q,
                m.p,
                m.alpha_l.real,
                m.alpha_l.imag,
                m.alpha_r.real,
                m.alpha_r.imag,
                cols[0].e_n[i],
                cols[1].e_n[i],
                cols[2].e_n[i],
                cols[0].v_minus[i],
                cols[1].v_minus[i],
                cols[2].v_minus[i],
            ]
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _summary_json(s: Scenario, states, reports: dict) -> str:
    def onset(pair):
        t = reports[pair].onset_time
        return None if t is None else t

    payload = {
        "schema_version": SCHEMA_VERSION,
        "scenario": s.name,
        "onset_time_s": {p.name: onset(p) for p in Pair},
        "pattern": {p.name: reports[p].pattern.value for p in Pair},
        "saturation": {p.name: reports[p].saturation_value for p in Pair},
        "steady_states": [
            {
                "q": st.q,
                "alpha_l_re": st.alpha_l.real,
                "alpha_l_im": st.alpha_l.imag,
                "alpha_r_re": st.alpha_r.real,
                "alpha_r_im": st.alpha_r.imag,
                "stable": st.stable,
                "residual": st.residual,
                "multiplicity": st.multiplicity,
            }
            for st in states
        ],
        "stable_count": sum(1 for st in states if st.stable),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit_plot_data(result: RunResult, out_dir) -> list[Path]:
    """One whitespace-free CSV per pair plus a gnuplot script."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for pair in Pair:
        s = result.series[pair]
        if len(s) == 0:
            raise ValueError(f"pair {pair.name} has an empty series")
        path = out / f"EN_{pair.name}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t_s,EN,v_minus\n")
            for t, en, vm in zip(s.times, s.e_n, s.v_minus):
                fh.write(f"{_fmt(t)},{_fmt(en)},{_fmt(vm)}\n")
        paths.append(path)
    script = out / "plot_negativity.gp"
    script.write_text(
        "set datafile separator ','\n"
        "set xlabel 't (s)'\n"
        "set ylabel 'E_N'\n"
        "set key left top\n"
        "plot 'EN_ML.csv' skip 1 using 1:2 with lines title 'M-L', \\\n"
        "     'EN_MR.csv' skip 1 using 1:2 with lines title 'M-R', \\\n"
        "     'EN_LR.csv' skip 1 using 1:2 with lines title 'L-R'\n",
        encoding="utf-8",
    )
    paths.append(script)
    return paths


SWEEPABLE_PREFIXES = ("left.", "right.", "mech.", "sim.")


def sweep_values(start: float, stop: float, steps: int) -> list[float]:
    if steps < 2:
        raise ConfigError(f"sweep needs steps >= 2, got {steps}")
    if start == stop:
        raise ConfigError("degenerate sweep grid: start == stop")
    return [start + (stop - start) * i / (steps - 1) for i in range(steps)]


def sweep(
    base: Scenario,
    key: str,
    start: float,
    stop: float,
    steps: int,
    out_dir=None,
) -> tuple[list[RunResult], str]:
    """Run `steps` scenarios with `key` set on a uniform grid.

    ``cavity.<field>`` sets ``left.<field>`` and ``right.<field>`` together
    (preserves a symmetric setup).  Returns the results and the sweep table
    as CSV text; the table is also written to out_dir/sweep.csv.
    """
    if key.startswith("cavity."):
        targets = ["left." + key[len("cavity."):], "right." + key[len("cavity."):]]
    else:
        targets = [key]
    for target in targets:
        if target not in base.raw:
            raise ConfigError(f"unknown sweep key {key!r} (no config key {target})")
        if not target.startswith(SWEEPABLE_PREFIXES):
            raise ConfigError(f"key {key!r} is not sweepable")
        try:
            float(base.raw[target])
        except ValueError:
            raise ConfigError(f"sweep key {key!r} is not numeric") from None

    results = []
    lines = [
        "value,TD_ML_s,TD_MR_s,TD_LR_s,pattern_ML,pattern_MR,pattern_LR,"
        "sat_ML,sat_MR,sat_LR"
    ]
    for value in sweep_values(start, stop, steps):
        entries = {
            k: (v if k not in targets else _fmt(value), i)
            for i, (k, v) in enumerate(base.raw.items(), start=1)
        }
        scenario = scenario_from_entries(entries, f"{base.name}__{key}_{value:.6g}")
        result = run_scenario(scenario, out_dir)
        results.append(result)
        cells = [_fmt(value)]
        for p in Pair:
            t = result.reports[p].onset_time
            cells.append("nan" if t is None else _fmt(t))
        for p in Pair:
            cells.append(result.reports[p].pattern.value)
        for p in Pair:
            sat = result.reports[p].saturation_value
            cells.append("nan" if sat is None else _fmt(sat))
        lines.append(",".join(cells))
    table = "\n".join(lines) + "\n"
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(table, encoding="utf-8")
    return results, table


def _print_run_summary(result: RunResult, fmt: str) -> None:
    if fmt == "json":
        print(_summary_json(result.scenario, result.steady_states, result.reports), end="")
        return
    print("pair,onset_time_s,pattern,saturation,zero_intervals")
    for p in Pair:
        r = result.reports[p]
        onset = "nan" if r.onset_time is None else _fmt(r.onset_time)
        sat = "nan" if r.saturation_value is None else _fmt(r.saturation_value)
        print(f"{p.name},{onset},{r.pattern.value},{sat},{r.zero_interval_count}")


def _cmd_run(args) -> int:
    if (args.config is None) == (args.scenario is None):
        print("run: provide exactly one of --config or --scenario", file=sys.stderr)
        return 2
    scenario = (
        load_config(args.config) if args.config else load_preset(args.scenario)
    )
    out_dir = Path(args.out)
    result = run_scenario(scenario, out_dir)
    emit_plot_data(result, out_dir / scenario.name)
    _print_run_summary(result, args.format)
    return 0


def _cmd_sweep(args) -> int:
    base = load_config(args.config) if args.config else load_preset(args.scenario)
    _, table = sweep(base, args.key, args.start, args.stop, args.steps, Path(args.out))
    if args.format == "json":
        rows = [line.split(",") for line in table.strip().splitlines()]
        header, body = rows[0], rows[1:]
        print(json.dumps([dict(zip(header, row)) for row in body], indent=2))
    else:
        print(table, end="")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_verification

    return 0 if run_verification(quick=args.quick) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twincav",
        description="Double-cavity optomechanics: entanglement-transfer simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario")
    run_p.add_argument("--config", help="path to a key=value config file")
    run_p.add_argument("--scenario", help="preset name: " + "|".join(sorted(PRESETS)))
    run_p.add_argument("--out", default="twincav_out", help="output directory")
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a 1-D parameter sweep")
    group = sweep_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config")
    group.add_argument("--scenario")
    sweep_p.add_argument("--key", required=True)
    sweep_p.add_argument("--start", type=float, required=True)
    sweep_p.add_argument("--stop", type=float, required=True)
    sweep_p.add_argument("--steps", type=int, required=True)
    sweep_p.add_argument("--out", default="twincav_out", help="output directory")
    sweep_p.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep_p.set_defaults(func=_cmd_sweep)

    verify_p = sub.add_parser("verify", help="run the oracle cross-check suite")
    verify_p.add_argument(
        "--quick", action="store_true", help="skip the slower Monte Carlo checks"
    )
    verify_p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
