"""Command-line entry point.

Subcommands:

    run              execute a preset or config file, write CSVs + manifest
    spectrum         exact-diagonalization dump for a scenario's Hamiltonian
    ensemble         disorder ensemble (anderson kind): curves + quartiles
    validate-config  parse and validate a config file, report problems
    list-presets     show the built-in scenario presets

Exit status: 0 on success, 1 on config errors (the message names the
offending field), 2 on runtime failures (diverged run, I/O error).

Output directory precedence: --out flag, then the config's ``output_dir``,
then $SLKSIM_OUTPUT_DIR, then ./runs/<name>.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .errors import ConfigError, SlkSimError
from .experiments import (
    PRESET_NOTES,
    PRESETS,
    ExperimentConfig,
    build_potential,
    disorder_ensemble,
    execute,
    resolve_config,
)
from .spectral import ground_state


def _parse_override(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ConfigError("--set", f"expected key=value, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _load_raw(args) -> tuple[dict, str]:
    """Raw config dict plus a default run name, from --preset or --config."""
    if args.preset and args.config:
        raise ConfigError("--preset", "give either --preset or --config, not both")
    if args.preset:
        if args.preset not in PRESETS:
            known = ", ".join(sorted(PRESETS))
            raise ConfigError("--preset", f"unknown preset {args.preset!r} (known: {known})")
        raw = dict(PRESETS[args.preset])
        name = args.preset
    elif args.config:
        raw = io.load_config(args.config)
        name = os.path.splitext(os.path.basename(args.config))[0]
    else:
        raise ConfigError("--preset", "one of --preset or --config is required")
    for item in args.set or []:
        key, value = _parse_override(item)
        raw[key] = value
    return raw, name


def _resolve_out_dir(args, cfg: ExperimentConfig, name: str) -> str:
    if args.out:
        return args.out
    if cfg.output_dir:
        return cfg.output_dir
    env = os.environ.get("SLKSIM_OUTPUT_DIR")
    if env:
        return os.path.join(env, name)
    return os.path.join("runs", name)


def _add_config_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--preset", help="built-in scenario name")
    sub.add_argument("--config", help="path to a JSON config (or manifest)")
    sub.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (JSON-parsed value); repeatable",
    )
    sub.add_argument("--out", help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slksim",
        description="Dissipative quantum annealing runs on 1-D grids and chains.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="execute a scenario and write outputs")
    _add_config_args(run_p)

    spec_p = subs.add_parser("spectrum", help="dump eigenvalues and ground state")
    _add_config_args(spec_p)

    ens_p = subs.add_parser("ensemble", help="disorder ensemble over seeds")
    _add_config_args(ens_p)
    ens_p.add_argument(
        "--realizations", type=int, default=20, help="number of seeds (default 20)"
    )

    val_p = subs.add_parser("validate-config", help="check a config file")
    val_p.add_argument("config_path")

    subs.add_parser("list-presets", help="show built-in presets")
    return parser


def _cmd_run(args) -> int:
    raw, name = _load_raw(args)
    cfg = resolve_config(raw)
    result = execute(cfg)
    out_dir = _resolve_out_dir(args, cfg, name)
    manifest = io.emit_outputs(result, out_dir)
    print(f"wrote {len(manifest['outputs'])} entries to {out_dir}")
    return 0


def _cmd_spectrum(args) -> int:
    raw, name = _load_raw(args)
    cfg = resolve_config(raw)
    V, nu_or_hopping = build_potential(cfg)
    spectrum = ground_state(V, nu_or_hopping)
    out_dir = _resolve_out_dir(args, cfg, f"{name}-spectrum")
    io.emit_spectrum(spectrum, cfg.as_dict(), out_dir)
    print(
        f"E0 = {spectrum.eigenvalues[0]:.12g}; "
        f"wrote spectrum.csv and ground_state.csv to {out_dir}"
    )
    return 0


def _cmd_ensemble(args) -> int:
    raw, name = _load_raw(args)
    cfg = resolve_config(raw)
    ens = disorder_ensemble(cfg, args.realizations)
    out_dir = _resolve_out_dir(args, cfg, f"{name}-ensemble")
    io.emit_ensemble(ens, out_dir)
    print(
        f"{len(ens.seeds)} realizations; median final arrival "
        f"{ens.median[-1]:.6g}; wrote {out_dir}"
    )
    return 0


def _cmd_validate(args) -> int:
    cfg = resolve_config(io.load_config(args.config_path))
    print(f"valid config: kind={cfg.kind}")
    return 0


def _cmd_list_presets(_args) -> int:
    width = max(len(n) for n in PRESETS)
    for preset in sorted(PRESETS):
        print(f"{preset:<{width}}  {PRESET_NOTES[preset]}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "spectrum": _cmd_spectrum,
    "ensemble": _cmd_ensemble,
    "validate-config": _cmd_validate,
    "list-presets": _cmd_list_presets,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (SlkSimError, OSError, json.JSONDecodeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
