"""Declarative experiment configs, presets, execution and disorder ensembles.

Each preset reproduces one figure-style scenario end to end:

* ``toy1``            relaxation onto a known triple-Gaussian ground state
* ``toy2``            relaxation in the asymmetric double well
* ``bloch-free``      ballistic packet on the free chain
* ``bloch-tilt``      tilt only: Bloch oscillations confine the packet
* ``bloch-friction``  tilt plus friction: transport restored
* ``anderson-free``   site disorder only
* ``anderson-friction`` tilt, friction and disorder

Configs are plain dicts (JSON-friendly).  Unknown keys are rejected, every
omitted key gets its documented default, and the fully resolved parameter set
is what lands in the output manifest, so a manifest can be replayed as a
config.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .continuous import SlkParams, run_continuous
from .discrete import DiscreteSlkParams, SinePacket, run_discrete, sine_packet
from .errors import ConfigError
from .observables import RunResult
from .potentials import (
    DisorderSpec,
    DoubleWellParams,
    PotentialField,
    TripleGaussianGroundState,
    anderson_disorder,
    double_well,
    linear_tilt,
    tabulated,
    toy1_ground_state,
    toy1_potential,
)
from .spectral import CHAIN_HOPPING, ground_state
from .state import Grid1D, Lattice, WaveFunction, normalize

KINDS = ("toy1", "toy2", "bloch", "anderson", "custom")


# ---------------------------------------------------------------------------
# typed readers (all raise ConfigError naming the offending field)
# ---------------------------------------------------------------------------


def _as_float(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def _as_int(key: str, value) -> int:
    if isinstance(value, bool):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if isinstance(value, float):
        if value != int(value):
            raise ConfigError(key, f"must be an integer (got {value})")
        value = int(value)
    if not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return value


def _as_bool(key: str, value) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(key, f"expected true/false, got {value!r}")
    return value


def _positive(key: str, value: float) -> float:
    if value <= 0:
        raise ConfigError(key, f"must be positive (got {value})")
    return value


def _nonnegative(key: str, value: float) -> float:
    if value < 0:
        raise ConfigError(key, f"must be nonnegative (got {value})")
    return value


# ---------------------------------------------------------------------------
# schemas: key -> (reader, default or None when derived later)
# ---------------------------------------------------------------------------

_GRID_KEYS = {
    "x_min": (_as_float, -10.0),
    "x_max": (_as_float, 10.0),
    "n": (_as_int, 1024),
    "dt": (_as_float, 1e-3),
    "record_every": (_as_int, 100),
    "rho_floor": (_as_float, 1e-12),
    "gauge": (_as_bool, True),
    "snapshot_times": (None, None),
}

_SCHEMAS: dict[str, dict] = {
    "toy1": {
        **_GRID_KEYS,
        "nu": (_as_float, 1.0),
        "beta": (_as_float, 0.5),
        "t_max": (_as_float, 50.0),
        "a": (_as_float, 1.5),
        "sigma_plus": (_as_float, 0.45),
        "sigma_minus": (_as_float, 0.55),
        "sigma_0": (_as_float, 0.5),
        "c_plus": (_as_float, 1.0),
        "c_minus": (_as_float, 0.8),
        "c_0": (_as_float, 0.5),
    },
    "toy2": {
        **_GRID_KEYS,
        "nu": (_as_float, 1.0),
        "beta": (_as_float, 0.3),
        "t_max": (_as_float, 50.0),
        "a_plus": (_as_float, 2.25),
        "a_minus": (_as_float, 1.75),
        "v0": (_as_float, 1.0),
        "delta": (_as_float, 0.1),
        "initial_center": (_as_float, None),
        "initial_width": (_as_float, None),
    },
    "bloch": {
        "s": (_as_int, 100),
        "epsilon": (_as_int, 17),
        "k": (_as_int, None),
        "g": (_as_float, 0.0),
        "beta": (_as_float, 0.0),
        "dt": (_as_float, 0.02),
        "t_max": (_as_float, None),
        "delta": (_as_int, None),
        "record_every": (_as_int, 25),
    },
    "anderson": {
        "s": (_as_int, 100),
        "epsilon": (_as_int, 17),
        "k": (_as_int, None),
        "g": (_as_float, 0.0),
        "beta": (_as_float, 0.0),
        "sigma": (_as_float, None),
        "seed": (_as_int, 42),
        "dt": (_as_float, 0.02),
        "t_max": (_as_float, None),
        "delta": (_as_int, None),
        "record_every": (_as_int, 100),
    },
    "custom": {
        "propagator": (None, "discrete"),
        "potential": (None, None),
        # discrete route
        "s": (_as_int, None),
        "epsilon": (_as_int, 17),
        "k": (_as_int, None),
        "beta": (_as_float, 0.0),
        "dt": (_as_float, None),
        "t_max": (_as_float, None),
        "delta": (_as_int, None),
        "record_every": (_as_int, 1),
        # continuous route
        "nu": (_as_float, 1.0),
        "x_min": (_as_float, -10.0),
        "x_max": (_as_float, 10.0),
        "n": (_as_int, None),
        "initial_center": (_as_float, 0.0),
        "initial_width": (_as_float, 1.0),
        "rho_floor": (_as_float, 1e-12),
        "gauge": (_as_bool, True),
        "snapshot_times": (None, None),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated scenario: kind plus the fully resolved parameter set."""

    kind: str
    params: dict
    output_dir: str | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, **self.params}
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out


def g0_for(s: int) -> float:
    """Natural tilt unit 2/s of an s-site chain."""
    return 2.0 / s


def sigma0_for(s: int) -> float:
    """Disorder scale (10/s)^{3/2} of an s-site chain."""
    return (10.0 / s) ** 1.5


def _resolve_k(params: dict) -> None:
    eps = params["epsilon"]
    if params["k"] is None:
        k2 = (eps - 1) / 2
        if k2 != int(k2):
            raise ConfigError(
                "k", f"k = (epsilon-1)/2 = {k2} is not an integer; set k explicitly"
            )
        params["k"] = int(k2)
    if not 1 <= params["k"] <= eps:
        raise ConfigError("k", f"must satisfy 1 <= k <= epsilon={eps}")


def _validate_chain(params: dict) -> None:
    if params["s"] < 2:
        raise ConfigError("s", "chain needs at least 2 sites")
    if not 1 <= params["epsilon"] < params["s"]:
        raise ConfigError("epsilon", f"must be in 1..s-1 (s={params['s']})")
    _resolve_k(params)
    if params["delta"] is None:
        params["delta"] = 2 * params["epsilon"]
    if not 0 < params["delta"] < params["s"]:
        raise ConfigError("delta", f"must be in 1..s-1 (s={params['s']})")
    _positive("dt", params["dt"])
    _nonnegative("beta", params["beta"])
    if params["t_max"] is not None:
        _nonnegative("t_max", params["t_max"])
    if params["record_every"] < 1:
        raise ConfigError("record_every", "must be a positive integer")


def _validate_grid(params: dict) -> None:
    if params["n"] < 3:
        raise ConfigError("n", "grid needs at least 3 points")
    if not params["x_min"] < params["x_max"]:
        raise ConfigError("x_min", "x_min must be smaller than x_max")
    _positive("dt", params["dt"])
    _positive("t_max", params["t_max"])
    _positive("nu", params["nu"])
    _nonnegative("beta", params["beta"])
    if not 0 <= params["rho_floor"] < 1:
        raise ConfigError("rho_floor", "must be in [0, 1)")
    if params["record_every"] < 1:
        raise ConfigError("record_every", "must be a positive integer")
    st = params["snapshot_times"]
    if st is not None:
        if not isinstance(st, (list, tuple)) or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in st
        ):
            raise ConfigError("snapshot_times", "expected a list of times")
        params["snapshot_times"] = [float(t) for t in st]


def resolve_config(raw: dict) -> ExperimentConfig:
    """Validate a raw dict and fill in every default and derived value."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    raw = dict(raw)
    kind = raw.pop("kind", None)
    if kind not in KINDS:
        raise ConfigError("kind", f"must be one of {', '.join(KINDS)} (got {kind!r})")
    output_dir = raw.pop("output_dir", None)
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("output_dir", "expected a path string")

    schema = _SCHEMAS[kind]
    params: dict = {}
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(key, f"unknown key for kind '{kind}'")
        reader = schema[key][0]
        params[key] = reader(key, value) if reader is not None else value
    for key, (_, default) in schema.items():
        params.setdefault(key, default)

    if kind in ("bloch", "anderson"):
        if params["t_max"] is None:
            params["t_max"] = (4.0 if kind == "bloch" else 20.0) * params["s"]
        _validate_chain(params)
        if kind == "anderson":
            if params["sigma"] is None:
                params["sigma"] = 2.0 * sigma0_for(params["s"])
            _nonnegative("sigma", params["sigma"])
    elif kind in ("toy1", "toy2"):
        _validate_grid(params)
        if kind == "toy1":
            for key in ("sigma_plus", "sigma_minus", "sigma_0"):
                _positive(key, params[key])
        else:
            _positive("a_plus", params["a_plus"])
            _positive("a_minus", params["a_minus"])
            _positive("v0", params["v0"])
            if params["initial_center"] is None:
                params["initial_center"] = params["a_plus"]
            if params["initial_width"] is None:
                # harmonic ground-state width of the starting well
                curvature = 8.0 * params["v0"] / params["a_plus"] ** 2
                params["initial_width"] = float(
                    np.sqrt(params["nu"] / (2.0 * np.sqrt(curvature)))
                )
            _positive("initial_width", params["initial_width"])
        if params["snapshot_times"] is None:
            params["snapshot_times"] = [0.0, params["t_max"]]
    else:  # custom
        _resolve_custom(params)

    return ExperimentConfig(kind, params, output_dir)


def _resolve_custom(params: dict) -> None:
    if params["propagator"] not in ("continuous", "discrete"):
        raise ConfigError("propagator", "must be 'continuous' or 'discrete'")
    pot = params["potential"]
    if not isinstance(pot, (list, tuple)) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in pot
    ):
        raise ConfigError("potential", "expected a list of numbers")
    params["potential"] = [float(v) for v in pot]
    if params["dt"] is None:
        raise ConfigError("dt", "required for custom experiments")
    if params["t_max"] is None:
        raise ConfigError("t_max", "required for custom experiments")
    if params["propagator"] == "discrete":
        if params["s"] is None:
            params["s"] = len(params["potential"])
        if params["s"] != len(params["potential"]):
            raise ConfigError("potential", f"length must equal s={params['s']}")
        _validate_chain(params)
        unused = ("nu", "x_min", "x_max", "n", "initial_center",
                  "initial_width", "rho_floor", "gauge", "snapshot_times")
    else:
        if params["n"] is None:
            params["n"] = len(params["potential"])
        if params["n"] != len(params["potential"]):
            raise ConfigError("potential", f"length must equal n={params['n']}")
        _positive("initial_width", params["initial_width"])
        _validate_grid(params)
        if params["snapshot_times"] is None:
            params["snapshot_times"] = [0.0, params["t_max"]]
        unused = ("s", "epsilon", "k", "delta")
    # keep the manifest free of the other route's keys
    for key in unused:
        params.pop(key, None)


PRESETS: dict[str, dict] = {
    "toy1": {"kind": "toy1"},
    "toy2": {"kind": "toy2"},
    "bloch-free": {"kind": "bloch", "g": 0.0, "beta": 0.0},
    "bloch-tilt": {"kind": "bloch", "g": 3 * g0_for(100), "beta": 0.0},
    "bloch-friction": {"kind": "bloch", "g": 3 * g0_for(100), "beta": 4 * g0_for(100)},
    "anderson-free": {"kind": "anderson", "g": 0.0, "beta": 0.0},
    "anderson-friction": {
        "kind": "anderson",
        "g": 3 * g0_for(100),
        "beta": 4 * g0_for(100),
    },
}

PRESET_NOTES: dict[str, str] = {
    "toy1": "triple-Gaussian ground state, friction relaxation (nu=1, beta=0.5)",
    "toy2": "asymmetric double well, friction relaxation (nu=1, beta=0.3)",
    "bloch-free": "free ballistic packet on the 100-site chain",
    "bloch-tilt": "linear tilt g=3g0: Bloch oscillations confine the packet",
    "bloch-friction": "tilt plus friction beta=4g0: transport restored",
    "anderson-free": "site disorder sigma=2*sigma0, no tilt, no friction",
    "anderson-friction": "disorder plus tilt g=3g0 and friction beta=4g0",
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError("preset", f"unknown preset {name!r} (known: {known})")
    return resolve_config(dict(PRESETS[name]))


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class ExperimentResult:
    """Everything emit_outputs needs: the run plus its inputs."""

    config: ExperimentConfig
    run: RunResult
    potential: PotentialField
    derived: dict


def _execute_toy1(params: dict) -> ExperimentResult:
    grid = Grid1D(params["x_min"], params["x_max"], params["n"])
    mixture = TripleGaussianGroundState(
        a=params["a"],
        sigma_plus=params["sigma_plus"],
        sigma_minus=params["sigma_minus"],
        sigma_0=params["sigma_0"],
        c_plus=params["c_plus"],
        c_minus=params["c_minus"],
        c_0=params["c_0"],
    )
    V = toy1_potential(mixture, params["nu"], grid)
    reference = toy1_ground_state(mixture, grid)
    x = grid.points()
    psi0 = normalize(
        WaveFunction(
            grid,
            np.exp(-((x + params["a"]) ** 2) / (4 * params["sigma_minus"] ** 2)).astype(
                complex
            ),
        )
    )
    p = SlkParams(
        nu=params["nu"],
        beta=params["beta"],
        dt=params["dt"],
        t_max=params["t_max"],
        rho_floor=params["rho_floor"],
        gauge=params["gauge"],
    )
    run = run_continuous(
        psi0,
        V,
        p,
        record_every=params["record_every"],
        reference=reference,
        snapshot_times=params["snapshot_times"],
    )
    return ExperimentResult(
        ExperimentConfig("toy1", params), run, V, derived={"reference": "analytic"}
    )


def _execute_toy2(params: dict) -> ExperimentResult:
    grid = Grid1D(params["x_min"], params["x_max"], params["n"])
    well = DoubleWellParams(
        a_plus=params["a_plus"],
        a_minus=params["a_minus"],
        v0=params["v0"],
        delta=params["delta"],
    )
    V = double_well(well, grid)
    spectrum = ground_state(V, params["nu"])
    x = grid.points()
    psi0 = normalize(
        WaveFunction(
            grid,
            np.exp(
                -((x - params["initial_center"]) ** 2)
                / (4 * params["initial_width"] ** 2)
            ).astype(complex),
        )
    )
    p = SlkParams(
        nu=params["nu"],
        beta=params["beta"],
        dt=params["dt"],
        t_max=params["t_max"],
        rho_floor=params["rho_floor"],
        gauge=params["gauge"],
    )
    run = run_continuous(
        psi0,
        V,
        p,
        record_every=params["record_every"],
        reference=spectrum.ground_state,
        snapshot_times=params["snapshot_times"],
    )
    return ExperimentResult(
        ExperimentConfig("toy2", params),
        run,
        V,
        derived={"reference": "exact diagonalization", "e0": float(spectrum.eigenvalues[0])},
    )


def _execute_chain(kind: str, params: dict) -> ExperimentResult:
    lattice = Lattice(params["s"])
    values = linear_tilt(params["g"], lattice).values
    derived: dict = {"g0": g0_for(params["s"])}
    if kind == "anderson":
        derived["sigma0"] = sigma0_for(params["s"])
        disorder = anderson_disorder(
            DisorderSpec(sigma=params["sigma"], seed=params["seed"]), lattice
        )
        values = values + disorder.values
    V = PotentialField(lattice, values)
    psi0 = sine_packet(SinePacket(params["epsilon"], params["k"]), lattice)
    p = DiscreteSlkParams(beta=params["beta"], dt=params["dt"], t_max=params["t_max"])
    run = run_discrete(
        psi0, V, p, record_every=params["record_every"], delta=params["delta"]
    )
    return ExperimentResult(ExperimentConfig(kind, params), run, V, derived)


def _execute_custom(params: dict) -> ExperimentResult:
    if params["propagator"] == "discrete":
        lattice = Lattice(params["s"])
        V = tabulated(lattice, params["potential"])
        psi0 = sine_packet(SinePacket(params["epsilon"], params["k"]), lattice)
        p = DiscreteSlkParams(
            beta=params["beta"], dt=params["dt"], t_max=params["t_max"]
        )
        run = run_discrete(
            psi0, V, p, record_every=params["record_every"], delta=params["delta"]
        )
        return ExperimentResult(ExperimentConfig("custom", params), run, V, {})
    grid = Grid1D(params["x_min"], params["x_max"], params["n"])
    V = tabulated(grid, params["potential"])
    x = grid.points()
    psi0 = normalize(
        WaveFunction(
            grid,
            np.exp(
                -((x - params["initial_center"]) ** 2)
                / (4 * params["initial_width"] ** 2)
            ).astype(complex),
        )
    )
    p = SlkParams(
        nu=params["nu"],
        beta=params["beta"],
        dt=params["dt"],
        t_max=params["t_max"],
        rho_floor=params["rho_floor"],
        gauge=params["gauge"],
    )
    run = run_continuous(
        psi0,
        V,
        p,
        record_every=params["record_every"],
        snapshot_times=params["snapshot_times"],
    )
    return ExperimentResult(ExperimentConfig("custom", params), run, V, {})


def build_potential(cfg: ExperimentConfig) -> tuple[PotentialField, float]:
    """The scenario's potential plus the matching nu (grids) or hopping (chains)."""
    params = cfg.params
    if cfg.kind == "toy1":
        grid = Grid1D(params["x_min"], params["x_max"], params["n"])
        mixture = TripleGaussianGroundState(
            a=params["a"],
            sigma_plus=params["sigma_plus"],
            sigma_minus=params["sigma_minus"],
            sigma_0=params["sigma_0"],
            c_plus=params["c_plus"],
            c_minus=params["c_minus"],
            c_0=params["c_0"],
        )
        return toy1_potential(mixture, params["nu"], grid), params["nu"]
    if cfg.kind == "toy2":
        grid = Grid1D(params["x_min"], params["x_max"], params["n"])
        well = DoubleWellParams(
            a_plus=params["a_plus"],
            a_minus=params["a_minus"],
            v0=params["v0"],
            delta=params["delta"],
        )
        return double_well(well, grid), params["nu"]
    if cfg.kind in ("bloch", "anderson"):
        lattice = Lattice(params["s"])
        values = linear_tilt(params["g"], lattice).values
        if cfg.kind == "anderson":
            disorder = anderson_disorder(
                DisorderSpec(sigma=params["sigma"], seed=params["seed"]), lattice
            )
            values = values + disorder.values
        return PotentialField(lattice, values), CHAIN_HOPPING
    # custom
    if params["propagator"] == "discrete":
        return tabulated(Lattice(params["s"]), params["potential"]), CHAIN_HOPPING
    grid = Grid1D(params["x_min"], params["x_max"], params["n"])
    return tabulated(grid, params["potential"]), params["nu"]


def execute(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the scenario in memory (no files)."""
    if cfg.kind == "toy1":
        result = _execute_toy1(dict(cfg.params))
    elif cfg.kind == "toy2":
        result = _execute_toy2(dict(cfg.params))
    elif cfg.kind in ("bloch", "anderson"):
        result = _execute_chain(cfg.kind, dict(cfg.params))
    elif cfg.kind == "custom":
        result = _execute_custom(dict(cfg.params))
    else:  # pragma: no cover - resolve_config guards this
        raise ConfigError("kind", f"unhandled kind {cfg.kind!r}")
    result.config = ExperimentConfig(cfg.kind, result.config.params, cfg.output_dir)
    return result


def run_experiment(cfg: ExperimentConfig, output_dir: str | None = None) -> dict:
    """Execute the scenario and write its output files; returns the manifest.

    The directory comes from ``output_dir`` or the config's ``output_dir``.
    """
    target = output_dir or cfg.output_dir
    if not target:
        raise ConfigError("output_dir", "no output directory given")
    from . import io  # deferred: io imports this module's result types

    return io.emit_outputs(execute(cfg), target)


@dataclass(eq=False)
class EnsembleResult:
    """Arrival curves of a disorder ensemble plus pointwise quartiles."""

    config: ExperimentConfig
    seeds: list[int]
    times: np.ndarray
    arrival: np.ndarray  # one row per realization
    q25: np.ndarray
    median: np.ndarray
    q75: np.ndarray


def disorder_ensemble(cfg: ExperimentConfig, n_realizations: int) -> EnsembleResult:
    """Run n realizations with seeds seed, seed+1, ... and pool arrivals."""
    if cfg.kind != "anderson":
        raise ConfigError("kind", "disorder ensembles need kind 'anderson'")
    if n_realizations < 1:
        raise ConfigError("n_realizations", "must be a positive integer")
    base = cfg.params["seed"]
    seeds = [base + i for i in range(n_realizations)]

    def one(seed: int) -> np.ndarray:
        params = dict(cfg.params)
        params["seed"] = seed
        return _execute_chain("anderson", params).run.series.arrival_prob

    with ThreadPoolExecutor(max_workers=min(8, n_realizations)) as pool:
        curves = list(pool.map(one, seeds))

    # All realizations share the time axis; rebuild it from the cadence.
    nsteps = int(round(cfg.params["t_max"] / cfg.params["dt"]))
    rec = cfg.params["record_every"]
    steps = sorted(set(list(range(0, nsteps, rec)) + [nsteps]))
    times = np.asarray([s * cfg.params["dt"] for s in steps])

    arrival = np.vstack(curves)
    return EnsembleResult(
        config=cfg,
        seeds=seeds,
        times=times,
        arrival=arrival,
        q25=np.percentile(arrival, 25, axis=0),
        median=np.percentile(arrival, 50, axis=0),
        q75=np.percentile(arrival, 75, axis=0),
    )
