"""Scenario ingestion, execution and result emission.

A scenario is a single strict-schema JSON file (schema_version 1); scans
are expressed as explicit grids inside the file so the scenario hash in the
output metadata pins the whole experiment.  Unknown fields are rejected and
validation reports every problem, not just the first.

Output is a typed ResultTable, emitted as CSV (metadata as "# key=value"
comment lines before the header, RFC-4180 quoting, LF line endings) or JSON
({"metadata": ..., "columns": ..., "rows": ...}).  Reals are serialized
with 17 significant digits, which round-trips float64 bit-exactly;
non-finite reals become null in JSON (flag columns carry the information).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .linalg import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    QuantumState,
    ValidationError,
    support_projector,
)
from . import ensembles as ens
from . import cascade as casc
from . import fock
from . import zeno

SCHEMA_VERSION = 1
KINDS = (
    "zeno-qubit",
    "zeno-custom",
    "mz-single",
    "mz-cascade",
    "fisher-scan",
    "estimate-demo",
)


class ScenarioError(ValueError):
    """Carries the full list of validation problems for one scenario file."""

    def __init__(self, errors: list[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class Column:
    name: str
    dtype: str  # "real" | "int" | "bool" | "string"


@dataclass
class ResultTable:
    columns: list[Column]
    rows: list[list]
    metadata: dict = field(default_factory=dict)


@dataclass
class ScenarioFile:
    kind: str
    params: dict
    source_hash: str


# ---------------------------------------------------------------------------
# validation helpers

class _Checker:
    """Accumulates validation errors while pulling typed fields from a dict."""

    def __init__(self, data: dict, context: str = "") -> None:
        self.data = data
        self.context = context
        self.errors: list[str] = []
        self.seen: set[str] = set()

    def _key(self, name: str) -> str:
        return f"{self.context}{name}"

    def fail(self, msg: str) -> None:
        self.errors.append(msg)

    def finish_strict(self) -> None:
        for key in self.data:
            if key not in self.seen:
                self.fail(f"unknown field {self._key(key)!r}")

    def get(self, name: str, required: bool = False, default=None):
        self.seen.add(name)
        if name not in self.data:
            if required:
                self.fail(f"missing field {self._key(name)!r}")
            return default
        return self.data[name]

    def number(self, name: str, required=False, default=None, minimum=None, exclusive_min=None):
        val = self.get(name, required, default)
        if val is None or val is default and name not in self.data:
            return default
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(f"{self._key(name)} must be a number")
            return default
        if minimum is not None and val < minimum:
            self.fail(f"{self._key(name)} must be >= {minimum}")
            return default
        if exclusive_min is not None and not val > exclusive_min:
            self.fail(f"{self._key(name)} must be > {exclusive_min}")
            return default
        return float(val)

    def integer(self, name: str, required=False, default=None, minimum=None):
        val = self.get(name, required, default)
        if val is None or (val is default and name not in self.data):
            return default
        if isinstance(val, bool) or not isinstance(val, int):
            self.fail(f"{self._key(name)} must be an integer")
            return default
        if minimum is not None and val < minimum:
            self.fail(f"{self._key(name)} must be >= {minimum}")
            return default
        return int(val)

    def boolean(self, name: str, default=False):
        val = self.get(name, default=default)
        if not isinstance(val, bool):
            self.fail(f"{self._key(name)} must be a boolean")
            return default
        return val

    def choice(self, name: str, options, required=False, default=None):
        val = self.get(name, required, default)
        if val is None:
            return default
        if val not in options:
            self.fail(f"{self._key(name)} must be one of {sorted(options)}, got {val!r}")
            return default
        return val

    def int_list(self, name: str, required=False, minimum=None, ascending=False):
        val = self.get(name, required)
        if val is None:
            return None
        if not isinstance(val, list) or not val or any(
            isinstance(v, bool) or not isinstance(v, int) for v in val
        ):
            self.fail(f"{self._key(name)} must be a nonempty list of integers")
            return None
        if minimum is not None and any(v < minimum for v in val):
            self.fail(f"{self._key(name)} entries must be >= {minimum}")
            return None
        if ascending and val != sorted(set(val)):
            self.fail(f"{self._key(name)} must be strictly ascending")
            return None
        return val

    def number_list(self, name: str, required=False):
        val = self.get(name, required)
        if val is None:
            return None
        if not isinstance(val, list) or not val or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in val
        ):
            self.fail(f"{self._key(name)} must be a nonempty list of numbers")
            return None
        return [float(v) for v in val]

    def exactly_one(self, scalar_name, scalar_val, list_name, list_val):
        if (scalar_val is None) == (list_val is None):
            self.fail(f"exactly one of {scalar_name!r} or {list_name!r} is required")
            return []
        return [scalar_val] if list_val is None else list(list_val)


def _parse_complex(value, name: str, errors: list[str]) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    errors.append(f"{name} must be a number or a [re, im] pair")
    return 0j


def _parse_matrix(value, name: str, errors: list[str]) -> np.ndarray | None:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        errors.append(f"{name} must be a list of rows")
        return None
    rows = [[_parse_complex(v, name, errors) for v in row] for row in value]
    if len({len(r) for r in rows}) != 1:
        errors.append(f"{name} rows must have equal length")
        return None
    return np.array(rows, dtype=complex)


def _parse_vector(value, name: str, errors: list[str]) -> np.ndarray | None:
    if not isinstance(value, list) or not value:
        errors.append(f"{name} must be a nonempty list")
        return None
    return np.array([_parse_complex(v, name, errors) for v in value], dtype=complex)


def _parse_mode(value, name: str, errors: list[str]) -> fock.ModeSpec | None:
    if not isinstance(value, dict):
        errors.append(f"{name} must be an object with a 'kind' field")
        return None
    c = _Checker(value, context=f"{name}.")
    kind = c.choice("kind", ("vacuum", "fock", "coherent"), required=True)
    mode: fock.ModeSpec | None = None
    if kind == "vacuum":
        mode = fock.Vacuum()
    elif kind == "fock":
        n = c.integer("n", required=True, minimum=0)
        if n is not None:
            mode = fock.Fock(n)
    elif kind == "coherent":
        raw = c.get("alpha", required=True)
        if raw is not None:
            mode = fock.Coherent(_parse_complex(raw, f"{name}.alpha", c.errors))
    c.finish_strict()
    errors.extend(c.errors)
    return mode if not c.errors else None


# ---------------------------------------------------------------------------
# parsing

def parse_scenario(path: str) -> ScenarioFile:
    """Load and strictly validate a scenario file.

    Raises ScenarioError carrying every detected problem.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"not valid JSON: {exc}"]) from exc
    if not isinstance(data, dict):
        raise ScenarioError(["scenario must be a JSON object"])
    digest = hashlib.sha256(raw).hexdigest()

    c = _Checker(data)
    version = c.integer("schema_version", required=True)
    if version is not None and version != SCHEMA_VERSION:
        c.fail(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
    kind = c.choice("kind", KINDS, required=True)

    params: dict = {}
    if kind is not None:
        validator = _VALIDATORS[kind]
        params = validator(c)
    c.finish_strict()
    if c.errors:
        raise ScenarioError(c.errors)
    return ScenarioFile(kind=kind, params=params, source_hash=digest)


def _validate_zeno_qubit(c: _Checker) -> dict:
    p: dict = {}
    p["n_qubits"] = c.integer("n_qubits", required=True, minimum=1)
    p["omega"] = c.number("omega", required=True, exclusive_min=0.0)
    p["family"] = c.choice(
        "family", (ens.GHZ, ens.PRODUCT_PLUS, ens.SEPARABLE_MIXTURE), required=True
    )
    p["representation"] = c.choice(
        "representation", ens.REPRESENTATIONS, default=ens.FULL_TENSOR
    )
    t = c.number("t", exclusive_min=0.0)
    t_grid = c.number_list("t_grid")
    p["t_values"] = c.exactly_one("t", t, "t_grid", t_grid)
    m = c.integer("m", minimum=1)
    m_grid = c.int_list("m_grid", minimum=1)
    p["m_values"] = c.exactly_one("m", m, "m_grid", m_grid)
    p["branches"] = c.integer("branches", default=3, minimum=1)
    p["seed"] = c.integer("seed", default=0, minimum=0)
    if p["family"] == ens.SEPARABLE_MIXTURE and p["representation"] != ens.FULL_TENSOR:
        c.fail("separable-mixture requires the full-tensor representation")
    return p


def _validate_zeno_custom(c: _Checker) -> dict:
    p: dict = {}
    p["hamiltonian"] = _parse_matrix(c.get("hamiltonian", required=True), "hamiltonian", c.errors)
    p["projector"] = _parse_matrix(c.get("projector", required=True), "projector", c.errors)
    state = c.get("initial_state")
    density = c.get("initial_density")
    if (state is None) == (density is None):
        c.fail("exactly one of 'initial_state' or 'initial_density' is required")
    p["initial_state"] = (
        _parse_vector(state, "initial_state", c.errors) if state is not None else None
    )
    p["initial_density"] = (
        _parse_matrix(density, "initial_density", c.errors) if density is not None else None
    )
    t = c.number("t", exclusive_min=0.0)
    t_grid = c.number_list("t_grid")
    p["t_values"] = c.exactly_one("t", t, "t_grid", t_grid)
    m = c.integer("m", minimum=1)
    m_grid = c.int_list("m_grid", minimum=1)
    p["m_values"] = c.exactly_one("m", m, "m_grid", m_grid)
    return p


def _validate_fisher_scan(c: _Checker) -> dict:
    p: dict = {}
    p["n_values"] = c.int_list("n_values", required=True, minimum=1)
    families = c.get("families", required=True)
    if not isinstance(families, list) or not families or any(
        f not in (ens.GHZ, ens.PRODUCT_PLUS) for f in families
    ):
        c.fail("families must be a nonempty list drawn from ['ghz', 'product-plus']")
        families = []
    p["families"] = families
    p["omega"] = c.number("omega", required=True, exclusive_min=0.0)
    p["m"] = c.integer("m", default=1, minimum=1)
    p["representation"] = c.choice(
        "representation", ens.REPRESENTATIONS, default=ens.FULL_TENSOR
    )
    return p


def _validate_estimate_demo(c: _Checker) -> dict:
    p: dict = {}
    p["n_qubits"] = c.integer("n_qubits", required=True, minimum=1)
    p["omega"] = c.number("omega", required=True, exclusive_min=0.0)
    p["family"] = c.choice("family", (ens.GHZ, ens.PRODUCT_PLUS), required=True)
    p["tau_true"] = c.number("tau_true", required=True, exclusive_min=0.0)
    p["m"] = c.integer("m", required=True, minimum=1)
    p["n_trials"] = c.integer("n_trials", default=1, minimum=1)
    p["seed"] = c.integer("seed", default=0, minimum=0)
    return p


def _validate_mz_single(c: _Checker) -> dict:
    p: dict = {}
    p["mode_a"] = _parse_mode(c.get("mode_a", required=True), "mode_a", c.errors)
    p["mode_b"] = _parse_mode(c.get("mode_b", required=True), "mode_b", c.errors)
    theta = c.number("theta")
    theta_grid = c.number_list("theta_grid")
    p["theta_values"] = c.exactly_one("theta", theta, "theta_grid", theta_grid)
    p["n_max"] = c.integer("n_max", minimum=1)
    return p


def _validate_mz_cascade(c: _Checker) -> dict:
    p: dict = {}
    p["topology"] = c.choice("topology", (casc.CONNECTED, casc.ZENO_CUT), required=True)
    p["theta"] = c.number("theta", required=True)
    p["mode_a"] = _parse_mode(c.get("mode_a", required=True), "mode_a", c.errors)
    p["mode_b"] = _parse_mode(c.get("mode_b", required=True), "mode_b", c.errors)
    m = c.integer("m", minimum=1)
    m_values = c.int_list("m_values", minimum=1, ascending=True)
    p["m_values"] = c.exactly_one("m", m, "m_values", m_values)
    fresh = c.get("fresh_a")
    p["fresh_a"] = _parse_mode(fresh, "fresh_a", c.errors) if fresh is not None else None
    if (p["topology"] == casc.ZENO_CUT) != (fresh is not None):
        c.fail("fresh_a is required iff topology is zeno-cut")
    p["n_max"] = c.integer("n_max", minimum=1)
    p["epsilon"] = c.number("epsilon", default=0.05, exclusive_min=0.0)
    p["leak_tol"] = c.number("leak_tol", default=1e-6, exclusive_min=0.0)
    p["refine"] = c.boolean("refine", default=False)
    p["postselect_vacuum"] = c.boolean("postselect_vacuum", default=False)
    return p


_VALIDATORS = {
    "zeno-qubit": _validate_zeno_qubit,
    "zeno-custom": _validate_zeno_custom,
    "fisher-scan": _validate_fisher_scan,
    "estimate-demo": _validate_estimate_demo,
    "mz-single": _validate_mz_single,
    "mz-cascade": _validate_mz_cascade,
}


# ---------------------------------------------------------------------------
# execution

def _parallel_map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _qubit_scenario(params: dict, n: int, t: float, m: int) -> zeno.ZenoScenario:
    family = params["family"]
    if family == ens.SEPARABLE_MIXTURE:
        rng = np.random.default_rng(np.random.SeedSequence([params["seed"], n]))
        spec = ens.random_separable_spec(n, params["omega"], params["branches"], rng)
    else:
        spec = ens.QubitEnsembleSpec(
            n_qubits=n,
            omega=params["omega"],
            representation=params["representation"],
            family=family,
        )
    h = ens.collective_hamiltonian(spec)
    state = ens.build_state(spec)
    if isinstance(state, QuantumState):
        proj = Projector(np.outer(state.amplitudes, state.amplitudes.conj()))
    else:
        proj = support_projector(state)
    return zeno.ZenoScenario(h, proj, state, total_time=t, num_measurements=m)


_ZENO_COLUMNS = [
    Column("t", "real"),
    Column("m", "int"),
    Column("tau", "real"),
    Column("p_exact", "real"),
    Column("p_quadratic", "real"),
    Column("p_quadratic_raw", "real"),
    Column("quadratic_clamped", "bool"),
    Column("p_gaussian", "real"),
    Column("fisher_quadratic", "real"),
    Column("quantum_fisher", "real"),
    Column("fisher_numeric", "real"),
    Column("tau_qz", "real"),
    Column("delta_tau_cr", "real"),
    Column("ratio", "real"),
    Column("zeno_time_infinite", "bool"),
]


def _report_cells(rep: zeno.ZenoReport, t: float, m: int) -> list:
    return [
        t,
        m,
        rep.tau,
        rep.p_exact,
        rep.p_quadratic,
        rep.p_quadratic_raw,
        rep.quadratic_clamped,
        rep.p_gaussian,
        rep.fisher_quadratic,
        math.nan if rep.quantum_fisher is None else rep.quantum_fisher,
        rep.fisher_numeric,
        rep.tau_qz,
        rep.delta_tau_cr,
        rep.ratio,
        rep.zeno_time_infinite,
    ]


def _execute_zeno_qubit(params: dict, threads: int) -> ResultTable:
    grid = [(t, m) for t in params["t_values"] for m in params["m_values"]]

    def cell(tm):
        t, m = tm
        rep = zeno.run_scenario(_qubit_scenario(params, params["n_qubits"], t, m))
        return [params["n_qubits"], params["family"], params["representation"]] + _report_cells(
            rep, t, m
        )

    rows = _parallel_map(cell, grid, threads)
    cols = [Column("n_qubits", "int"), Column("family", "string"), Column("representation", "string")]
    return ResultTable(columns=cols + _ZENO_COLUMNS, rows=rows)


def _execute_zeno_custom(params: dict, threads: int) -> ResultTable:
    h = HermitianOperator(params["hamiltonian"])
    proj = Projector(params["projector"])
    if params["initial_state"] is not None:
        initial = QuantumState(params["initial_state"])
    else:
        initial = DensityMatrix(params["initial_density"])
    grid = [(t, m) for t in params["t_values"] for m in params["m_values"]]

    def cell(tm):
        t, m = tm
        rep = zeno.run_scenario(zeno.ZenoScenario(h, proj, initial, t, m))
        return _report_cells(rep, t, m)

    rows = _parallel_map(cell, grid, threads)
    return ResultTable(columns=list(_ZENO_COLUMNS), rows=rows)


def _execute_fisher_scan(params: dict, threads: int) -> ResultTable:
    grid = [(n, fam) for n in params["n_values"] for fam in params["families"]]
    omega, m = params["omega"], params["m"]

    def cell(nf):
        n, fam = nf
        spec = ens.QubitEnsembleSpec(
            n_qubits=n, omega=omega, representation=params["representation"], family=fam
        )
        h = ens.collective_hamiltonian(spec)
        state = ens.build_state(spec)
        proj = Projector(np.outer(state.amplitudes, state.amplitudes.conj()))
        f = zeno.fisher_quadratic(h, proj, state)
        fq = zeno.quantum_fisher_pure(h, state)
        sep, top = ens.fisher_bounds(spec)
        return [
            n,
            fam,
            f,
            fq,
            sep,
            top,
            zeno.zeno_time(f, m),
            zeno.cramer_rao_interval(f, m),
        ]

    rows = _parallel_map(cell, grid, threads)
    cols = [
        Column("n_qubits", "int"),
        Column("family", "string"),
        Column("fisher_quadratic", "real"),
        Column("quantum_fisher", "real"),
        Column("separable_bound", "real"),
        Column("max_bound", "real"),
        Column("tau_qz", "real"),
        Column("delta_tau_cr", "real"),
    ]
    table = ResultTable(columns=cols, rows=rows)
    table.metadata["m"] = m
    return table


def _execute_estimate_demo(params: dict, threads: int) -> ResultTable:
    spec = ens.QubitEnsembleSpec(
        n_qubits=params["n_qubits"], omega=params["omega"], family=params["family"]
    )
    h = ens.collective_hamiltonian(spec)
    state = ens.build_state(spec)
    proj = Projector(np.outer(state.amplitudes, state.amplitudes.conj()))
    # total_time/num_measurements only anchor the scenario; the likelihood
    # itself is a function of tau.
    scenario = zeno.ZenoScenario(h, proj, state, params["tau_true"], 1)
    likelihood = zeno.TwoOutcomeLikelihood(scenario)
    f = zeno.fisher_quadratic(h, proj, state)

    seeds = [
        int(s.generate_state(1)[0])
        for s in np.random.SeedSequence(params["seed"]).spawn(params["n_trials"])
    ]

    def cell(args):
        trial, seed = args
        res = zeno.sample_and_estimate(likelihood, params["tau_true"], params["m"], seed)
        return [trial, seed, res.tau_hat, res.stderr, res.boundary_clipped]

    rows = _parallel_map(cell, list(enumerate(seeds)), threads)
    cols = [
        Column("trial", "int"),
        Column("seed", "int"),
        Column("tau_hat", "real"),
        Column("stderr", "real"),
        Column("boundary_clipped", "bool"),
    ]
    table = ResultTable(columns=cols, rows=rows)
    table.metadata["p_true"] = likelihood(params["tau_true"])
    table.metadata["fisher_quadratic"] = f
    table.metadata["delta_tau_cr"] = zeno.cramer_rao_interval(f, params["m"])
    if params["n_trials"] > 1:
        hats = [row[2] for row in rows]
        table.metadata["tau_hat_std"] = float(np.std(hats, ddof=1))
    return table


def _execute_mz_single(params: dict, threads: int) -> ResultTable:
    n_max = params["n_max"] or fock.auto_n_max(params["mode_a"], params["mode_b"])
    spec = fock.OpticalInputSpec(params["mode_a"], params["mode_b"], n_max)
    space = fock.TwoModeFockSpace(n_max)

    def cell(theta):
        jz_out, jx_in, jz_in = fock.mz_mean_output(space, spec, theta)
        formula = jz_in * math.cos(theta) - jx_in * math.sin(theta)
        return [theta, jz_in, jx_in, jz_out, formula, abs(jz_out - formula)]

    rows = _parallel_map(cell, params["theta_values"], threads)
    cols = [
        Column("theta", "real"),
        Column("jz_in", "real"),
        Column("jx_in", "real"),
        Column("jz_out", "real"),
        Column("jz_formula", "real"),
        Column("identity_gap", "real"),
    ]
    table = ResultTable(columns=cols, rows=rows)
    table.metadata["n_max"] = n_max
    return table


def _execute_mz_cascade(params: dict, threads: int) -> ResultTable:
    n_max = params["n_max"] or fock.auto_n_max(params["mode_a"], params["mode_b"])
    spec = fock.OpticalInputSpec(params["mode_a"], params["mode_b"], n_max)
    space = fock.TwoModeFockSpace(n_max)

    def config(m: int) -> casc.CascadeConfig:
        return casc.CascadeConfig(
            topology=params["topology"],
            total_phase=params["theta"],
            stages=m,
            input=spec,
            fresh_a=params["fresh_a"],
            zeno_epsilon=params["epsilon"],
            leak_tol=params["leak_tol"],
            postselect_vacuum=params["postselect_vacuum"],
        )

    def cell(m):
        if params["topology"] == casc.CONNECTED:
            rep = casc.run_connected(config(m), space=space)
        else:
            rep = casc.run_zeno_cut(config(m), space=space)
        return [
            m,
            rep.jz_input,
            rep.jz_final,
            rep.deviation,
            rep.state_deviation,
            rep.zeno_deviation,
            rep.zeno_achieved,
        ]

    rows = _parallel_map(cell, params["m_values"], threads)
    cols = [
        Column("m", "int"),
        Column("jz_input", "real"),
        Column("jz_final", "real"),
        Column("deviation", "real"),
        Column("state_deviation", "real"),
        Column("zeno_deviation", "real"),
        Column("zeno_achieved", "bool"),
    ]
    table = ResultTable(columns=cols, rows=rows)
    table.metadata["n_max"] = n_max
    if params["topology"] == casc.ZENO_CUT:
        if params["refine"]:
            result = casc.zeno_threshold_scan(
                config(1), params["m_values"], refine=True, space=space
            )
            m_star = result.m_star
        else:
            m_star = next((r[0] for r in rows if r[6]), None)
        table.metadata["m_star"] = m_star if m_star is not None else "none"
    return table


_EXECUTORS = {
    "zeno-qubit": _execute_zeno_qubit,
    "zeno-custom": _execute_zeno_custom,
    "fisher-scan": _execute_fisher_scan,
    "estimate-demo": _execute_estimate_demo,
    "mz-single": _execute_mz_single,
    "mz-cascade": _execute_mz_cascade,
}


def execute(
    scenario: ScenarioFile, threads: int = 1, reproducible: bool = False
) -> ResultTable:
    """Run a validated scenario and return the populated ResultTable."""
    table = _EXECUTORS[scenario.kind](scenario.params, threads)
    meta = {
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "kind": scenario.kind,
        "scenario_hash": scenario.source_hash,
    }
    if not reproducible:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    meta.update(table.metadata)
    table.metadata = meta
    return table


# ---------------------------------------------------------------------------
# emission

def _format_real(x: float) -> str:
    return f"{float(x):.17g}"


def _json_scalar(value, dtype: str) -> str:
    if dtype == "real":
        v = float(value)
        return "null" if not math.isfinite(v) else _format_real(v)
    if dtype == "int":
        return str(int(value))
    if dtype == "bool":
        return "true" if value else "false"
    return json.dumps(str(value))


def _json_meta_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "null" if not math.isfinite(value) else _format_real(value)
    return json.dumps(str(value))


def render_json(table: ResultTable) -> str:
    """Hand-rolled writer so reals carry exactly 17 significant digits."""
    meta = ",".join(
        f"{json.dumps(k)}: {_json_meta_value(v)}" for k, v in table.metadata.items()
    )
    cols = ",".join(
        f'{{"name": {json.dumps(c.name)}, "type": {json.dumps(c.dtype)}}}'
        for c in table.columns
    )
    row_strs = []
    for row in table.rows:
        cells = ",".join(
            _json_scalar(v, c.dtype) for v, c in zip(row, table.columns)
        )
        row_strs.append(f"[{cells}]")
    rows = ",".join(row_strs)
    return f'{{"metadata": {{{meta}}}, "columns": [{cols}], "rows": [{rows}]}}\n'


def render_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    for key, value in table.metadata.items():
        if isinstance(value, float):
            value = _format_real(value)
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c.name for c in table.columns])
    for row in table.rows:
        cells = []
        for value, col in zip(row, table.columns):
            if col.dtype == "real":
                cells.append(_format_real(float(value)))
            elif col.dtype == "bool":
                cells.append("true" if value else "false")
            else:
                cells.append(str(value))
        writer.writerow(cells)
    return buf.getvalue()


def emit(table: ResultTable, fmt: str, path: str | None) -> None:
    """Write the table as csv or json to path (or stdout when path is None)."""
    if fmt == "csv":
        text = render_csv(table)
    elif fmt == "json":
        text = render_json(table)
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    if path is None:
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def load_table(path: str) -> ResultTable:
    """Read back a table emitted by this module (JSON format)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    cols = [Column(c["name"], c["type"]) for c in data["columns"]]
    rows = []
    for raw in data["rows"]:
        row = []
        for value, col in zip(raw, cols):
            if col.dtype == "real":
                row.append(math.nan if value is None else float(value))
            else:
                row.append(value)
        rows.append(row)
    return ResultTable(columns=cols, rows=rows, metadata=data["metadata"])
