"""Scenario files, built-in examples, randomized sweeps and their reports.

Scenario files are JSON. Complex numbers are ``[re, im]`` pairs and vectors
use the lexicographic basis of the declared dims. A scenario names a state
construction, a list of tasks, and parameters; running it yields a
:class:`Report` whose checks carry both sides of every inequality and the
tolerance used.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bounds import (
    GramMixingData,
    gram_mixing_check,
    lower_bounds,
    nonseparable_bound,
    nuclearity_upper,
    separable_bound,
    separable_decompose,
    triangle_check,
)
from .ensembles import (
    bell_pairs_vector,
    bell_with_fixed_middle_vector,
    correlated_pairs_vector,
    haar_vector,
    random_density,
    random_separable,
    random_symmetric_vector,
    symmetric_setup,
)
from .errors import MsplitError, ScenarioError
from .modular import SplitSetup, conjugation_factorization_check, intermediate_entropy, symmetric_purification
from .rotation import minimize_entropy, random_direction, stationarity_check
from .star_algebra import center, center_purity_check, factor_algebra
from .tensor_core import TensorSpace, check_density, embed, local_generators

TASKS = ("dl_entropy", "intermediate_entropy", "bounds", "stationarity", "minimize", "nuclearity", "center_purity", "factorization")
STATE_KINDS = ("explicit_vector", "product_purified", "random_symmetric", "explicit_density_14")
SWEEP_CHECKS = ("thm1", "thm2", "thm6", "thm7", "lemma13", "triangle")
ENTROPY_TOL = 1e-8
BOUND_TOL = 1e-8

DEFAULT_PARAMS = {
    "seed": 0,
    "directions": 20,
    "compatible_directions": False,
    "step": 1e-4,
    "budget": 4000,
    "restarts": 6,
    "intermediate_factors": [0, 1],
    "beta": 1.0,
    "allow_degenerate": True,
    "expected": {},
}


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def encode_complex(a) -> Any:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def decode_complex(obj, name: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{name}: expected nested [re, im] pairs") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ScenarioError(f"{name}: innermost entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class Check:
    name: str
    lhs: float
    relation: str
    rhs: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": fmt(self.lhs), "relation": self.relation, "rhs": fmt(self.rhs), "tol": self.tol, "passed": self.passed}


def check_le(name, lhs, rhs, tol) -> Check:
    return Check(name, float(lhs), "<=", float(rhs), tol, bool(lhs <= rhs + tol))


def check_ge(name, lhs, rhs, tol) -> Check:
    return Check(name, float(lhs), ">=", float(rhs), tol, bool(lhs >= rhs - tol))


def check_eq(name, lhs, rhs, tol) -> Check:
    return Check(name, float(lhs), "==", float(rhs), tol, bool(abs(lhs - rhs) <= tol))


def expectation_checks(name: str, value: float, target: dict | None) -> list[Check]:
    """Turn ``{"value", "tol"}``, ``{"max"}`` or ``{"min"}`` expectations into checks."""
    if not target:
        return []
    out = []
    if "value" in target:
        out.append(check_eq(f"{name} expected", value, target["value"], target.get("tol", ENTROPY_TOL)))
    if "max" in target:
        out.append(check_le(f"{name} upper target", value, target["max"], target.get("tol", 0.0)))
    if "min" in target:
        out.append(check_ge(f"{name} lower target", value, target["min"], target.get("tol", 0.0)))
    return out


@dataclass
class Report:
    name: str
    provenance: dict
    values: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "provenance": self.provenance,
            "values": {k: fmt(v) if isinstance(v, float) else v for k, v in self.values.items()},
            "checks": [c.to_dict() for c in self.checks],
            "notes": self.notes,
            "passed": self.passed,
        }

    def table(self) -> str:
        lines = [f"== {self.name}"]
        for k, v in self.values.items():
            lines.append(f"  {k:<32} {fmt(v) if isinstance(v, float) else v}")
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: {fmt(c.lhs)} {c.relation} {fmt(c.rhs)} (tol {c.tol:g})")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


@dataclass
class Scenario:
    name: str
    dims: tuple
    state: dict
    tasks: list
    params: dict

    @classmethod
    def from_dict(cls, raw: dict) -> "Scenario":
        if not isinstance(raw, dict):
            raise ScenarioError("scenario must be a JSON object")
        try:
            dims = tuple(int(d) for d in raw["dims"])
            state = dict(raw["state"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"scenario needs 'dims' and 'state': {exc}") from exc
        if len(dims) != 4 or any(d < 1 for d in dims):
            raise ScenarioError(f"dims must be four positive integers, got {dims}")
        if state.get("kind") not in STATE_KINDS:
            raise ScenarioError(f"state kind must be one of {STATE_KINDS}")
        tasks = list(raw.get("tasks", ["dl_entropy"]))
        bad = [t for t in tasks if t not in TASKS]
        if bad:
            raise ScenarioError(f"unknown tasks {bad}")
        params = {**DEFAULT_PARAMS, **raw.get("params", {})}
        return cls(str(raw.get("name", "scenario")), dims, state, tasks, params)

    def to_dict(self) -> dict:
        return {"name": self.name, "dims": list(self.dims), "state": self.state, "tasks": self.tasks, "params": self.params}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def build_setup(self) -> SplitSetup:
        """Validate the state description and return the split setup."""
        kind = self.state["kind"]
        dims = self.dims
        try:
            space = TensorSpace(dims)
            allow = bool(self.params["allow_degenerate"])
            if kind == "explicit_vector":
                amps = decode_complex(self.state.get("amplitudes"), "amplitudes").reshape(-1)
                if amps.shape[0] != space.total_dim:
                    raise ScenarioError(f"amplitude list has length {amps.shape[0]}, expected {space.total_dim}")
                nrm = np.linalg.norm(amps)
                if nrm == 0:
                    raise ScenarioError("zero amplitude vector")
                if abs(nrm - 1) > 1e-10 and not self.state.get("normalize", True):
                    raise ScenarioError("amplitudes are not normalized")
                return SplitSetup(space, amps / nrm, allow)
            if kind == "random_symmetric":
                if len(set(dims)) != 1:
                    raise ScenarioError("random_symmetric needs four equal dims")
                rng = np.random.default_rng(int(self.state.get("seed", 0)))
                return SplitSetup(space, random_symmetric_vector(dims[0], rng), allow)
            if dims[0] != dims[1] or dims[2] != dims[3]:
                raise ScenarioError("purified states need dims (d1, d1, d4, d4)")
            if kind == "product_purified":
                rho1 = check_density(decode_complex(self.state.get("rho1"), "rho1"), dims[0])
                rho4 = check_density(decode_complex(self.state.get("rho4"), "rho4"), dims[3])
                rho14 = np.kron(rho1, rho4)
            else:
                rho14 = check_density(decode_complex(self.state.get("rho14"), "rho14"), dims[0] * dims[3])
            return SplitSetup(space, symmetric_purification(rho14, dims[0], dims[3]), allow)
        except ScenarioError:
            raise
        except MsplitError as exc:
            raise ScenarioError(str(exc)) from exc


def load_scenario(path: str | Path) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return Scenario.from_dict(raw)


def vector_scenario(name: str, vec: np.ndarray, dims=(2, 2, 2, 2), tasks=("dl_entropy",), **params) -> Scenario:
    raw = {
        "name": name,
        "dims": list(dims),
        "state": {"kind": "explicit_vector", "amplitudes": encode_complex(vec)},
        "tasks": list(tasks),
        "params": params,
    }
    return Scenario.from_dict(raw)


LN2, LN4 = math.log(2), math.log(4)


def builtin_scenarios(seed: int = 0) -> dict[str, Scenario]:
    common = ("dl_entropy", "bounds", "stationarity", "minimize")
    return {
        "paper-4a": vector_scenario(
            "paper-4a",
            correlated_pairs_vector(),
            tasks=common,
            seed=seed,
            expected={"dl_entropy": {"value": LN2}, "s_min": {"value": LN2, "tol": 0.01}},
        ),
        "paper-4b": vector_scenario(
            "paper-4b",
            bell_pairs_vector(),
            tasks=common,
            seed=seed,
            expected={"dl_entropy": {"value": LN4}, "s_min": {"max": LN2 + 0.05}, "lower_bound_gap": {"value": 0.0}},
        ),
        "paper-4b-alt": vector_scenario(
            "paper-4b-alt",
            bell_with_fixed_middle_vector(),
            tasks=("intermediate_entropy", "dl_entropy", "bounds", "stationarity", "minimize"),
            seed=seed,
            expected={"intermediate_entropy": {"value": LN2}, "half_bound_gap": {"value": 0.0}},
        ),
    }


def _provenance(scn: Scenario) -> dict:
    return {"seed": int(scn.params["seed"]), "version": __version__, "scenario_sha256": scn.digest()}


def run_scenario(scn: Scenario) -> Report:
    """Execute the scenario's tasks; the intermediate algebra is built first."""
    setup = scn.build_setup()
    rep = Report(scn.name, _provenance(scn))
    p = scn.params
    exp = p.get("expected", {})
    d1, d4 = scn.dims[0], scn.dims[3]
    tasks = set(scn.tasks)

    s_dl = None
    if tasks & {"dl_entropy", "bounds", "stationarity", "minimize"}:
        s_dl = setup.dl_entropy()
        rep.values["dl_entropy"] = s_dl
        rep.values["cyclic_separating"] = setup.is_cyclic_separating()
        if not setup.is_cyclic_separating():
            rep.notes.append("vector is not cyclic and separating for groups 2, 3; conjugation built from completed Schmidt bases")
        rep.checks += expectation_checks("dl_entropy", s_dl, exp.get("dl_entropy"))

    s_int = None
    if "intermediate_entropy" in tasks:
        factors = [int(k) for k in p["intermediate_factors"]]
        s_int = intermediate_entropy(setup, factors)
        rep.values["intermediate_entropy"] = s_int
        rep.values["intermediate_factors"] = str(factors)
        rep.checks += expectation_checks("intermediate_entropy", s_int, exp.get("intermediate_entropy"))

    if "bounds" in tasks:
        rho14 = setup.rho14()
        lb = lower_bounds(rho14, d1, d4, s_dl, dl_exact=True, tol=BOUND_TOL)
        rep.values["relative_entropy_14"] = lb.relative_entropy
        rep.checks.append(check_ge("dl_entropy >= relative entropy", s_dl, lb.bound, BOUND_TOL))
        rep.values["lower_bound_gap"] = s_dl - lb.bound
        rep.checks += expectation_checks("lower_bound_gap", s_dl - lb.bound, exp.get("lower_bound_gap"))
        if s_int is not None:
            half = lower_bounds(rho14, d1, d4, s_int, dl_exact=False, tol=BOUND_TOL)
            rep.checks.append(check_ge("intermediate_entropy >= half relative entropy", s_int, half.bound, BOUND_TOL))
            rep.values["half_bound_gap"] = s_int - half.bound
            rep.checks += expectation_checks("half_bound_gap", s_int - half.bound, exp.get("half_bound_gap"))
        sep = separable_decompose(rho14, d1, d4, seed=int(p["seed"]))
        if sep is not None:
            ub = separable_bound(sep)
            rep.values["separable_terms"] = sep.n_terms
            rep.checks.append(check_le("dl_entropy <= separable bound (frame LP)", s_dl, ub, BOUND_TOL))
        else:
            dec = separable_decompose(rho14, d1, d4, mode="difference", seed=int(p["seed"]))
            rep.values["robustness_lambda_frame"] = dec.lam
            rep.checks.append(check_le("dl_entropy <= difference bound (frame LP)", s_dl, nonseparable_bound(dec), BOUND_TOL))

    if "stationarity" in tasks:
        rng = np.random.default_rng([int(p["seed"]), 7])
        dirs = [random_direction(setup, rng, bool(p["compatible_directions"])) for _ in range(int(p["directions"]))]
        st = stationarity_check(setup, dirs, step=float(p["step"]))
        rep.values["symmetry_defect"] = st.witness_defect
        rep.values["stationarity_status"] = st.status
        rep.values["max_scaled_derivative"] = st.max_ratio
        if st.premise_met:
            worst = max(st.results, key=lambda r: abs(r.derivative) / r.tolerance)
            rep.checks.append(check_le("worst |dS/dalpha| (scaled tolerance)", abs(worst.derivative), worst.tolerance, 0.0))
        else:
            rep.notes.append("exchange symmetry absent: stationarity premise unmet, not tested")

    if "minimize" in tasks:
        res = minimize_entropy(setup, budget=int(p["budget"]), seed=int(p["seed"]), restarts=int(p["restarts"]))
        rep.values["s_min"] = res.s_min
        rep.values["optimizer_evaluations"] = res.evaluations
        rep.values["optimizer_budget_exhausted"] = res.exhausted
        rep.checks.append(check_le("s_min <= dl_entropy", res.s_min, s_dl, 1e-12))
        rep.checks += expectation_checks("s_min", res.s_min, exp.get("s_min"))
        half = lower_bounds(setup.rho14(), d1, d4, res.s_min, dl_exact=False)
        rep.checks.append(check_ge("s_min >= half relative entropy", res.s_min, half.bound, BOUND_TOL))

    if "nuclearity" in tasks:
        space = setup.space
        h = sum(embed(local_generators(space.dims[k])[0], space, [k]) for k in range(4) if space.dims[k] > 1)
        a1 = factor_algebra(space, [0])
        beta = float(p["beta"])
        est = nuclearity_upper(h, beta, setup.omega, a1)
        est2 = nuclearity_upper(h, 2 * beta, setup.omega, a1)
        rep.values["nu_1"] = est.nu_1
        rep.values["nu_ln"] = est.nu_ln
        rep.values["nu_2"] = est.nu_p(2.0)
        rep.checks.append(check_le("nu_1(2 beta) <= nu_1(beta)", est2.nu_1, est.nu_1, 1e-12))

    if "center_purity" in tasks:
        a23 = factor_algebra(setup.space, [1, 2])
        cp = center_purity_check(setup.omega, center(a23))
        rep.values["center_23_max_weight"] = cp.max_central_weight
        cdl = center_purity_check(setup.omega, center(setup.dl_algebra))
        rep.values["center_dl_max_weight"] = cdl.max_central_weight
        rep.checks.append(check_ge("center of groups 2,3 weight", cp.max_central_weight, 1.0, 1e-8))

    if "factorization" in tasks:
        rep.values["conjugation_factorizes"] = conjugation_factorization_check(setup.pair)

    return rep


def run_counterexample(seed: int = 0) -> list[Report]:
    return [run_scenario(s) for s in builtin_scenarios(seed).values()]


# sweeps


def _sweep_trial(check: str, dims: tuple, rng) -> tuple[list[Check], dict]:
    d1, d4 = dims[0], dims[3]
    if check == "thm1":
        dec = random_separable(d1, d4, rng)
        setup = symmetric_setup(dec.state(), d1, d4)
        s = setup.dl_entropy()
        return [check_le("dl_entropy <= -4 sum nu^2 ln nu", s, separable_bound(dec), BOUND_TOL)], {"omega": setup.omega}
    if check == "thm2":
        rho = random_density(d1 * d4, rng, int(rng.integers(1, d1 * d4 + 1)))
        setup = symmetric_setup(rho, d1, d4)
        s = setup.dl_entropy()
        dec = separable_decompose(rho, d1, d4, mode="difference", seed=int(rng.integers(2**31)))
        return [check_le("dl_entropy <= -4 (lambda+1) sum nu_1^2 ln nu_1", s, nonseparable_bound(dec), BOUND_TOL)], {"omega": setup.omega}
    if check == "thm6":
        kind = rng.integers(3)
        if kind == 0:
            setup = symmetric_setup(random_separable(d1, d4, rng).state(), d1, d4)
        elif kind == 1:
            setup = symmetric_setup(random_density(d1 * d4, rng, int(rng.integers(1, d1 * d4 + 1))), d1, d4)
        else:
            if len(set(dims)) != 1:
                setup = symmetric_setup(random_density(d1 * d4, rng), d1, d4)
            else:
                setup = SplitSetup(TensorSpace(dims), random_symmetric_vector(d1, rng))
        s = setup.dl_entropy()
        lb = lower_bounds(setup.rho14(), d1, d4, s, dl_exact=True)
        return [check_ge("dl_entropy >= relative entropy", s, lb.bound, BOUND_TOL)], {"omega": setup.omega}
    if check == "thm7":
        if len(set(dims)) != 1:
            raise ScenarioError("thm7 sweep needs four equal dims")
        setup = SplitSetup(TensorSpace(dims), random_symmetric_vector(d1, rng))
        st = stationarity_check(setup, [random_direction(setup, rng, compatible=True) for _ in range(3)])
        out = [check_le("|dS/dalpha| (compatible direction)", abs(r.derivative), r.tolerance, 0.0) for r in st.results]
        return out, {"omega": setup.omega}
    if check == "lemma13":
        dim = int(rng.integers(4, 9))
        k = int(rng.integers(2, 7))
        vecs = np.array([haar_vector(dim, rng) for _ in range(k)])
        nus = np.sqrt(rng.dirichlet(np.ones(k)))
        res = gram_mixing_check(GramMixingData(nus, vecs))
        return [check_le("S(R) <= S(N^2)", res.S_R, res.S_N2, 1e-9)], {}
    if check == "triangle":
        tdims = tuple(int(x) for x in rng.integers(2, 4, size=3))
        n = int(np.prod(tdims))
        rho = random_density(n, rng, int(rng.integers(1, n + 1)))
        res = triangle_check(rho, tdims)
        return [check_ge("S(ABC) >= S(AB) - S(C)", res.S_total, res.S_ab - res.S_c, 1e-9)], {}
    raise ScenarioError(f"unknown check {check!r}")


@dataclass
class SweepResult:
    report: Report
    failures: list


def run_sweep_trial(check: str, dims: Sequence[int], trial_seed: int) -> tuple[list[Check], dict]:
    return _sweep_trial(check, tuple(dims), np.random.default_rng(trial_seed))


def run_sweep(dims: Sequence[int], trials: int, seed: int, checks: Sequence[str], reproducer_dir: str | Path | None = None) -> SweepResult:
    """Seeded property sweep; trial i of every check uses seed + i."""
    if trials < 1:
        raise ScenarioError("trials must be >= 1")
    dims = tuple(int(d) for d in dims)
    if len(dims) != 4:
        raise ScenarioError("dims must have four entries")
    bad = [c for c in checks if c not in SWEEP_CHECKS]
    if bad:
        raise ScenarioError(f"unknown checks {bad}")
    try:
        TensorSpace(dims)
    except MsplitError as exc:
        raise ScenarioError(str(exc)) from exc
    rep = Report("sweep", {"seed": seed, "version": __version__, "dims": list(dims), "trials": trials})
    failures = []
    for check in checks:
        passed = 0
        worst = None
        for i in range(trials):
            trial_seed = seed + i
            results, extra = run_sweep_trial(check, dims, trial_seed)
            ok = all(c.passed for c in results)
            passed += ok
            for c in results:
                margin = c.rhs - c.lhs if c.relation == "<=" else c.lhs - c.rhs
                if worst is None or margin < worst[0]:
                    worst = (margin, c)
            if not ok:
                failures.append(_write_reproducer(check, dims, trial_seed, results, extra, reproducer_dir))
        rep.values[f"{check} passed"] = f"{passed}/{trials}"
        if worst is not None:
            rep.values[f"{check} smallest margin"] = worst[0]
        rep.checks.append(Check(f"{check} pass rate", float(passed), "==", float(trials), 0.0, passed == trials))
    return SweepResult(rep, failures)


def _write_reproducer(check, dims, trial_seed, results, extra, directory) -> dict:
    blob = {
        "kind": "sweep_reproducer",
        "check": check,
        "dims": list(dims),
        "seed": trial_seed,
        "version": __version__,
        "checks": [c.to_dict() for c in results],
    }
    if "omega" in extra:
        blob["scenario"] = vector_scenario(f"{check}-seed{trial_seed}", extra["omega"], dims).to_dict()
    if directory is not None:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        out = path / f"repro_{check}_{trial_seed}.json"
        out.write_text(json.dumps(blob, indent=1))
        blob["path"] = str(out)
    return blob


def replay_reproducer(path: str | Path) -> list[Check]:
    try:
        blob = json.loads(Path(path).read_text())
        check, dims, seed = blob["check"], blob["dims"], int(blob["seed"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad reproducer {path}: {exc}") from exc
    results, _ = run_sweep_trial(check, dims, seed)
    return results
