"""Verification suites: groups of reports built from one shared decomposition."""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .birkhoff import (
    decompose,
    locality_check,
    pure_pole_check,
    reconstruct_check,
    regularity_check,
)
from .characters import unit_mass
from .errors import CKRGError
from .hierarchy import (
    TimeVector,
    apply_times,
    flow_commutativity,
    hierarchy_residual,
    reduction_check,
)
from .hopf import hopf_reports
from .reports import FlowReport
from .rg import (
    baker_function,
    beta_function,
    beta_report,
    check_rg_equations,
    compute_M,
    epsilon_ode_check,
    evolve_unit_mass,
    pole_bound_report,
    recover_limits,
    scattering,
)
from .toy import build_character, covariance_check
from .trees import TreeAlgebra

__all__ = ["SUITES", "Workspace", "SuiteResult", "run_suites"]

SUITES = ("hopf", "birkhoff", "rg", "scattering", "recovery", "ode", "hierarchy")


def _shared(compute):
    """Compute-once property; the first caller fills the value under the workspace lock."""
    name = compute.__name__

    def getter(self):
        try:
            return self._cache[name]
        except KeyError:
            pass
        with self._lock:
            if name not in self._cache:
                self._cache[name] = compute(self)
            return self._cache[name]

    getter.__doc__ = compute.__doc__
    return property(getter)


class Workspace:
    """Lazily computed, shared inputs of every suite for one rule and degree cap.

    Attributes are filled under a lock so suites running on several threads
    compute each one once.
    """

    def __init__(self, rule, max_degree, eps_trunc, hierarchy_depth=3):
        self.rule = rule
        self.algebra = TreeAlgebra(max_degree)
        self.eps_trunc = eps_trunc
        self.times = TimeVector(hierarchy_depth)
        self._lock = threading.RLock()
        self._cache = {}

    @_shared
    def phi(self):
        return build_character(self.rule, self.algebra)

    @_shared
    def pair(self):
        return decompose(self.phi, self.eps_trunc)

    @_shared
    def beta(self):
        return beta_function(self.pair)

    @_shared
    def M(self):
        return compute_M(self.pair, self.beta, check_bound=False)

    @_shared
    def scattering_result(self):
        return scattering(self.pair, self.beta)

    @_shared
    def dressed_pair(self):
        return decompose(apply_times(unit_mass(self.phi), self.times), self.eps_trunc)

    @_shared
    def dressed_beta(self):
        return beta_function(self.dressed_pair)


@dataclass
class SuiteResult:
    name: str
    reports: list
    error: str | None = None

    @property
    def passed(self):
        return self.error is None and all(r.passed for r in self.reports)

    def to_json(self):
        out = {"suite": self.name, "pass": self.passed,
               "reports": [r.to_json() for r in self.reports]}
        if self.error:
            out["error"] = self.error
        return out


def _hopf(ws):
    return hopf_reports(ws.algebra)


def _birkhoff(ws):
    pair = ws.pair
    return [covariance_check(ws.phi), *reconstruct_check(pair), pure_pole_check(pair),
            locality_check(pair), regularity_check(pair)]


def _guarded(identity, compute):
    """Run ``compute``; an error becomes a failed report instead of sinking the suite."""
    try:
        return compute()
    except CKRGError as exc:
        return [FlowReport(identity, error=f"{type(exc).__name__}: {exc}")]


def _rg(ws):
    return [beta_report(ws.beta), *check_rg_equations(ws.pair, ws.beta),
            *_guarded("unit_mass_evolution", lambda: evolve_unit_mass(ws.pair, ws.beta))]


def _scattering(ws):
    return ws.scattering_result[0]


def _recovery(ws):
    return _guarded("recover_limits", lambda: recover_limits(ws.pair))


def _ode(ws):
    return [pole_bound_report(ws.pair, ws.M), *epsilon_ode_check(ws.pair, ws.beta, ws.M),
            *baker_function(ws.pair, ws.beta, ws.M)]


def _hierarchy(ws):
    reports = hierarchy_residual(ws.dressed_pair, ws.dressed_beta, ws.times)
    if ws.times.depth >= 2:
        reports.append(flow_commutativity(ws.dressed_pair, ws.times))
    reports += reduction_check(ws.dressed_pair, ws.pair, ws.dressed_beta, ws.beta, ws.times)
    return reports


_RUNNERS = {
    "hopf": _hopf,
    "birkhoff": _birkhoff,
    "rg": _rg,
    "scattering": _scattering,
    "recovery": _recovery,
    "ode": _ode,
    "hierarchy": _hierarchy,
}


def _run_one(ws, name):
    try:
        return SuiteResult(name, _RUNNERS[name](ws))
    except CKRGError as exc:
        return SuiteResult(name, [], f"{type(exc).__name__}: {exc}")


def run_suites(ws, names, threads=1):
    """Run the named suites; results come back in the order requested."""
    names = list(names)
    if threads <= 1 or len(names) <= 1:
        return [_run_one(ws, n) for n in names]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda n: _run_one(ws, n), names))
