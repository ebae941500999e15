"""
Seeded randomized invariant suites behind the `verify` command.
Each suite returns a SuiteResult with one JSON-ready entry per case; the exact
suites compare Gaussian rationals with ==, the weighted suite uses tolerances.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .config import VERIFY_SUITES
from .dbar import box, box_closed_form, basic_estimate_terms, neumann, partial, partial_star
from .fock import Scalar, as_float
from .forms import PForm, form_norm_sq, increasing_indices, inner_forms
from .general import DOperator, energy_identity, estimate_constant
from .polynomials import HoloPoly, enumerate_up_to
from .scalars import ExactScalar, qqi
from .weighted import RadialPolyWeight, kohn_morrey_report

logger = logging.getLogger(__name__)

SUITES = VERIFY_SUITES


@dataclass
class SuiteResult:
    suite: str
    seed: int
    cases: List[Dict[str, Any]] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(case["passed"] for case in self.cases)

    @property
    def failures(self) -> int:
        return sum(1 for case in self.cases if not case["passed"])

    def to_json(self) -> Dict[str, Any]:
        return {"suite": self.suite, "seed": self.seed, "parameters": self.parameters,
                "passed": self.passed, "failures": self.failures, "cases": self.cases}


def random_poly(rng: np.random.Generator, n: int, max_degree: int,
                density: float = 0.5, bound: int = 3) -> HoloPoly:
    """Sparse polynomial with small Gaussian-integer coefficients"""
    terms = {}
    for alpha in enumerate_up_to(n, max_degree):
        if rng.random() < density:
            re, im = (int(x) for x in rng.integers(-bound, bound + 1, size=2))
            terms[alpha] = qqi(re, im)
    return HoloPoly(n, terms)


def random_form(rng: np.random.Generator, n: int, p: int, max_degree: int,
                density: float = 0.5) -> PForm:
    return PForm(n, p, {J: random_poly(rng, n, max_degree, density) for J in increasing_indices(n, p)})


def _text(value: Scalar) -> Any:
    if isinstance(value, ExactScalar):
        return value.format()
    return as_float(value)


def _nonzero_form(rng: np.random.Generator, n: int, p: int, degree: int) -> PForm:
    u = random_form(rng, n, p, degree)
    while u.is_zero():
        u = random_form(rng, n, p, degree)
    return u


def basic_estimate_suite(n: int, p: int, degree: int, cases: int, seed: int) -> SuiteResult:
    """Derivative decomposition and p|u|^2 <= |du|^2 + |d*u|^2, exact"""
    rng = np.random.default_rng(seed)
    result = SuiteResult("basic-estimate", seed, parameters={"n": n, "p": p, "degree": degree})
    for index in range(cases):
        u = _nonzero_form(rng, n, p, degree)
        lhs, derivative_term, p_norm = basic_estimate_terms(u)
        residual = lhs - (derivative_term + p_norm)
        estimate = p_norm <= lhs
        entry = {"case": index, "lhs": _text(lhs), "derivative_term": _text(derivative_term),
                 "p_norm_sq": _text(p_norm), "identity_exact": residual.is_zero(),
                 "estimate": estimate}
        if p >= 1:
            contraction = form_norm_sq(neumann(u)) * (p * p) <= form_norm_sq(u)
            entry["neumann_contraction"] = contraction
            estimate = estimate and contraction
        entry["passed"] = residual.is_zero() and estimate
        result.cases.append(entry)
    return result


def commutation_suite(n: int, p: int, degree: int, cases: int, seed: int) -> SuiteResult:
    """Complex property, adjointness, box closed form, box/neumann inverses and commutation"""
    rng = np.random.default_rng(seed)
    result = SuiteResult("commutation", seed, parameters={"n": n, "p": p, "degree": degree})
    for index in range(cases):
        u = _nonzero_form(rng, n, p, degree)
        checks: Dict[str, bool] = {"box_closed_form": box(u) == box_closed_form(u)}
        if p < n:
            v = random_form(rng, n, p + 1, degree)
            checks["adjoint"] = inner_forms(partial(u), v) == inner_forms(u, partial_star(v))
            if p + 1 < n:
                checks["partial_squared"] = partial(partial(u)).is_zero()
            if p >= 1:
                checks["neumann_partial"] = neumann(partial(u)) == partial(neumann(u))
        if p >= 2:
            checks["partial_star_squared"] = partial_star(partial_star(u)).is_zero()
            checks["neumann_partial_star"] = neumann(partial_star(u)) == partial_star(neumann(u))
        if p >= 1:
            checks["box_neumann"] = box(neumann(u)) == u
            checks["neumann_box"] = neumann(box(u)) == u
        result.cases.append({"case": index, **checks, "passed": all(checks.values())})
    return result


def energy_identity_suite(D: DOperator, p: int, degree: int, cases: int, seed: int,
                          window: Optional[int] = None) -> SuiteResult:
    """|Du|^2 + |D*u|^2 = sum |p_k u_J|^2 + commutator form, exact; plus the certificate"""
    rng = np.random.default_rng(seed)
    parameters: Dict[str, Any] = {"operator": D.to_json()["p"], "n": D.dim, "p": p, "degree": degree}
    result = SuiteResult("energy-identity", seed, parameters=parameters)
    if window is not None:
        certificate = estimate_constant(D, p, window)
        parameters["certificate"] = certificate.to_json()
    for index in range(cases):
        u = _nonzero_form(rng, D.dim, p, degree)
        lhs, derivative_term, commutator_term = energy_identity(D, u)
        residual = lhs - (derivative_term + commutator_term)
        result.cases.append({"case": index, "lhs": _text(lhs),
                             "derivative_term": _text(derivative_term),
                             "commutator_term": _text(commutator_term),
                             "passed": residual.is_zero()})
    return result


def kohn_morrey_suite(weight: RadialPolyWeight, p: int, degree: int, cases: int, seed: int,
                      identity_tol: float = 1e-8, torsion_tol: float = 1e-9,
                      gaussian_tol: float = 1e-10, method: str = "closed") -> SuiteResult:
    """The fixed case u = dz_1 ^ ... ^ dz_p first, then seeded random forms"""
    rng = np.random.default_rng(seed)
    n = weight.dim
    result = SuiteResult("kohn-morrey", seed, parameters={
        "weight": weight.describe(), "n": n, "p": p, "degree": degree, "method": method})
    forms = [PForm.basis(n, tuple(range(p)), (0,) * n)]
    forms.extend(random_form(rng, n, p, degree) for _ in range(cases))
    for index, u in enumerate(forms):
        report = kohn_morrey_report(u, weight, method)
        failures = report.check(identity_tol, torsion_tol)
        entry = {"case": index, **report.to_json(), "failed_checks": failures, "passed": not failures}
        if weight.is_gaussian:
            gaussian_ok = abs(report.torsion) <= gaussian_tol * report.scale
            entry["torsion_vanishes"] = gaussian_ok
            entry["passed"] = entry["passed"] and gaussian_ok
        result.cases.append(entry)
    return result


SuiteRunner = Callable[..., SuiteResult]


def run_suite(name: str, **kwargs: Any) -> SuiteResult:
    runners: Dict[str, SuiteRunner] = {
        "basic-estimate": basic_estimate_suite,
        "kohn-morrey": kohn_morrey_suite,
        "energy-identity": energy_identity_suite,
        "commutation": commutation_suite,
    }
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}, expected one of {', '.join(SUITES)}")
    result = runners[name](**kwargs)
    logger.info(f"Suite {name}: {len(result.cases)} cases, {result.failures} failures")
    return result


def spectrum_error(eigenvalues: np.ndarray, expected: List[int]) -> float:
    """Largest deviation between sorted numeric and analytic eigenvalues"""
    if len(eigenvalues) != len(expected):
        return math.inf
    return float(np.max(np.abs(np.sort(eigenvalues) - np.array(sorted(expected))), initial=0.0))
