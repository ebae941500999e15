"""
Weighted Fock spaces for radial separable weights phi(z) = sum_j c_j |z_j|^(2 s_j).
Every integral reduces to the one-variable moments
    M_j(k) = int_0^inf r^(2k+1) exp(-c_j r^(2 s_j)) dr = Gamma((k+1)/s_j) / (2 s_j c_j^((k+1)/s_j)),
available in closed form or by adaptive quadrature as an independent check.
"""

import json
import logging
import math
import re
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

from scipy import integrate, special

from .dbar import partial
from .errors import DegreeError, DimensionMismatchError, WeightSpecError
from .forms import FormIndex, PForm, increasing_indices
from .polynomials import HoloPoly, MixedPoly, MultiIndex, sub_index, unit
from .scalars import to_complex

logger = logging.getLogger(__name__)

Polynomial = Union[HoloPoly, MixedPoly]


@dataclass(frozen=True)
class RadialPolyWeight:
    """phi(z) = sum_j c_j |z_j|^(2 s_j); params holds (c_j, s_j) per variable"""

    params: Tuple[Tuple[float, int], ...]

    def __post_init__(self):
        if not self.params:
            raise WeightSpecError("weight needs at least one variable")
        for j, (c, s) in enumerate(self.params):
            if not c > 0:
                raise WeightSpecError(f"c_{j + 1} must be positive, got {c}")
            if int(s) != s or s < 1:
                raise WeightSpecError(f"s_{j + 1} must be a positive integer, got {s}")

    @classmethod
    def gaussian(cls, n: int) -> 'RadialPolyWeight':
        return cls(tuple((1.0, 1) for _ in range(n)))

    @classmethod
    def uniform(cls, n: int, c: float, s: int) -> 'RadialPolyWeight':
        return cls(tuple((float(c), int(s)) for _ in range(n)))

    @property
    def dim(self) -> int:
        return len(self.params)

    @property
    def is_gaussian(self) -> bool:
        return all(c == 1 and s == 1 for c, s in self.params)

    def dphi_dzbar(self, j: int) -> MixedPoly:
        """d phi / d zbar_j = c s z_j^s zbar_j^(s-1)"""
        c, s = self.params[j]
        e = unit(self.dim, j)
        return MixedPoly(self.dim, {(tuple(s * x for x in e), tuple((s - 1) * x for x in e)): complex(c * s)})

    def levi(self, j: int, k: int) -> MixedPoly:
        """d^2 phi / d z_k d zbar_j; diagonal for separable weights"""
        if j != k:
            return MixedPoly(self.dim)
        c, s = self.params[j]
        e = tuple((s - 1) * x for x in unit(self.dim, j))
        return MixedPoly(self.dim, {(e, e): complex(c * s * s)})

    def describe(self) -> str:
        return " + ".join(f"{c:g}|z{j + 1}|^{2 * s}" for j, (c, s) in enumerate(self.params))

    def to_json(self) -> Dict[str, Any]:
        return {"weights": [{"c": c, "s": s} for c, s in self.params]}


_WEIGHT_TERM = re.compile(
    r"^\s*(?P<c>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?(?:/\d+)?)?\s*\*?\s*"
    r"\|\s*z(?P<index>\d*)\s*\|\s*\^\s*(?P<power>\d+)\s*$"
)


def _parse_coefficient(text: Optional[str]) -> float:
    if not text:
        return 1.0
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)


def parse_weight(text: str, n: Optional[int] = None) -> RadialPolyWeight:
    """Parse "1|z|^4", "2|z1|^2 + 1|z2|^4" or {"weights": [{"c": 1, "s": 2}, ...]}"""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
            params = tuple((float(item["c"]), int(item["s"])) for item in data["weights"])
        except (ValueError, KeyError, TypeError) as e:
            raise WeightSpecError(f"invalid weight JSON: {e}") from e
        weight = RadialPolyWeight(params)
    else:
        weight = _parse_weight_terms(text, n)
    if n is not None and weight.dim != n:
        raise WeightSpecError(f"weight has {weight.dim} variables, expected {n}")
    return weight


def _parse_weight_terms(text: str, n: Optional[int]) -> RadialPolyWeight:
    indexed: Dict[int, Tuple[float, int]] = {}
    plain: List[Tuple[float, int]] = []
    for piece in text.split("+"):
        match = _WEIGHT_TERM.match(piece)
        if not match:
            raise WeightSpecError(f"cannot parse weight term {piece.strip()!r}")
        c = _parse_coefficient(match.group("c"))
        power = int(match.group("power"))
        if power < 2 or power % 2:
            raise WeightSpecError(f"exponent must be a positive even integer, got {power}")
        if match.group("index"):
            j = int(match.group("index"))
            if j < 1:
                raise WeightSpecError("variable indices start at 1")
            if j in indexed:
                raise WeightSpecError(f"variable z{j} appears twice")
            indexed[j] = (c, power // 2)
        else:
            plain.append((c, power // 2))
    if plain and indexed:
        raise WeightSpecError("cannot mix |z| with indexed |zj| terms")
    if plain:
        if len(plain) > 1:
            raise WeightSpecError("only one |z| term is allowed")
        c, s = plain[0]
        dim = n or 1
        if dim > 1 and s != 1:
            raise WeightSpecError(f"|z|^{2 * s} is not separable for n={dim}; write one |zj| term per variable")
        return RadialPolyWeight.uniform(dim, c, s)
    dim = max(indexed)
    missing = [j for j in range(1, dim + 1) if j not in indexed]
    if missing:
        raise WeightSpecError(f"no weight term for variable(s) {missing}")
    return RadialPolyWeight(tuple(indexed[j] for j in range(1, dim + 1)))


class MomentTable:
    """Memoized one-variable moments M_j(k) for a weight"""

    METHODS = ("closed", "quadrature")

    def __init__(self, weight: RadialPolyWeight, method: str = "closed"):
        if method not in self.METHODS:
            raise ValueError(f"unknown moment method {method!r}, expected one of {self.METHODS}")
        self.weight = weight
        self.method = method
        self._cache: Dict[Tuple[int, int], float] = {}

    def moment(self, j: int, k: int) -> float:
        key = (j, k)
        if key not in self._cache:
            c, s = self.weight.params[j]
            if self.method == "closed":
                self._cache[key] = closed_moment(c, s, k)
            else:
                self._cache[key] = quadrature_moment(c, s, k)
        return self._cache[key]

    def monomial_norm_sq(self, alpha: MultiIndex) -> float:
        """|z^alpha|_phi^2 = prod_j 2 pi M_j(alpha_j)"""
        return math.prod(2 * math.pi * self.moment(j, a) for j, a in enumerate(alpha))


def closed_moment(c: float, s: int, k: int) -> float:
    t = (k + 1) / s
    return math.exp(special.gammaln(t) - math.log(2 * s) - t * math.log(c))


def quadrature_moment(c: float, s: int, k: int) -> float:
    """Adaptive quadrature, split at the peak of the integrand"""
    def integrand(r):
        if r <= 0:
            return 0.0
        log_r = math.log(r)
        if 2 * s * log_r > 700:
            return 0.0
        return math.exp((2 * k + 1) * log_r - c * math.exp(2 * s * log_r))

    peak = ((2 * k + 1) / (2 * c * s)) ** (1 / (2 * s))
    head = integrate.quad(integrand, 0, peak, epsabs=0, epsrel=1e-13, limit=200)[0]
    tail = integrate.quad(integrand, peak, math.inf, epsabs=0, epsrel=1e-13, limit=200)[0]
    return head + tail


def _as_mixed(f: Polynomial) -> MixedPoly:
    return MixedPoly.from_holo(f) if isinstance(f, HoloPoly) else f


def _table(weight: RadialPolyWeight, table: Optional[MomentTable]) -> MomentTable:
    return table if table is not None else MomentTable(weight)


def inner_weighted(f: Polynomial, g: Polynomial, weight: RadialPolyWeight,
                   table: Optional[MomentTable] = None) -> complex:
    """int f conj(g) exp(-phi); (z^a zbar^b, z^c zbar^d) needs a + d = b + c componentwise"""
    f, g = _as_mixed(f), _as_mixed(g)
    if f.dim != g.dim:
        raise DimensionMismatchError(f.dim, g.dim, "polynomials")
    if f.dim != weight.dim:
        raise DimensionMismatchError(f.dim, weight.dim, "polynomial and weight")
    table = _table(weight, table)
    total = 0j
    for (alpha, beta), c in f.terms.items():
        for (gamma, delta), d in g.terms.items():
            value = 1.0
            for j in range(f.dim):
                k = alpha[j] + delta[j]
                if k != beta[j] + gamma[j]:
                    value = 0.0
                    break
                value *= 2 * math.pi * table.moment(j, k)
            if value:
                total += to_complex(c) * to_complex(d).conjugate() * value
    return total


def norm_sq_weighted(f: Polynomial, weight: RadialPolyWeight,
                     table: Optional[MomentTable] = None) -> float:
    return inner_weighted(f, f, weight, table).real


def project_weighted(m: Polynomial, weight: RadialPolyWeight,
                     table: Optional[MomentTable] = None) -> HoloPoly:
    """Bergman projection: z^alpha zbar^beta -> prod_j M_j(alpha_j)/M_j(alpha_j - beta_j) z^(alpha-beta)"""
    m = _as_mixed(m)
    table = _table(weight, table)
    out: Dict[MultiIndex, complex] = {}
    for (alpha, beta), c in m.terms.items():
        gamma = sub_index(alpha, beta)
        if gamma is None:
            continue
        ratio = 1.0
        for j in range(m.dim):
            if beta[j]:
                ratio *= table.moment(j, alpha[j]) / table.moment(j, gamma[j])
        out[gamma] = out.get(gamma, 0j) + to_complex(c) * ratio
    return HoloPoly(m.dim, out)


def _require_form_weight(u: PForm, weight: RadialPolyWeight) -> None:
    if u.dim != weight.dim:
        raise DimensionMismatchError(u.dim, weight.dim, "form and weight")


def torsion_vectors(u: PForm, weight: RadialPolyWeight) -> Dict[FormIndex, List[MixedPoly]]:
    """v_{jK} = (d phi / d zbar_j) u_{jK} for every K and j"""
    out: Dict[FormIndex, List[MixedPoly]] = {}
    for K in increasing_indices(u.dim, u.degree - 1):
        out[K] = [weight.dphi_dzbar(j) * MixedPoly.from_holo(u.signed_component(j, K))
                  for j in range(u.dim)]
    return out


def partial_star_weighted(u: PForm, weight: RadialPolyWeight,
                          table: Optional[MomentTable] = None) -> PForm:
    """sum'_K sum_j P_phi((d phi / d zbar_j) u_{jK}) dz_K"""
    if u.degree == 0:
        raise DegreeError("partial_star is not defined on functions")
    _require_form_weight(u, weight)
    table = _table(weight, table)
    out = {}
    for K, vectors in torsion_vectors(u, weight).items():
        total = MixedPoly(u.dim)
        for v in vectors:
            total = total + v
        out[K] = project_weighted(total, weight, table)
    return PForm(u.dim, u.degree - 1, out)


def inner_forms_weighted(u: PForm, v: PForm, weight: RadialPolyWeight,
                         table: Optional[MomentTable] = None) -> complex:
    if u.degree != v.degree:
        raise DegreeError(f"cannot pair forms of degree {u.degree} and {v.degree}")
    table = _table(weight, table)
    return sum((inner_weighted(f, v.component(J), weight, table) for J, f in u.components.items()), 0j)


def form_norm_sq_weighted(u: PForm, weight: RadialPolyWeight,
                          table: Optional[MomentTable] = None) -> float:
    return inner_forms_weighted(u, u, weight, table).real


def weighted_adjoint_defect(f: PForm, u: PForm, weight: RadialPolyWeight,
                            table: Optional[MomentTable] = None) -> float:
    """|(d f, u)_phi - (f, d*_phi u)_phi| for f of degree p-1 and u of degree p"""
    table = _table(weight, table)
    left = inner_forms_weighted(partial(f), u, weight, table)
    right = inner_forms_weighted(f, partial_star_weighted(u, weight, table), weight, table)
    return abs(left - right)


@dataclass
class KohnMorreyReport:
    """lhs = derivative_term + levi_term - torsion, with torsion computed three ways"""

    lhs: float
    derivative_term: float
    levi_term: float
    torsion: float
    torsion_alt1: float
    torsion_alt2: float
    residual: float
    weight: str = ""
    method: str = "closed"

    @property
    def scale(self) -> float:
        return 1 + abs(self.lhs)

    def check(self, identity_tol: float = 1e-8, torsion_tol: float = 1e-9) -> List[str]:
        """Names of the violated relations; empty when the report is consistent"""
        failures = []
        if abs(self.residual) > identity_tol * self.scale:
            failures.append("residual")
        if self.torsion < -torsion_tol * self.scale:
            failures.append("torsion_sign")
        if abs(self.torsion - self.torsion_alt1) > torsion_tol * self.scale:
            failures.append("torsion_alt1")
        if abs(self.torsion - self.torsion_alt2) > identity_tol * self.scale:
            failures.append("torsion_alt2")
        return failures

    def to_json(self) -> Dict[str, Any]:
        data = asdict(self)
        data["scale"] = self.scale
        return data


def kohn_morrey_report(u: PForm, weight: RadialPolyWeight, method: str = "closed") -> KohnMorreyReport:
    """|du|^2 + |d*_phi u|^2 = sum |d u_J/d z_j|^2 + sum (phi_{k jbar} u_{jK}, u_{kK}) - torsion"""
    if u.degree == 0:
        raise DegreeError("Kohn-Morrey report needs a form of degree >= 1")
    _require_form_weight(u, weight)
    table = MomentTable(weight, method)

    lhs = form_norm_sq_weighted(partial_star_weighted(u, weight, table), weight, table)
    if u.degree < u.dim:
        lhs += form_norm_sq_weighted(partial(u), weight, table)

    derivative_term = sum(norm_sq_weighted(f.derivative(j), weight, table)
                          for f in u.components.values() for j in range(u.dim))

    levi_term = 0.0
    torsion = torsion_alt1 = torsion_alt2 = 0.0
    for K, vectors in torsion_vectors(u, weight).items():
        for j in range(u.dim):
            for k in range(u.dim):
                coefficient = weight.levi(j, k)
                if coefficient.is_zero():
                    continue
                u_jK = MixedPoly.from_holo(u.signed_component(j, K))
                u_kK = u.signed_component(k, K)
                levi_term += inner_weighted(coefficient * u_jK, u_kK, weight, table).real

        projected = [project_weighted(v, weight, table) for v in vectors]
        for v_j, pv_j in zip(vectors, projected):
            remainder = v_j - pv_j
            for v_k in vectors:
                torsion += inner_weighted(remainder, v_k, weight, table).real

        V = MixedPoly(u.dim)
        for v in vectors:
            V = V + v
        PV = project_weighted(V, weight, table)
        torsion_alt1 += norm_sq_weighted(V, weight, table) - norm_sq_weighted(PV, weight, table)
        torsion_alt2 += norm_sq_weighted(V - PV, weight, table)

    residual = lhs - (derivative_term + levi_term - torsion)
    report = KohnMorreyReport(lhs, derivative_term, levi_term, torsion, torsion_alt1, torsion_alt2,
                              residual, weight.describe(), method)
    logger.debug(f"Kohn-Morrey ({weight.describe()}, {method}): lhs={lhs:.12g} "
                 f"torsion={torsion:.12g} residual={residual:.3g}")
    return report


def formnorm_check(u: HoloPoly, k: int, weight: RadialPolyWeight,
                   table: Optional[MomentTable] = None) -> Tuple[float, float, float]:
    """(|du/dz_k|^2, |phi_kbar u|^2 - int phi_{k kbar} |u|^2 e^-phi, difference)"""
    table = _table(weight, table)
    lhs = norm_sq_weighted(u.derivative(k), weight, table)
    mixed = MixedPoly.from_holo(u)
    rhs = norm_sq_weighted(weight.dphi_dzbar(k) * mixed, weight, table) \
        - inner_weighted(weight.levi(k, k) * mixed, mixed, weight, table).real
    return lhs, rhs, lhs - rhs


def moment_rows(weight: RadialPolyWeight, k_max: int) -> List[Dict[str, Any]]:
    """Closed form against quadrature for every variable and k <= k_max"""
    closed = MomentTable(weight, "closed")
    quadrature = MomentTable(weight, "quadrature")
    rows = []
    for j, (c, s) in enumerate(weight.params):
        for k in range(k_max + 1):
            a, b = closed.moment(j, k), quadrature.moment(j, k)
            rows.append({"variable": j + 1, "c": c, "s": s, "k": k, "closed": a,
                         "quadrature": b, "relative_error": abs(a - b) / abs(a)})
    return rows
