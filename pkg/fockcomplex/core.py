"""
Workbench class that orchestrates one command-line invocation.
Dispatches spectrum / verify / solve / moments, renders the report as JSON or CSV
and maps library exceptions onto exit statuses.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config import Config, RunConfig
from .dbar import box_eigenvalues, solve_partial_report, spectrum_table
from .errors import (
    ConfigError, DegreeError, FockError, NonConvergenceError, NonPositiveCertificateError,
    NotClosedError, WeightSpecError, WeylSyntaxError,
)
from .forms import PForm
from .general import DOperator, converge_canonical, solve_canonical_D, solve_canonical_Dstar
from .utils import dump_csv, dump_json, format_bytes, get_resource_info, read_json, write_output
from .verify import run_suite, spectrum_error
from .weighted import RadialPolyWeight, moment_rows, parse_weight

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_M_MAX = 4


@dataclass
class CommandReport:
    """Result of one command before rendering"""

    data: Dict[str, Any]
    passed: bool = True
    csv_header: List[str] = field(default_factory=list)
    csv_rows: List[Sequence[Any]] = field(default_factory=list)

    def render(self, output_format: str) -> str:
        if output_format == "csv":
            return dump_csv(self.csv_header, self.csv_rows)
        return dump_json(self.data)


def split_ops(text: Optional[str]) -> List[str]:
    """'d1^2, d2^2' -> ['d1^2', 'd2^2']"""
    if not text:
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


class Workbench:
    """Runs the batch commands against a loaded configuration"""

    def __init__(self, config: Optional[Config] = None):
        self.config = config if config is not None else Config()

    def _tolerance(self, run_config: RunConfig, key: str) -> float:
        if run_config.tolerance is not None:
            return run_config.tolerance
        return float(self.config.tolerances.get(key, 1e-8))

    # Commands

    def cmd_spectrum(self, run_config: RunConfig) -> CommandReport:
        n, p = run_config.n, run_config.p
        m_max = run_config.m_max if run_config.m_max is not None else DEFAULT_M_MAX
        table = spectrum_table(n, p, m_max)
        if p == 0:
            logger.warning("0 is an eigenvalue of box on functions; the Neumann operator does not exist for p = 0")
        data: Dict[str, Any] = table.to_json()
        data["m_max"] = m_max
        passed = True
        if run_config.check:
            cutoff = run_config.truncation if run_config.truncation is not None else m_max
            expected = spectrum_table(n, p, cutoff).eigenvalues
            numeric = box_eigenvalues(n, p, cutoff)
            error = spectrum_error(numeric, expected)
            tolerance = self._tolerance(run_config, "spectrum")
            passed = error < tolerance
            data["check"] = {"cutoff": cutoff, "size": len(numeric), "max_error": error,
                             "tolerance": tolerance, "passed": passed}
            logger.info(f"Spectrum cross-check on {len(numeric)} eigenvalues: max error {error:.3g}")
        return CommandReport(data, passed, ["eigenvalue", "multiplicity"], table.to_csv_rows())

    def cmd_verify(self, run_config: RunConfig) -> CommandReport:
        suite = run_config.suite
        common = {"degree": run_config.degree, "cases": run_config.cases, "seed": run_config.seed}
        p = run_config.p if run_config.p is not None else 1
        if suite in ("basic-estimate", "commutation"):
            n = run_config.n if run_config.n is not None else 2
            result = run_suite(suite, n=n, p=p, **common)
        elif suite == "energy-identity":
            D = DOperator.from_specs(run_config.ops, run_config.n)
            result = run_suite(suite, D=D, p=p, window=run_config.window, **common)
        else:
            weight = (parse_weight(run_config.weight, run_config.n) if run_config.weight
                      else RadialPolyWeight.gaussian(run_config.n or 1))
            result = run_suite(suite, weight=weight, p=p, method=run_config.method,
                               identity_tol=self._tolerance(run_config, "identity"),
                               torsion_tol=self._tolerance(run_config, "torsion"),
                               gaussian_tol=self._tolerance(run_config, "torsion_gaussian"),
                               **common)
        rows = [[case["case"], case["passed"]] for case in result.cases]
        return CommandReport(result.to_json(), result.passed, ["case", "passed"], rows)

    def _solution_path(self, run_config: RunConfig) -> Path:
        if run_config.solution_path:
            return Path(run_config.solution_path)
        source = Path(run_config.input_path)
        return source.with_name(f"{source.stem}.solution.json")

    def cmd_solve(self, run_config: RunConfig) -> CommandReport:
        data = read_json(run_config.input_path)
        rhs = PForm.from_json(data.get("form", data))
        window = run_config.truncation if run_config.truncation is not None else run_config.window
        tolerance = self._tolerance(run_config, "identity")

        if run_config.target == "dbar":
            report = solve_partial_report(rhs, run_config.truncation)
        else:
            D = DOperator.from_specs(run_config.ops, rhs.dim)
            direction = "D" if run_config.target == "d" else "Dstar"
            if D.homogeneous_degree is not None and rhs.exact:
                solver = solve_canonical_D if direction == "D" else solve_canonical_Dstar
                report = solver(D, rhs, window)
            else:
                report = converge_canonical(D, rhs, window, direction, tolerance,
                                            run_config.convergence_factor)

        target = self._solution_path(run_config)
        write_output(dump_json(report.solution), str(target))

        passed = (report.residual_norm <= tolerance and report.max_defect <= tolerance
                  and report.within_bound)
        payload = {"target": run_config.target, "input": run_config.input_path,
                   "solution_path": str(target), "passed": passed, **report.to_json()}
        logger.info(f"Solved {run_config.target}: residual {report.residual_norm:.3g}, "
                    f"ratio {report.norm_ratio:.6g} (bound {report.bound:.6g})")
        rows = [[key, payload[key]] for key in ("residual_norm", "max_orthogonality_defect",
                                                "norm_ratio", "bound", "within_bound", "exact")]
        return CommandReport(payload, passed, ["quantity", "value"], rows)

    def cmd_moments(self, run_config: RunConfig) -> CommandReport:
        weight = parse_weight(run_config.weight, run_config.n)
        rows = moment_rows(weight, run_config.k_max)
        tolerance = self._tolerance(run_config, "moment")
        passed = all(row["relative_error"] <= tolerance for row in rows)
        data = {"weight": weight.describe(), "k_max": run_config.k_max, "tolerance": tolerance,
                "passed": passed, "rows": rows}
        header = list(rows[0]) if rows else []
        return CommandReport(data, passed, header, [[row[key] for key in header] for row in rows])

    # Dispatch

    def execute(self, run_config: RunConfig) -> CommandReport:
        run_config.validate()
        handler = {
            "spectrum": self.cmd_spectrum,
            "verify": self.cmd_verify,
            "solve": self.cmd_solve,
            "moments": self.cmd_moments,
        }[run_config.command]
        return handler(run_config)

    def run(self, run_config: RunConfig) -> int:
        """Execute, write the report and return the exit status"""
        started = time.perf_counter()
        try:
            report = self.execute(run_config)
        except (ConfigError, WeylSyntaxError, WeightSpecError, DegreeError) as e:
            logger.error(str(e))
            return EXIT_USAGE
        except NotClosedError as e:
            logger.error(str(e))
            failure = {"error": "not-closed", "message": str(e), "residual_norm": e.residual_norm}
            if e.residual is not None:
                failure["residual"] = e.residual.to_json()
            write_output(dump_json(failure), run_config.output_path)
            return EXIT_FAILURE
        except (NonConvergenceError, NonPositiveCertificateError) as e:
            logger.error(str(e))
            failure = {"error": type(e).__name__, "message": str(e)}
            if isinstance(e, NonConvergenceError):
                failure["residual_history"] = e.history
            else:
                failure["lambda_min"] = e.lambda_min
            write_output(dump_json(failure), run_config.output_path)
            return EXIT_FAILURE
        except FockError as e:
            logger.error(f"{type(e).__name__}: {e}")
            return EXIT_FAILURE
        except (ValueError, KeyError, OSError) as e:
            logger.error(f"Invalid input: {e}")
            return EXIT_USAGE

        write_output(report.render(run_config.output_format), run_config.output_path)

        elapsed = time.perf_counter() - started
        resources = get_resource_info()
        memory = format_bytes(resources["rss_bytes"]) if "rss_bytes" in resources else "n/a"
        logger.info(f"{run_config.command} finished in {elapsed:.2f}s (rss {memory}), "
                    f"{'passed' if report.passed else 'FAILED'}")
        return EXIT_OK if report.passed else EXIT_FAILURE
