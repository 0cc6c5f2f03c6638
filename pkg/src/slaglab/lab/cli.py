"""``slag-lab`` command line.

Usage::

    slag-lab <scenario> [--config FILE] [--set key=value]... [--out DIR]

Scenarios: ``annulus``, ``expcos``, ``maximality``, ``sweep:<suite>``,
``solve:<poisson|ma|family>``, ``transform``.  Exit codes: 0 all checks
pass, 2 a check failed, 3 precondition or parameter error, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from ..errors import ConvergenceError, DomainError, PreconditionError
from ..grids import GridDomain, ScalarFieldGrid, read_grid, write_grid
from ..metric_planes import metric_constants
from ..solvers import BoundaryData, SolverConfig, solve_family, solve_monge_ampere, solve_poisson
from .config import Param, load_config, parse_overrides
from .expr import evaluate
from .report import ExperimentReport
from .scenarios import (
    run_counterexample_annulus,
    run_expcos_example,
    run_maximality_test,
    run_property_sweeps,
    run_transform,
)
from .sweeps import SUITES

log = logging.getLogger("slaglab")

EXIT_OK, EXIT_CHECK, EXIT_PARAM, EXIT_INTERNAL = 0, 2, 3, 4

SWEEP_TRIALS = {"symdet": 100000, "calibration": 100000, "transform": 10000,
                "ct-identity": 10000, "limit-quarter-pi": 200}

GRID = {
    "bounds": Param("bounds", ((0.0, 1.0), (0.0, 1.0)), "box as lo:hi,lo:hi"),
    "resolution": Param("ints", (65, 65), "nodes per axis"),
}
SOLVER = {
    "bc": Param("optional_str", None, "boundary expression in x1, x2 (x3)"),
    "bc_file": Param("optional_str", None, "boundary grid file"),
    "exact": Param("optional_str", None, "expression to compare the solution with"),
    "initial_guess": Param("optional_str", None, "grid file or 'quadratic'"),
    "max_iter": Param("int", 50),
    "tol": Param("float", 1e-10),
    "k": Param("float", 0.0, "free constant available to expressions"),
}

SCHEMAS = {
    "annulus": {
        "eps": Param("float", 0.01),
        "eta_amplitude": Param("float", 0.01),
        "resolution": Param("int", 256),
        "subsamples": Param("int", 4),
    },
    "expcos": {
        "t": Param("float", math.atan(0.5)),
        "k": Param("float", 50.0),
        "bounds": Param("bounds", ((0.1, 3.0), (0.0, 2 * math.pi))),
        "resolution": Param("ints", (65, 129)),
        "refinements": Param("int", 3),
        "expect_witness": Param("optional_bool", None),
    },
    "maximality": {
        "c": Param("float", 1.0),
        "num_perturbations": Param("int", 100),
        "seed": Param("int", 0),
        "resolution": Param("int", 128),
        "amplitude": Param("float", 0.3),
        "potential_file": Param("optional_str", None),
    },
    "sweep": {"trials": Param("optional_str", None), "seed": Param("int", 0)},
    "solve:poisson": {**GRID, **SOLVER, "a": Param("float", 1.0)},
    "solve:ma": {**GRID, **SOLVER, "c": Param("float", 1.0)},
    "solve:family": {**GRID, **SOLVER, "t": Param("float", math.pi / 2), "c": Param("float", 0.0)},
    "transform": {**GRID, "t": Param("float", math.atan(0.5)), "k": Param("float", 0.0),
                  "potential": Param("optional_str", None), "potential_file": Param("optional_str", None),
                  "hat_shrink": Param("float", 0.9)},
}


def _names(params, domain):
    names = {key: val for key, val in params.items() if isinstance(val, (int, float)) and not isinstance(val, bool)}
    if "t" in params:
        mc = metric_constants(params["t"])
        names.update({"a_t": mc.a, "b_t": mc.b, "sigma": mc.sigma, "tau": mc.tau})
    coords = domain.mesh()
    for i, x in enumerate(coords):
        names[f"x{i + 1}"] = x
    names.update(dict(zip("xyz", coords)))
    return names


def _field(expr, params, domain):
    return np.broadcast_to(evaluate(expr, _names(params, domain)), domain.resolution).astype(float)


def _boundary(params, domain):
    if params["bc_file"]:
        bc = BoundaryData.from_file(params["bc_file"])
        if bc.domain != domain:
            raise DomainError("boundary file grid differs from bounds/resolution")
        return bc
    if not params["bc"]:
        raise DomainError("give bc (expression) or bc_file")
    return BoundaryData(domain, _field(params["bc"], params, domain), f"expr:{params['bc']}")


def _solve(kind, params, out):
    domain = GridDomain(params["bounds"], params["resolution"])
    bc = _boundary(params, domain)
    rep = ExperimentReport(f"solve:{kind}", {k: v for k, v in params.items()})
    guess = params["initial_guess"]
    if guess not in (None, "quadratic"):
        guess = read_grid(guess)
    cfg = SolverConfig(max_iter=params["max_iter"], tol=params["tol"], initial_guess=guess)
    try:
        with rep.timed("solve"):
            if kind == "poisson":
                res = solve_poisson(domain, params["a"], bc)
            elif kind == "ma":
                res = solve_monge_ampere(domain, params["c"], bc, cfg)
            else:
                res = solve_family(domain, params["t"], params["c"], bc, cfg)
    except ConvergenceError as exc:
        rep.quantities.update({"residual": exc.residual, "history": exc.history, "error": str(exc)})
        rep.check("converged", False, True, 0.0, "oracle", "equal")
        rep.verdict = f"solver failed: {exc}"
        return rep
    rep.quantities.update(res.to_dict())
    tol = 1e-10 if kind == "poisson" else cfg.tol
    rep.check("residual", res.residual, 0.0, tol, "oracle", "max")
    if params["exact"]:
        err = float(np.max(np.abs(res.u.values - _field(params["exact"], params, domain))))
        rep.quantities["max_error_vs_exact"] = err
    if out is not None:
        write_grid(Path(out) / "solution.csv", res.u)
        rep.artifacts.append("solution.csv")
        rep.add_csv(out, "residual_history.csv", ["iteration", "residual"],
                    np.column_stack([np.arange(len(res.history)), res.history]))
    rep.verdict = f"converged in {res.iterations} iterations"
    return rep


def _transform(params, out):
    if params["potential_file"]:
        u = read_grid(params["potential_file"])
        if not isinstance(u, ScalarFieldGrid):
            raise DomainError("potential file must hold a scalar field")
    elif params["potential"]:
        domain = GridDomain(params["bounds"], params["resolution"])
        u = ScalarFieldGrid(domain, _field(params["potential"], params, domain))
    else:
        raise DomainError("give potential (expression) or potential_file")
    return run_transform(u, params["t"], out, params["hat_shrink"])


def run_scenario(scenario: str, params: dict, out=None) -> ExperimentReport:
    """Dispatch a scenario by name with already converted parameters."""
    if scenario == "annulus":
        return run_counterexample_annulus(params["eps"], params["eta_amplitude"],
                                          params["resolution"], params["subsamples"])
    if scenario == "expcos":
        return run_expcos_example(params["t"], params["k"], params["bounds"], params["resolution"],
                                params["refinements"], params["expect_witness"], out_dir=out)
    if scenario == "maximality":
        potential = read_grid(params["potential_file"]) if params["potential_file"] else None
        if potential is None:
            res = params["resolution"]
            domain = GridDomain.box([(0.0, 1.0), (0.0, 1.0)], res)
            c = params["c"]
            potential = ScalarFieldGrid.from_function(domain, lambda x, y: 0.5 * math.sqrt(c) * (x * x + y * y))
        return run_maximality_test(potential, params["c"], params["num_perturbations"], params["seed"],
                                   amplitude=params["amplitude"], out_dir=out)
    if scenario.startswith("sweep:"):
        suite = scenario.split(":", 1)[1]
        trials = params["trials"]
        trials = SWEEP_TRIALS.get(suite, 1000) if trials is None else int(trials)
        return run_property_sweeps(suite, trials, params["seed"])
    if scenario.startswith("solve:"):
        return _solve(scenario.split(":", 1)[1], params, out)
    if scenario == "transform":
        return _transform(params, out)
    raise DomainError(f"unknown scenario {scenario!r}")


def _schema(scenario):
    if scenario.startswith("sweep:"):
        suite = scenario.split(":", 1)[1]
        if suite not in SUITES:
            raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        return SCHEMAS["sweep"]
    if scenario not in SCHEMAS:
        raise DomainError(f"unknown scenario {scenario!r}")
    return SCHEMAS[scenario]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slag-lab",
        description="Run calibration, transform and solver experiments and write report.json.",
    )
    parser.add_argument("scenario", help="annulus | expcos | maximality | sweep:<suite> | "
                                         "solve:<poisson|ma|family> | transform")
    parser.add_argument("--config", type=Path, help="INI-style key = value file")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a parameter (repeatable)")
    parser.add_argument("--out", type=Path, default=None, help="output directory for report and artifacts")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.scenario, _schema(args.scenario), args.config, parse_overrides(args.overrides))
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
        report = run_scenario(args.scenario, cfg.params, args.out)
    except (DomainError, PreconditionError) as exc:
        print(f"slag-lab: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except Exception as exc:  # noqa: BLE001 - every other failure is internal
        log.debug("internal error", exc_info=True)
        print(f"slag-lab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.out is not None:
        path = report.write(args.out)
        log.info("wrote %s", path)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
