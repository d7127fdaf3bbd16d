"""Command-line front end: build models from JSON, run individual
computations, execute the full property suite, emit machine-readable
reports with figures rendered alongside.

Exit codes: 0 all checks pass, 1 a verified property fails, 2 bad input.
Report JSON payloads are deterministic for a fixed config; wall-clock data
goes to a separate metadata file.  NCPT_THREADS caps suite parallelism.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import plotting
from .algebra import HSVector, ModelError, operator_norm, validate_model
from .cdc import (DerivationCalculus, GammaCalculator, gamma_bound_check,
                  gamma_cross_check, gamma_potential_identity_check,
                  leibniz_report, symmetry_report)
from .deny import (DELTA_GRID, approx_potential_formula_check,
                   bounded_potential_bound_check, deny_embedding_check,
                   deny_inequality_check, deny_quadratic,
                   deny_saturation_check)
from .dirichlet import (build_generator, check_approx_form_monotonicity,
                        check_completely_dirichlet, check_markovian,
                        check_reality)
from .models import load_model_file
from .multipliers import (check_multiplier_bound, check_resolvent_multiplier,
                          multiplier_invariants_check, multiplier_norm,
                          potential_multiplier_bound)
from .potentials import (FiniteEnergyFunctional, check_derivative_identity,
                         check_positivity_of_potentials,
                         check_potential_equivalence,
                         check_resolvent_pushforward,
                         check_semigroup_domination, energy_content,
                         functional_from_pd_coeffs, interpolation_family,
                         is_potential, potential_of)
from .reports import CheckReport, write_csv

STATE_NAMES = ("trivial", "trace")


@dataclass
class SuiteConfig:
    """Everything one suite run depends on; round-trips through JSON."""

    model_path: str
    seed: int = 0
    trials: int = 200
    out_dir: str = "reports"
    tol: dict = field(default_factory=dict)
    grid_t: tuple = (0.1, 1.0, 10.0)
    grid_eps: tuple = (1.0, 0.1, 0.01)
    grid_delta: tuple = DELTA_GRID
    grid_lambda: tuple = (1.0, 10.0, 1000.0)

    def __post_init__(self):
        self.tol = dict(self.tol)
        for name in ("grid_t", "grid_eps", "grid_delta", "grid_lambda"):
            setattr(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if any(v <= 0 for v in self.tol.values()):
            raise ValueError("tolerance overrides must be positive")
        if not all(g > 0 for grid in (self.grid_t, self.grid_eps,
                                      self.grid_delta, self.grid_lambda)
                   for g in grid):
            raise ValueError("grid values must be positive")

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tol.get(name, default))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SuiteConfig":
        return cls(**json.loads(text))


def derived_seed(master: int, name: str) -> int:
    digest = hashlib.blake2b(f"{master}:{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") % (2 ** 63)


def shipped_state(model, gen, name: str) -> FiniteEnergyFunctional:
    """The two shipped finite-energy states of a group model.

    ``trace`` is tau itself.  ``trivial`` is the vector state of the
    normalized constant vector in the left regular representation; on an
    untwisted group this is exactly the trivial-character state phi = 1,
    and it stays a state under any twist.
    """
    if name == "trace":
        return FiniteEnergyFunctional(model.unit)
    if name == "trivial":
        v = np.ones(model.rep_dim) / np.sqrt(model.rep_dim)
        phi = np.einsum("a,iab,b->i", v, model.rep, v)
        return functional_from_pd_coeffs(model, gen, phi)
    raise ValueError(f"unknown state {name!r}; choose from {STATE_NAMES}")


# -- subcommands ---------------------------------------------------------


def cmd_model_info(args) -> int:
    spec, model, ell, cocycle = load_model_file(args.model)
    stats = validate_model(model)
    print(f"model: {args.model}")
    print(f"dimension: {model.dim} (orders {list(spec.orders)})")
    if spec.is_twisted:
        print(f"twist: ({spec.twist[0]}, {spec.twist[1]})")
    print(f"trace weights: {np.real_if_close(model.trace_vec).tolist()}")
    print(f"tau(1) = {stats['tau_unit']:.6g}")
    print("length table:")
    for lab, v in zip(model.labels, ell.values):
        print(f"  ({lab})  ell = {v:.12g}")
    cnd = ell.cnd_report()
    print(f"symmetric: {ell.is_symmetric()}")
    print(f"conditionally negative definite: {'yes' if cnd['pass'] else 'NO'} "
          f"(max Fourier negativity {cnd['max_negativity']:.3e})")
    print(f"cocycle: {'dimension ' + str(cocycle.rep_dim) if cocycle else 'none'}")
    return 0


def cmd_potential(args) -> int:
    spec, model, ell, _ = load_model_file(args.model)
    gen = build_generator(model, ell)
    if args.phi is not None:
        phi = np.array([float(v) for v in args.phi.split(",")])
        omega = functional_from_pd_coeffs(model, gen, phi)
    else:
        omega = shipped_state(model, gen, args.state)
    g = potential_of(gen, omega)
    ok, min_eig = is_potential(gen, g.vector)
    payload = {
        "potential_coefficients_real": g.vector.coeffs.real.tolist(),
        "potential_coefficients_imag": g.vector.coeffs.imag.tolist(),
        "energy_content": energy_content(gen, omega),
        "multiplier_norm": operator_norm(g.vector),
        "is_potential": bool(ok),
        "certificate_min_eigenvalue": min_eig,
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "potential.json").write_text(text + "\n")
        rows = [[lab, float(c.real), float(c.imag)]
                for lab, c in zip(model.labels, g.vector.coeffs)]
        write_csv(out / "potential.csv", ["element", "re", "im"], rows)
    else:
        print(text)
    return 0


def _deny_reports(gen, model, config: SuiteConfig):
    reports = []
    for name in STATE_NAMES:
        omega = shipped_state(model, gen, name)
        seed = derived_seed(config.seed, f"deny_{name}")
        rep = deny_embedding_check(gen, omega, config.trials, seed,
                                   config.tolerance("deny_embedding", 1e-9))
        rep.property = f"deny_embedding_{name}"
        reports.append(rep)
        rng = np.random.default_rng([seed, 1])
        b = model.random_element(rng)
        rep = deny_inequality_check(gen, omega, b, config.grid_delta,
                                    config.tolerance("deny_inequality", 1e-9))
        rep.property = f"deny_inequality_{name}"
        reports.append(rep)
        rep = deny_saturation_check(gen, omega, config.grid_delta,
                                    config.tolerance("deny_saturation", 1e-6))
        rep.property = f"deny_saturation_{name}"
        reports.append(rep)
    return reports


def cmd_deny(args, config: SuiteConfig) -> int:
    spec, model, ell, _ = load_model_file(config.model_path)
    gen = build_generator(model, ell)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = _deny_reports(gen, model, config)
    rows = []
    for rep in reports:
        rep.details.pop("csv_rows", None)
        rep.write(out)
        rows.append([rep.property, rep.samples, float(rep.max_violation),
                     rep.passed])
    write_csv(out / "deny_summary.csv",
              ["property", "samples", "max_violation", "pass"], rows)
    omega = shipped_state(model, gen, "trivial")
    g = potential_of(gen, omega).vector
    deltas = sorted(config.grid_delta, reverse=True)
    values = [deny_quadratic(gen, omega, g, d) for d in deltas]
    plotting.fig_deny_monotonicity(deltas, values, gen.graph_norm(g) ** 2,
                                   out / "deny_monotonicity.png")
    return _print_and_code(reports)


def cmd_gamma(args, config: SuiteConfig) -> int:
    spec, model, ell, cocycle = load_model_file(config.model_path)
    if cocycle is None:
        raise ValueError("model has no cocycle; gamma checks unavailable")
    gen = build_generator(model, ell)
    calc = DerivationCalculus(model, spec, cocycle)
    gamma_calc = GammaCalculator(gen)
    reports = [
        gamma_cross_check(gen, gamma_calc, calc, config.trials,
                          derived_seed(config.seed, "gamma_cross"),
                          config.tolerance("gamma_cross", 1e-9)),
        leibniz_report(calc, config.trials,
                       derived_seed(config.seed, "leibniz"),
                       config.tolerance("leibniz", 1e-10)),
        symmetry_report(calc, min(config.trials, 200),
                        derived_seed(config.seed, "symmetry"),
                        config.tolerance("symmetry", 1e-10)),
        gamma_potential_identity_check(gen, gamma_calc, config.trials,
                                       derived_seed(config.seed, "gamma_potential"),
                                       config.tolerance("gamma_potential", 1e-9)),
    ]
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        rep.write(out)
    return _print_and_code(reports)


def cmd_mult_norm(args, config: SuiteConfig) -> int:
    spec, model, ell, _ = load_model_file(config.model_path)
    gen = build_generator(model, ell)
    gamma_calc = GammaCalculator(gen)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    all_pass = True
    # Basis elements first, then random potentials.
    targets = [(f"basis:{lab}",
                HSVector(model, np.eye(model.dim, dtype=complex)[i]))
               for i, lab in enumerate(model.labels)]
    seed = derived_seed(config.seed, "mult_norm")
    for trial in range(min(config.trials, 20)):
        rng = np.random.default_rng([seed, trial])
        h = model.random_positive(rng)
        targets.append((f"potential:{trial}", gen.inverse_graph(h)))
    for name, g in targets:
        bound = potential_multiplier_bound(gen, gamma_calc, g)
        rep = multiplier_norm(gen, g, apriori_bound=bound)
        rows.append([name, rep.left_norm, rep.apriori_bound,
                     rep.apriori_bound - rep.left_norm])
        all_pass = all_pass and rep.passed
    write_csv(out / "multiplier_norms.csv",
              ["g", "left_norm", "apriori_bound", "margin"], rows)
    inv = multiplier_invariants_check(
        gen, min(config.trials, 100), derived_seed(config.seed, "mult_inv"),
        config.tolerance("multiplier_invariants", 1e-9))
    inv.write(out)
    all_pass = all_pass and inv.passed
    print(f"{'PASS' if all_pass else 'FAIL'} multiplier_norms "
          f"({len(rows)} elements)")
    return 0 if all_pass else 1


def suite_jobs(config: SuiteConfig, spec, model, ell, cocycle, gen):
    """(name, thunk) pairs for every property the suite verifies."""
    t = config.trials

    def seed(name):
        return derived_seed(config.seed, name)

    jobs = [
        ("reality", lambda: check_reality(gen, t, seed("reality"))),
        ("markovian", lambda: check_markovian(
            gen, t, seed("markovian"), config.tolerance("markovian", 1e-9))),
        ("completely_dirichlet_n2", lambda: check_completely_dirichlet(
            gen, 2, min(t, 200), seed("cd2"), config.tolerance("markovian", 1e-9))),
        ("completely_dirichlet_n3", lambda: check_completely_dirichlet(
            gen, 3, min(t, 60), seed("cd3"), config.tolerance("markovian", 1e-9))),
        ("potential_positivity", lambda: check_positivity_of_potentials(
            gen, t, seed("positivity"), config.tolerance("potential_positivity", 1e-9))),
        ("potential_equivalence", lambda: check_potential_equivalence(
            gen, t, seed("equivalence"))),
        ("approx_form_monotonicity", lambda: check_approx_form_monotonicity(
            gen, config.grid_eps, min(t, 100), seed("approx_mono"))),
        ("derivative_identity", lambda: check_derivative_identity(
            gen,
            gen.model.random_element(np.random.default_rng([seed("deriv"), 0])),
            gen.model.random_element(np.random.default_rng([seed("deriv"), 1])))),
    ]

    def deny_thunk():
        return _deny_reports(gen, model, config)

    jobs.append(("deny", deny_thunk))

    def state_thunks():
        reports = []
        for name in STATE_NAMES:
            omega = shipped_state(model, gen, name)
            g = potential_of(gen, omega)
            rep = bounded_potential_bound_check(
                gen, g, min(t, 300), seed(f"bpb_{name}"))
            rep.property = f"bounded_potential_bound_{name}"
            reports.append(rep)
            rep = check_semigroup_domination(gen, g.vector, config.grid_t)
            rep.property = f"semigroup_domination_{name}"
            reports.append(rep)
            worst = None
            for eps in config.grid_eps:
                r = approx_potential_formula_check(gen, omega, eps)
                if worst is None or r.max_violation > worst.max_violation:
                    worst = r
                worst.passed = worst.passed and r.passed
            worst.property = f"approx_potential_formula_{name}"
            worst.samples = len(config.grid_eps)
            reports.append(worst)
            rep = check_resolvent_pushforward(gen, omega, min(config.grid_eps))
            rep.property = f"resolvent_pushforward_{name}"
            reports.append(rep)
        return reports

    jobs.append(("states", state_thunks))

    if cocycle is not None:
        calc = DerivationCalculus(model, spec, cocycle)
        gamma_calc = GammaCalculator(gen)
        omega = shipped_state(model, gen, "trivial")
        g = potential_of(gen, omega)
        jobs += [
            ("gamma_cross_validation", lambda: gamma_cross_check(
                gen, gamma_calc, calc, min(t, 300), seed("gamma_cross"),
                config.tolerance("gamma_cross", 1e-9))),
            ("leibniz", lambda: leibniz_report(
                calc, t, seed("leibniz"), config.tolerance("leibniz", 1e-10))),
            ("bimodule_symmetry", lambda: symmetry_report(
                calc, min(t, 200), seed("symmetry"),
                config.tolerance("symmetry", 1e-10))),
            ("gamma_potential_identity", lambda: gamma_potential_identity_check(
                gen, gamma_calc, min(t, 300), seed("gamma_potential"),
                config.tolerance("gamma_potential", 1e-9))),
            ("gamma_bound", lambda: gamma_bound_check(
                gen, gamma_calc, g, min(t, 100), seed("gamma_bound"))),
            ("multiplier_invariants", lambda: multiplier_invariants_check(
                gen, min(t, 50), seed("mult_inv"))),
            ("resolvent_multiplier", lambda: check_resolvent_multiplier(
                gen, gamma_calc, omega.density, config.grid_eps)),
            ("multiplier_bound", lambda: _multiplier_bound_report(
                gen, gamma_calc, min(t, 100), seed("mult_bound"))),
        ]
    return jobs


def _multiplier_bound_report(gen, gamma_calc, trials: int, seed: int) -> CheckReport:
    worst = -np.inf
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        g = gen.inverse_graph(gen.model.random_positive(rng))
        rep = check_multiplier_bound(gen, gamma_calc, g, trials=5, seed=trial)
        worst = max(worst, rep.left_norm - rep.apriori_bound,
                    rep.details["sampled_excess"])
    return CheckReport(property="multiplier_bound", samples=trials,
                       max_violation=float(max(worst, 0.0)), seed=seed,
                       passed=bool(worst <= 1e-8))


def run_suite(config: SuiteConfig) -> tuple[int, list[CheckReport]]:
    spec, model, ell, cocycle = load_model_file(config.model_path)
    validate_model(model)
    gen = build_generator(model, ell)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = suite_jobs(config, spec, model, ell, cocycle, gen)
    threads = max(1, int(os.environ.get("NCPT_THREADS", "1")))

    def run_one(job):
        name, thunk = job
        try:
            result = thunk()
        except (ArithmeticError, ValueError, ModelError) as exc:
            return [CheckReport(property=name, samples=0, max_violation=np.inf,
                                seed=config.seed, passed=False,
                                details={"error": str(exc)})]
        return result if isinstance(result, list) else [result]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            grouped = list(pool.map(run_one, jobs))
    else:
        grouped = [run_one(job) for job in jobs]
    reports = [rep for group in grouped for rep in group]

    rows = []
    for rep in reports:
        rep.details.pop("csv_rows", None)
        rep.write(out)
        rows.append([rep.property, rep.samples, float(rep.max_violation),
                     rep.passed])
    write_csv(out / "summary.csv",
              ["property", "samples", "max_violation", "pass"], rows)
    (out / "metadata.json").write_text(json.dumps({
        "created": datetime.now(timezone.utc).isoformat(),
        "config": json.loads(config.to_json()),
    }, sort_keys=True, indent=2) + "\n")

    # Figures alongside the delimited output.
    plotting.fig_spectrum(gen, out / "spectrum.png")
    omega = shipped_state(model, gen, "trivial")
    g = potential_of(gen, omega).vector
    plotting.fig_graph_norm_convergence(gen, g, config.grid_eps,
                                        out / "approx_convergence.png")
    deltas = sorted(config.grid_delta, reverse=True)
    values = [deny_quadratic(gen, omega, g, d) for d in deltas]
    plotting.fig_deny_monotonicity(deltas, values, gen.graph_norm(g) ** 2,
                                   out / "deny_monotonicity.png")
    try:
        lam_rows = [[lam] + list(np.real_if_close(
            interpolation_family(gen, omega, lam)).astype(float))
            for lam in config.grid_lambda]
        write_csv(out / "interpolation.csv",
                  ["lambda"] + [f"phi({lab})" for lab in model.labels], lam_rows)
    except ValueError:
        pass  # non-diagonal generator: no interpolation artifact

    return _print_and_code(reports), reports


def _print_and_code(reports: list[CheckReport]) -> int:
    code = 0
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.property} "
              f"(samples={rep.samples}, max_violation={rep.max_violation:.3e})")
        if not rep.passed:
            code = 1
    return code


def cmd_suite(args) -> int:
    if args.config:
        config = SuiteConfig.from_json(Path(args.config).read_text())
    else:
        if not args.model:
            raise ValueError("suite needs a model path or --config")
        config = SuiteConfig(model_path=args.model)
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
        if config.trials < 1:
            raise ValueError("trials must be at least 1")
    if args.out is not None:
        config.out_dir = args.out
    for name in ("grid_t", "grid_eps", "grid_delta", "grid_lambda"):
        val = getattr(args, name)
        if val is not None:
            setattr(config, name, tuple(float(v) for v in val.split(",")))
    for item in args.tol or []:
        key, _, value = item.partition("=")
        config.tol[key] = float(value)
    config = SuiteConfig(**asdict(config))  # re-validate after overrides
    code, _ = run_suite(config)
    return code


def _make_config_from_args(args) -> SuiteConfig:
    config = SuiteConfig(model_path=args.model)
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    if args.out is not None:
        config.out_dir = args.out
    for name in ("grid_t", "grid_eps", "grid_delta", "grid_lambda"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(config, name, tuple(float(v) for v in val.split(",")))
    for item in getattr(args, "tol", None) or []:
        key, _, value = item.partition("=")
        config.tol[key] = float(value)
    return SuiteConfig(**asdict(config))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncpt",
        description="Dirichlet forms, potentials and multipliers on "
                    "finite tracial *-algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override a property tolerance")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--grid-t", dest="grid_t", default=None)
    common.add_argument("--grid-eps", dest="grid_eps", default=None)
    common.add_argument("--grid-delta", dest="grid_delta", default=None)
    common.add_argument("--grid-lambda", dest="grid_lambda", default=None)

    p = sub.add_parser("model-info", parents=[common])
    p.add_argument("model")

    p = sub.add_parser("potential", parents=[common])
    p.add_argument("model")
    p.add_argument("--state", choices=STATE_NAMES, default="trivial")
    p.add_argument("--phi", default=None,
                   help="comma-separated coefficient function values")

    for name in ("deny", "gamma", "mult-norm"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("model")

    p = sub.add_parser("suite", parents=[common])
    p.add_argument("model", nargs="?", default=None)
    p.add_argument("--config", default=None, help="suite config JSON file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "model-info":
            return cmd_model_info(args)
        if args.command == "potential":
            return cmd_potential(args)
        if args.command == "suite":
            return cmd_suite(args)
        config = _make_config_from_args(args)
        if args.command == "deny":
            return cmd_deny(args, config)
        if args.command == "gamma":
            return cmd_gamma(args, config)
        if args.command == "mult-norm":
            return cmd_mult_norm(args, config)
        raise ValueError(f"unknown command {args.command!r}")
    except (OSError, json.JSONDecodeError, KeyError, TypeError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
