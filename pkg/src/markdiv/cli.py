"""
Command-line front end.

    markdiv analyze --input channel.json [--k 2 --k 3] [--no-cptp-check]
    markdiv examples {nilpotent,normal-diag,gellmann-boundary,perturbed-boundary,
                      stochastic-counterexample} --dim D
    markdiv search --dim D [--k K] [--restarts R] [--seed S]
    markdiv conjecture --dim D [--restarts R] [--seed S] [--format csv|json]

Exit codes: 0 inconclusive / success, 1 usage or parse error, 2 numerical
failure, 3 certified violation.
"""

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .criteria import REPORT_TOL, full_report, generator_spectral_condition
from .errors import (
    BisectionFailure,
    DegenerateSpectrumError,
    MarkdivError,
    NoViolationFound,
    NotAChannelError,
    ParseError,
    UnknownExampleError,
)
from .io import (
    CLASSICAL_KINDS,
    channel_document,
    document_to_stochastic,
    document_to_superop,
    dumps,
    load_document,
    stochastic_document,
)
from .superop import CP_TOL, QuantumChannel, lindblad_superoperator

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VIOLATION = 3

EXAMPLES = ("nilpotent", "normal-diag", "gellmann-boundary", "perturbed-boundary",
            "stochastic-counterexample")
SPECTRUM_TOL = 1e-10


@dataclass
class RunConfig:
    command: str
    input_path: str = None
    output_path: str = None
    dim: int = None
    seed: int = 0
    tol_cp: float = CP_TOL
    tol_report: float = REPORT_TOL
    k_list: list = field(default_factory=list)
    c: float = 1.0
    restarts: int = None
    max_iters: int = 2000
    env_dim: int = None
    check_cptp: bool = True
    format: str = "json"
    example: str = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _k_values(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="markdiv", description="Spectral criteria for infinitesimal Markovian divisibility.")
    parser.add_argument("--version", action="version", version=f"markdiv {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--dim", type=int)
    common.add_argument("--seed", type=int, help="random seed (fallback: $MARKDIV_SEED, then 0)")
    common.add_argument("--k", type=_k_values, action="append", default=[],
                        help="number of singular-value factors; repeat or comma-separate")
    common.add_argument("--c", type=float, default=1.0, help="class parameter for classical criteria")
    common.add_argument("--restarts", type=int)
    common.add_argument("--tol-cp", type=float, default=CP_TOL)
    common.add_argument("--tol-report", type=float, default=REPORT_TOL)
    common.add_argument("--no-cptp-check", action="store_true")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="run every criterion on a matrix file")
    p.add_argument("--input", "-i", required=True)

    p = sub.add_parser("examples", parents=[common], help="reproduce a closed-form example")
    p.add_argument("example", choices=EXAMPLES)

    p = sub.add_parser("search", parents=[common], help="search for product-criterion violations")
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--env-dim", type=int)

    p = sub.add_parser("conjecture", parents=[common], help="tabulate the top-k AM/GM maxima")
    p.add_argument("--max-iters", type=int, default=2000)
    return parser


def config_from_args(args) -> RunConfig:
    seed = args.seed
    if seed is None:
        env = os.environ.get("MARKDIV_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise ParseError(f"MARKDIV_SEED={env!r} is not an integer")
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        output_path=args.output,
        dim=args.dim,
        seed=seed,
        tol_cp=args.tol_cp,
        tol_report=args.tol_report,
        k_list=[k for ks in args.k for k in ks],
        c=args.c,
        restarts=args.restarts,
        max_iters=getattr(args, "max_iters", 2000),
        env_dim=getattr(args, "env_dim", None),
        check_cptp=not args.no_cptp_check,
        format=args.format,
        example=getattr(args, "example", None),
    )


def _emit(config: RunConfig, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if config.output_path:
        with open(config.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _reports_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["criterion_id", "k", "p", "lhs_log", "rhs_log", "margin", "verdict", "flags"])
    for r in reports:
        w.writerow([r.criterion_id, r.k, repr(r.p), repr(r.lhs_log), repr(r.rhs_log), repr(r.margin),
                    r.verdict, ";".join(r.flags)])
    return buf.getvalue()


def _need_dim(config, minimum=2):
    if config.dim is None:
        raise ParseError("--dim is required")
    if config.dim < minimum:
        raise ParseError(f"--dim must be at least {minimum}")
    return config.dim


def cmd_analyze(config: RunConfig) -> int:
    from .stochastic import classical_power_criterion

    doc = load_document(config.input_path)
    if config.dim is not None and config.dim != doc["dim"]:
        raise ParseError(f"--dim {config.dim} does not match document dim {doc['dim']}")
    if doc["kind"] in CLASSICAL_KINDS:
        S = document_to_stochastic(doc)
        report = classical_power_criterion(S, config.c, report_tol=config.tol_report)
        violated = report.violated
        out = {"kind": doc["kind"], "dim": doc["dim"], "seed": config.seed, "c": config.c,
               "conclusion": "NotMarkovianDivisibleInClass" if violated else "Inconclusive",
               "reports": [report.to_dict()]}
        reports = [report]
    else:
        S = document_to_superop(doc)
        T = QuantumChannel.from_superop(S, check=config.check_cptp, cp_tol=config.tol_cp)
        if not T.is_cptp:
            print(f"warning: input is not CPTP (cp_margin={T.cp_margin:.3e}, "
                  f"tp_residual={T.tp_residual:.3e})", file=sys.stderr)
        cert = full_report(T, config.k_list, report_tol=config.tol_report)
        violated = cert.conclusion == "NotInfinitesimalDivisible"
        out = {"kind": doc["kind"], "dim": doc["dim"], "seed": config.seed,
               "cp_margin": T.cp_margin, "tp_residual": T.tp_residual, **cert.to_dict()}
        reports = cert.reports
    _emit(config, _reports_csv(reports) if config.format == "csv" else dumps(out))
    return EXIT_VIOLATION if violated else EXIT_OK


def _spectrum_check(computed, expected, tol=SPECTRUM_TOL) -> dict:
    computed, expected = np.asarray(computed), np.asarray(expected)
    dev = float(np.max(np.abs(computed - expected)))
    return {"computed": computed, "expected": expected, "max_deviation": dev, "match": dev <= tol}


def _example_nilpotent(config):
    from .witnesses import nilpotent_corner_channel, nilpotent_corner_generator
    from .criteria import channel_spectrum, max_valid_exponent
    from .matcore import hermitian_eigenvalues_ascending

    d = _need_dim(config)
    T, expected = nilpotent_corner_channel(d)
    gen = lindblad_superoperator(nilpotent_corner_generator(d)).matrix
    sym = hermitian_eigenvalues_ascending(gen + gen.conj().T).values
    r2 = math.sqrt(2)
    sym_expected = np.sort(np.concatenate([[-1 - r2], np.full(2 * (d - 1), -1.0),
                                           np.zeros(d * d - 2 * d), [-1 + r2]]))
    checks = {
        "singular_values": _spectrum_check(channel_spectrum(T).singular_values, expected.values),
        "symmetrized_generator_eigenvalues": _spectrum_check(sym, sym_expected),
    }
    cert = full_report(T, range(1, d * d + 1), report_tol=config.tol_report)
    extra = {"max_valid_exponent": max_valid_exponent(T),
             "max_valid_exponent_per_dim": max_valid_exponent(T) / d,
             "generator_slack_k1_p_half_d": generator_spectral_condition(gen, 1, d / 2)}
    return T, checks, cert, extra


def _example_normal_diag(config):
    from .witnesses import normal_diag_generator
    from .superop import channel_from_generator

    d = _need_dim(config)
    gen = normal_diag_generator(d)
    T = channel_from_generator(gen)
    G = lindblad_superoperator(gen).matrix
    slack = generator_spectral_condition(G, 1, d)
    checks = {"generator_slack_k1_p_d": {"computed": slack, "expected": 0.0,
                                         "max_deviation": abs(slack), "match": abs(slack) <= SPECTRUM_TOL}}
    cert = full_report(T, report_tol=config.tol_report)
    return T, checks, cert, {}


def _example_gellmann(config):
    from .witnesses import gellmann_boundary_witness
    from .criteria import channel_spectrum

    d = _need_dim(config)
    eps, T = gellmann_boundary_witness(d)
    expected = np.sort(np.concatenate([[0.0], np.full(d * d - 2, eps), [1.0]]))
    checks = {"singular_values": _spectrum_check(channel_spectrum(T).singular_values, expected),
              "epsilon_max": {"computed": eps, "expected": 2 / (d + 2),
                              "max_deviation": abs(eps - 2 / (d + 2)),
                              "match": abs(eps - 2 / (d + 2)) <= 1e-9}}
    cert = full_report(T, report_tol=config.tol_report)
    return T, checks, cert, {"epsilon_max": eps, "cp_margin": T.cp_margin}


def _example_perturbed(config):
    from .witnesses import gellmann_boundary_witness, perturb_toward_identity, perturbed_identity_witness

    d = _need_dim(config, 3)
    eps_max, T0 = gellmann_boundary_witness(d)
    eps, cert = perturbed_identity_witness(T0, report_tol=config.tol_report)
    T = perturb_toward_identity(T0, eps)
    violated = any(r.criterion_id == "PowerSmallestSV" for r in cert.failing_criteria)
    checks = {"power_criterion_violated": {"computed": violated, "expected": True,
                                           "max_deviation": 0.0 if violated else 1.0, "match": violated}}
    return T, checks, cert, {"epsilon_max": eps_max, "epsilon": eps}


def _example_stochastic(config):
    from .stochastic import counterexample_matrix, stochastic_exp
    from .witnesses import corner_extreme_singular_values

    d = _need_dim(config)
    Q = counterexample_matrix(d)
    S = stochastic_exp(Q)
    s = np.sort(np.linalg.svd(S, compute_uv=False))
    big, small = corner_extreme_singular_values()
    expected = np.sort(np.concatenate([[small], np.ones(d - 2), [big]]))
    det = float(np.linalg.det(S))
    prods = {k: float(np.prod(s[:k])) for k in range(1, d)}
    exceeds = all(det > v for v in prods.values())
    checks = {
        "singular_values": _spectrum_check(s, expected),
        "det": {"computed": det, "expected": math.exp(-1), "max_deviation": abs(det - math.exp(-1)),
                "match": abs(det - math.exp(-1)) <= 1e-12},
        "det_exceeds_all_partial_products": {"computed": exceeds, "expected": True,
                                             "max_deviation": 0.0 if exceeds else 1.0, "match": exceeds},
    }
    extra = {"rate_matrix": Q, "partial_products": {str(k): v for k, v in prods.items()}}
    return S, checks, None, extra


def cmd_examples(config: RunConfig) -> int:
    builders = {
        "nilpotent": _example_nilpotent,
        "normal-diag": _example_normal_diag,
        "gellmann-boundary": _example_gellmann,
        "perturbed-boundary": _example_perturbed,
        "stochastic-counterexample": _example_stochastic,
    }
    if config.example not in builders:
        raise UnknownExampleError(config.example)
    T, checks, cert, extra = builders[config.example](config)
    if config.example == "stochastic-counterexample":
        channel = stochastic_document(T)
    else:
        channel = channel_document(T)
    out = {"example": config.example, "dim": config.dim, "seed": config.seed, "checks": checks, **extra,
           "certificate": cert.to_dict() if cert is not None else None, "channel": channel}
    ok = all(c["match"] for c in checks.values())
    if config.format == "csv" and cert is not None:
        _emit(config, _reports_csv(cert.reports))
    else:
        _emit(config, dumps(out))
    if not ok:
        print("error: computed values disagree with the closed form", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_search(config: RunConfig) -> int:
    from .witnesses import search_product_violation

    d = _need_dim(config)
    k = config.k_list[0] if config.k_list else 2 * d - 2
    restarts = 16 if config.restarts is None else config.restarts
    res = search_product_violation(d, k, restarts=restarts, max_iters=config.max_iters,
                                   seed=config.seed, env_dim=config.env_dim, tol=config.tol_report)
    out = {
        "dim": d, "k": k, "seed": res.seed, "restarts": res.restarts, "max_iters": config.max_iters,
        "env_dim": res.env_dim, "iterations": res.iterations,
        "best_objective": res.best_objective, "best_log_objective": res.best_log_objective,
        "violated": res.violated, "restart_objectives": res.restart_objectives,
        "note": "a negative result is not a proof that no violating channel exists",
        "channel": channel_document(res.best_channel),
    }
    _emit(config, dumps(out))
    return EXIT_VIOLATION if res.violated else EXIT_OK


def cmd_conjecture(config: RunConfig) -> int:
    from .conjecture import empirical_h

    d = _need_dim(config, 3)
    restarts = 64 if config.restarts is None else config.restarts
    h, table = empirical_h(d, restarts=restarts, seed=config.seed, max_iters=config.max_iters)
    if config.format == "csv":
        header = (f"# {table.label} d={d} h_emp={h} seed={config.seed} restarts={restarts} "
                  f"max_iters={config.max_iters} slack_tol={table.slack_tol!r}\n")
        _emit(config, header + table.to_csv())
    else:
        _emit(config, dumps(table.to_dict()))
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "examples": cmd_examples, "search": cmd_search,
            "conjecture": cmd_conjecture}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = config_from_args(args)
        return COMMANDS[config.command](config)
    except (ParseError, NotAChannelError, UnknownExampleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BisectionFailure, NoViolationFound, DegenerateSpectrumError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MarkdivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
