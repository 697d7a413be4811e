"""Command-line front end.

Exit codes: 0 on pass/success, 1 on a failed check, 2 on usage or parse
errors.  All sampling flows through a single seedable generator, so identical
seeds and flags produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import bell, entanglement, localpoly, model, quantum, sharing, tradeoffs


class CliError(Exception):
    """Usage or input error; maps to exit code 2."""


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(
            f"malformed JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from None


def parse_behavior(path: str) -> model.Behavior:
    """Load and structurally check a behavior JSON file."""
    data = _load_json(path)
    try:
        return model.behavior_from_json_dict(data)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def parse_state(path: str) -> quantum.DensityMatrix:
    data = _load_json(path)
    try:
        return quantum.state_from_json_dict(data)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def _require_valid(b: model.Behavior, tol: float) -> None:
    report = model.validate_behavior(b, tol)
    if not report.passed:
        raise CliError(
            "input behavior failed validation: "
            f"max positivity violation {report.max_positivity_violation:.3e}, "
            f"max normalization deviation {report.max_normalization_deviation:.3e}"
        )


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _angles(text: str, count: int) -> list[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise CliError(f"--angles must be comma-separated radians: '{text}'") from None
    if len(values) != count:
        raise CliError(f"expected {count} angles, got {len(values)}")
    return values


def _resolve_state(args) -> quantum.DensityMatrix:
    if args.infile and args.state:
        raise CliError("give either --in or --state, not both")
    if args.infile:
        return parse_state(args.infile)
    if args.state:
        try:
            return quantum.named_state(args.state, mu=args.mu)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    raise CliError("a state is required (--in or --state)")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    b = parse_behavior(args.infile)
    report = model.validate_behavior(b, args.tol)
    payload = {
        "passed": report.passed,
        "max_positivity_violation": report.max_positivity_violation,
        "max_normalization_deviation": report.max_normalization_deviation,
        "positivity_violations": [
            {"context": list(ctx), "outcomes": list(outs), "value": value}
            for ctx, outs, value in report.positivity_violations
        ],
        "normalization_deviations": [
            {"context": list(ctx), "deviation": dev}
            for ctx, dev in report.normalization_deviations
        ],
    }
    _emit(payload, args.out)
    return 0 if report.passed else 1


def cmd_nstest(args) -> int:
    b = parse_behavior(args.infile)
    _require_valid(b, args.tol)
    report = model.is_no_signalling(b, args.tol)
    payload = {
        "is_no_signalling": report.is_no_signalling,
        "max_violation": report.max_violation,
    }
    if report.witness is not None:
        payload["witness"] = asdict(report.witness)
    _emit(payload, args.out)
    return 0 if report.is_no_signalling else 1


def cmd_localtest(args) -> int:
    b = parse_behavior(args.infile)
    _require_valid(b, args.tol)
    result = localpoly.local_decomposition(b)
    if isinstance(result, localpoly.NotLocal):
        _emit({"local": False, "score": result.score}, args.out)
        return 1
    payload = {
        "local": True,
        "reconstruction_error": result.reconstruction_error,
        "weights": [float(w) for w in result.weights],
    }
    _emit(payload, args.out)
    return 0


def cmd_share(args) -> int:
    b = parse_behavior(args.infile)
    _require_valid(b, args.tol)
    try:
        result = sharing.is_n_shareable(b, args.n, mode=args.mode, tol=args.tol)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    payload = {
        "mode": args.mode,
        "n": args.n,
        "shareable": result.shareable,
        "status": "feasible" if result.shareable else "infeasible",
        "score": result.score,
    }
    if result.certificate is not None:
        payload["symmetry_residual"] = result.certificate.symmetry_residual
        payload["marginal_residual"] = result.certificate.marginal_residual
        if args.cert_out:
            cert_payload = model.behavior_to_json_dict(result.certificate.behavior)
            with open(args.cert_out, "w", encoding="utf-8", newline="\n") as handle:
                json.dump(cert_payload, handle, indent=2, sort_keys=True)
                handle.write("\n")
    _emit(payload, args.out)
    return 0 if result.shareable else 1


def cmd_chsh(args) -> int:
    if args.infile and not args.state:
        b = parse_behavior(args.infile)
        _require_valid(b, args.tol)
        if b.scenario.parties == 3:
            # Three-party input: emit the pair values and the trade-off
            # checks as a JSON report array.
            point = tradeoffs.pair_values(b)
            checks = tradeoffs.behavior_checks(b)
            payload = {
                "chsh_ab": point.chsh_ab,
                "chsh_ac": point.chsh_ac,
                "checks": [tradeoffs.report_to_json_dict(r) for r in checks],
            }
            _emit(payload, args.out)
            return 0 if all(r.passed for r in checks) else 1
        value = bell.chsh_value(b)
    else:
        rho = _resolve_state(args)
        if rho.qubits != 2:
            raise CliError("chsh needs a two-qubit state")
        if args.angles is None:
            raise CliError("chsh on a state needs --angles (four values: a0,a1,b0,b1)")
        alphas = _angles(args.angles, 4)
        observables = [
            [quantum.planar_observable(alphas[0]), quantum.planar_observable(alphas[1])],
            [quantum.planar_observable(alphas[2]), quantum.planar_observable(alphas[3])],
        ]
        value = bell.chsh_value(quantum.born_behavior(rho, observables))
    sys.stdout.write(f"{float(value)!r}\n")
    if args.out:
        _emit({"chsh": value}, args.out)
    return 0


def cmd_cg(args) -> int:
    functional = bell.collins_gisin()
    if args.infile and not args.state:
        b = parse_behavior(args.infile)
        _require_valid(b, args.tol)
        value = bell.bell_value(b, functional)
        _emit({"cg": value, "local_bound": functional.local_bound}, args.out)
        return 0
    rho = _resolve_state(args)
    if rho.qubits != 3:
        raise CliError("cg needs a three-qubit state (or a behavior file)")
    if args.angles is None:
        raise CliError("cg on a state needs --angles (nine values: a, b, c)")
    alphas = _angles(args.angles, 9)
    value_ab, value_ac = tradeoffs.cg_values_for_state(
        rho, tuple(alphas[0:3]), tuple(alphas[3:6]), tuple(alphas[6:9])
    )
    payload = {
        "cg_ab": value_ab,
        "cg_ac": value_ac,
        "local_bound": functional.local_bound,
    }
    _emit(payload, args.out)
    return 0


def cmd_ckw(args) -> int:
    rho = _resolve_state(args)
    try:
        report = entanglement.ckw_check(rho, args.pivot, tol=args.tol)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    payload = {
        "pivot": report.pivot,
        "partners": list(report.partners),
        "pairwise_tangles": list(report.pairwise),
        "cut_tangle": report.cut,
        "residual": report.residual,
        "passed": report.passed,
    }
    _emit(payload, args.out)
    return 0 if report.passed else 1


def cmd_sweep(args) -> int:
    rng = np.random.default_rng(args.seed)
    points = tradeoffs.sweep(args.cls, args.grid, args.restarts, rng, tol=args.tol)
    lines = ["theta,max_value,class"]
    for point in points:
        lines.append(f"{point.theta!r},{point.value!r},{args.cls}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_cgsearch(args) -> int:
    rng = np.random.default_rng(args.seed)
    mu_values = np.linspace(0.0, 1.0, args.grid)
    result = tradeoffs.cg_double_violation_search(mu_values, args.restarts, rng)
    payload = {
        "mu": result.mu,
        "a_angles": list(result.a_angles),
        "b_angles": list(result.b_angles),
        "c_angles": list(result.c_angles),
        "cg_ab": result.value_ab,
        "cg_ac": result.value_ac,
        "min_value": result.min_value,
        "local_bound": 4.0,
        "double_violation": result.min_value > 4.0,
    }
    _emit(payload, args.out)
    return 0 if result.min_value > 4.0 else 1


def cmd_pbprobe(args) -> int:
    report = tradeoffs.pb_probe(tol=args.tol)
    payload = {
        "sign_values": [
            {"signs": list(signs), "value": value}
            for signs, value in report.sign_values
        ],
        "max_abs_sum": report.max_sum,
        "rewritten_form_bound": report.pb_bound,
        "exceeds_rewritten_form_bound": report.exceeds_pb_form_bound,
        "t_star": report.t_star,
        "double_violation_threshold": report.t_threshold,
        "t_star_exceeds_threshold": report.t_exceeds,
    }
    _emit(payload, args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monogamy",
        description="Correlation shareability, Bell trade-offs, and entanglement checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, infile=False, state=False, angles=False, grid=False, tol=1e-9):
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--tol", type=float, default=tol, help="numeric tolerance")
        if infile:
            p.add_argument("--in", dest="infile", default=None, help="input JSON file")
        if state:
            p.add_argument(
                "--state",
                choices=["singlet", "phi_plus", "ghz", "w", "cg"],
                default=None,
            )
            p.add_argument("--mu", type=float, default=None, help="cg family parameter")
        if angles:
            p.add_argument("--angles", default=None, help="comma-separated radians")
        if grid:
            p.add_argument("--grid", type=int, default=41, help="grid size")
            p.add_argument("--restarts", type=int, default=12, help="search restarts")
            p.add_argument("--seed", type=int, default=0, help="PRNG seed")

    p = sub.add_parser("validate", help="positivity / normalization report")
    common(p, infile=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("nstest", help="no-signalling test")
    common(p, infile=True)
    p.set_defaults(func=cmd_nstest)

    p = sub.add_parser("localtest", help="local-polytope membership by LP")
    common(p, infile=True)
    p.set_defaults(func=cmd_localtest)

    p = sub.add_parser("share", help="N-shareability test")
    common(p, infile=True, tol=1e-7)  # LP feasibility threshold
    p.add_argument("--n", type=int, required=True, help="number of clones")
    p.add_argument("--mode", choices=["unrestricted", "ns"], default="ns")
    p.add_argument("--cert-out", default=None, help="write certificate behavior JSON")
    p.set_defaults(func=cmd_share)

    p = sub.add_parser("chsh", help="CHSH value of a behavior or two-qubit state")
    common(p, infile=True, state=True, angles=True)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("cg", help="three-setting functional value")
    common(p, infile=True, state=True, angles=True)
    p.set_defaults(func=cmd_cg)

    p = sub.add_parser("ckw", help="distributed-entanglement trade-off report")
    common(p, infile=True, state=True)
    p.add_argument("--pivot", type=int, default=0)
    p.set_defaults(func=cmd_ckw)

    p = sub.add_parser("sweep", help="support-function trace as CSV")
    common(p, grid=True)
    p.add_argument(
        "--class",
        dest="cls",
        choices=list(tradeoffs.SWEEP_CLASSES),
        required=True,
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cgsearch", help="double-violation search over the cg family")
    common(p, grid=True)
    p.set_defaults(func=cmd_cgsearch)

    p = sub.add_parser("pbprobe", help="four-party no-signalling probe")
    common(p, tol=1e-7)  # LP feasibility threshold
    p.set_defaults(func=cmd_pbprobe)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already; normalize others
        return 2 if exc.code not in (0,) else 0
    if getattr(args, "tol", None) is not None and args.tol <= 0:
        sys.stderr.write("error: --tol must be positive\n")
        return 2
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (RuntimeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
