"""Batch command-line front end.

Subcommands: analyze, tradeoff, verify, simulate, scene.  Reports are JSON
with sorted keys and 12-significant-digit floats (byte-stable for fixed
inputs and seeds); curves are CSV with a header row.

Exit codes: 0 ok, 2 parse error or bad range, 3 unsupported set size,
4 verification failure, 5 simulation outlier.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import protocols
from .attack import AttackReport, ProtocolSpec, UnsupportedSetSize, optimal_rho
from .estimation import helstrom_pe
from .oracle import OracleConfig, oracle_p_u_max_detailed
from .qubit import QubitState
from .simulate import SimResult, hjw_simulate, simulate_pe

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_VERIFY = 4
EXIT_OUTLIER = 5


class ProtocolParseError(ValueError):
    """Malformed protocol file or parameter; carries a human diagnostic."""


def parse_angle(text: str) -> float:
    """Radians, or a fraction of pi with the 'pi:' prefix (pi:1/8, pi:0.5)."""
    raw = text.strip()
    try:
        if raw.startswith("pi:"):
            return float(Fraction(raw[3:])) * np.pi
        return float(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ProtocolParseError(f"bad angle {text!r}: {exc}") from exc


def _require_number(obj, where: str) -> float:
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        raise ProtocolParseError(f"{where}: expected a number, got {obj!r}")
    return float(obj)


def load_protocol(path: Path) -> ProtocolSpec:
    """Parse a protocol JSON file; diagnostics name the offending field."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProtocolParseError(f"{path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise ProtocolParseError(f"{path}: top level must be an object")
    name = payload.get("name", path.stem)
    if not isinstance(name, str):
        raise ProtocolParseError(f"{path}: 'name' must be a string")
    sets = []
    for key in ("bit0", "bit1"):
        entries = payload.get(key)
        if not isinstance(entries, list) or not entries:
            raise ProtocolParseError(f"{path}: '{key}' must be a non-empty list")
        parsed = []
        for i, entry in enumerate(entries):
            where = f"{path}: {key}[{i}]"
            if not isinstance(entry, dict):
                raise ProtocolParseError(f"{where}: expected an object")
            unknown = set(entry) - {"theta", "phi", "p"}
            if unknown:
                raise ProtocolParseError(f"{where}: unknown fields {sorted(unknown)}")
            theta = _require_number(entry.get("theta"), f"{where}.theta")
            phi = _require_number(entry.get("phi", 0.0), f"{where}.phi")
            p = _require_number(entry.get("p"), f"{where}.p")
            if p < 0:
                raise ProtocolParseError(f"{where}.p: negative probability")
            parsed.append((p, QubitState(theta, phi)))
        total = sum(p for p, _ in parsed)
        if total <= 0:
            raise ProtocolParseError(f"{path}: '{key}' probabilities sum to zero")
        if abs(total - 1.0) > 1e-6:
            print(
                f"warning: {path}: '{key}' probabilities sum to {total:.9g}, "
                "normalizing",
                file=sys.stderr,
            )
        parsed = [(p / total, s) for p, s in parsed]
        sets.append(tuple(parsed))
    try:
        return ProtocolSpec(name, sets[0], sets[1])
    except ValueError as exc:
        raise ProtocolParseError(f"{path}: {exc}") from exc


def _resolve_protocol(args) -> tuple[ProtocolSpec, Optional[str]]:
    """(protocol, builtin family name if one was used)."""
    if args.protocol is not None:
        return load_protocol(Path(args.protocol)), None
    name = args.builtin
    params = {}
    for flag in ("theta", "gamma", "alpha", "phi"):
        value = getattr(args, flag, None)
        if value is not None:
            params[flag] = value
    try:
        return protocols.build(name, **params), name
    except KeyError as exc:
        raise ProtocolParseError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ProtocolParseError(f"builtin {name!r}: {exc}") from exc


def _round12(x: float) -> float:
    return float(f"{float(x):.12g}")


def _canonical(obj):
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return _round12(float(obj))
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _emit(payload, out: Optional[str], as_csv: bool = False) -> None:
    if as_csv:
        text = payload
    else:
        text = json.dumps(_canonical(payload), sort_keys=True, indent=2) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _protocol_dict(protocol: ProtocolSpec) -> dict:
    def side(entries):
        return [
            {"theta": s.theta, "phi": s.phi, "p": p}
            for p, s in entries
        ]

    return {
        "name": protocol.name,
        "bit0": side(protocol.bit0),
        "bit1": side(protocol.bit1),
    }


def _strategy_dict(report: AttackReport) -> dict:
    from .qubit import density_to_bloch

    def side(decomp, announce):
        elements = []
        for q, sigma in zip(decomp.weights, decomp.elements):
            elements.append(None if sigma is None else list(density_to_bloch(sigma)))
        return {
            "weights": list(decomp.weights),
            "elements_bloch": elements,
            "announce": list(announce),
        }

    s = report.strategy
    return {
        "bit0": side(s.decomp0, s.announce0),
        "bit1": side(s.decomp1, s.announce1),
    }


def _family_dict(report: AttackReport) -> Optional[dict]:
    if report.family is None:
        return None
    fam = report.family
    return {
        "base": list(fam.base),
        "direction": list(fam.direction),
        "lambda_max": fam.lambda_max,
        "end": list(fam.point(fam.lambda_max)),
    }


def cmd_analyze(args) -> int:
    protocol, family = _resolve_protocol(args)
    report = optimal_rho(protocol)
    pe = helstrom_pe(protocol.honest_density(0), protocol.honest_density(1))
    payload = {
        "protocol": _protocol_dict(protocol),
        "pe_max": pe,
        "pu_max": report.p_u_max,
        "pu_bit0": report.p_ub0,
        "pu_bit1": report.p_ub1,
        "case": report.case_tag,
        "rho_opt": list(report.rho_opt),
        "family": _family_dict(report),
        "strategy": _strategy_dict(report),
        "tradeoff_identity": None,
    }
    if family in protocols.FAMILIES:
        payload["tradeoff_identity"] = {
            "family": family,
            "residual": protocols.identity_residual(family, pe, report.p_u_max),
        }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    try:
        rows = protocols.tradeoff_curve(args.family, args.steps)
        fair_param, fair_value = protocols.fair_point(args.family)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    lines = ["param,pe_max,pu_max,identity_residual"]
    for param, pe, pu, res in rows:
        lines.append(f"{param:.12g},{pe:.12g},{pu:.12g},{res:.12g}")
    _emit("\n".join(lines) + "\n", args.out, as_csv=True)
    summary = {
        "family": args.family,
        "steps": args.steps,
        "fair_param": fair_param,
        "fair_value": fair_value,
        "max_abs_residual": max(abs(r[3]) for r in rows),
    }
    if args.out is not None and args.out != "-":
        _emit(summary, None)
    return EXIT_OK


def cmd_verify(args) -> int:
    protocol, family = _resolve_protocol(args)
    analytic = optimal_rho(protocol)
    cfg = OracleConfig(rho_grid=args.grid, refine_rounds=args.refine)
    run = oracle_p_u_max_detailed(protocol, cfg)
    gap_grid = abs(analytic.p_u_max - run.stage_values[0])
    gap_final = abs(analytic.p_u_max - run.value)
    excess = run.value - analytic.p_u_max
    tol_final = 1e-4 if args.refine == 0 else 1e-6
    checks = {
        "oracle_not_above_analytic": excess <= 1e-9,
        "grid_gap_within_1e-4": gap_grid <= 1e-4,
        f"final_gap_within_{tol_final:g}": gap_final <= tol_final,
        "recheck_within_1e-6": run.recheck_max_gap <= 1e-6,
        "recheck_not_above_analytic": run.recheck_max_excess <= 1e-9,
    }
    payload = {
        "protocol": _protocol_dict(protocol),
        "analytic_pu_max": analytic.p_u_max,
        "case": analytic.case_tag,
        "oracle_grid": run.stage_values[0],
        "oracle_final": run.value,
        "oracle_argmax": list(run.argmax),
        "gap_grid": gap_grid,
        "gap_final": gap_final,
        "recheck": {
            "points": run.recheck_points,
            "max_gap": run.recheck_max_gap,
            "max_excess": run.recheck_max_excess,
        },
        "checks": checks,
        "pass": all(checks.values()),
    }
    if args.legacy_bound:
        if family == "aharonov":
            theta = args.theta if args.theta is not None else np.pi / 8
            bound = protocols.aharonov_legacy_bound(theta)
            payload["legacy_bound"] = {
                "value": bound,
                "pu_max_below_bound": analytic.p_u_max < bound,
            }
            checks["pu_max_below_legacy_bound"] = analytic.p_u_max < bound
            payload["pass"] = all(checks.values())
        else:
            print("warning: --legacy-bound only applies to aharonov", file=sys.stderr)
    _emit(payload, args.out)
    return EXIT_OK if payload["pass"] else EXIT_VERIFY


def _sim_payload(result: SimResult, analytic: float, mode: str, bit) -> dict:
    if result.std_err > 0:
        z = (result.p_u_hat - analytic) / result.std_err
    else:
        z = 0.0 if abs(result.p_u_hat - analytic) <= 1e-12 else float("inf")
    return {
        "mode": mode,
        "bit": bit,
        "trials": result.trials,
        "seed": result.seed,
        "successes": result.successes,
        "p_hat": result.p_u_hat,
        "std_err": result.std_err,
        "analytic": analytic,
        "z": z,
        "outcome_counts": list(result.outcome_counts),
        "outcome_successes": list(result.outcome_successes),
        "pass": abs(z) <= 5.0,
    }


def cmd_simulate(args) -> int:
    protocol, _ = _resolve_protocol(args)
    if args.pe:
        result = simulate_pe(protocol, args.trials, args.seed)
        analytic = helstrom_pe(protocol.honest_density(0), protocol.honest_density(1))
        payload = _sim_payload(result, analytic, "estimate", None)
    else:
        report = optimal_rho(protocol)
        result = hjw_simulate(report.strategy, protocol, args.bit, args.trials, args.seed)
        analytic = report.p_ub0 if args.bit == 0 else report.p_ub1
        payload = _sim_payload(result, analytic, "unveil", args.bit)
    _emit(payload, args.out)
    return EXIT_OK if payload["pass"] else EXIT_OUTLIER


def cmd_scene(args) -> int:
    protocol, _ = _resolve_protocol(args)
    report = optimal_rho(protocol)

    def polytope(states):
        verts = [list(s.bloch()) for s in states]
        return {"kind": "point" if len(verts) == 1 else "chord", "vertices": verts}

    def decomp_scene(decomp):
        from .qubit import density_to_bloch

        verts = [
            list(density_to_bloch(s)) for q, s in zip(decomp.weights, decomp.elements)
            if s is not None
        ]
        return {"kind": "point" if len(verts) == 1 else "chord", "vertices": verts}

    payload = {
        "name": protocol.name,
        "honest": {
            "bit0": polytope(protocol.states(0)),
            "bit1": polytope(protocol.states(1)),
        },
        "rho_opt": list(report.rho_opt),
        "case": report.case_tag,
        "family": _family_dict(report),
        "decompositions": {
            "bit0": decomp_scene(report.strategy.decomp0),
            "bit1": decomp_scene(report.strategy.decomp1),
        },
        "labels": {
            "bit0": [f"bit0/state{k}" for k in range(len(protocol.bit0))],
            "bit1": [f"bit1/state{k}" for k in range(len(protocol.bit1))],
        },
    }
    _emit(payload, args.out)
    return EXIT_OK


def _add_protocol_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--protocol", help="protocol JSON file")
    group.add_argument("--builtin", help="built-in family name")
    sub.add_argument("--theta", type=parse_angle, default=None)
    sub.add_argument("--gamma", type=parse_angle, default=None)
    sub.add_argument("--alpha", type=parse_angle, default=None)
    sub.add_argument("--phi", type=parse_angle, default=None)
    sub.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcattack",
        description="Optimal cheating bounds for single-qubit state-commitment protocols",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    analyze = subs.add_parser("analyze", help="closed-form attack report")
    _add_protocol_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    tradeoff = subs.add_parser("tradeoff", help="estimation/unveiling trade-off curve")
    tradeoff.add_argument("family", choices=sorted(protocols.FAMILIES))
    tradeoff.add_argument("--steps", type=int, default=64)
    tradeoff.add_argument("--out", default=None)
    tradeoff.set_defaults(handler=cmd_tradeoff)

    verify = subs.add_parser("verify", help="analytic vs brute-force oracle")
    _add_protocol_flags(verify)
    verify.add_argument("--grid", type=int, default=OracleConfig().rho_grid)
    verify.add_argument("--refine", type=int, default=OracleConfig().refine_rounds)
    verify.add_argument(
        "--legacy-bound",
        action="store_true",
        help="compare against the previously published aharonov bound",
    )
    verify.set_defaults(handler=cmd_verify)

    simulate = subs.add_parser("simulate", help="seeded Monte-Carlo run")
    _add_protocol_flags(simulate)
    simulate.add_argument("--bit", type=int, choices=(0, 1), default=0)
    simulate.add_argument("--pe", action="store_true", help="estimation game instead of unveiling")
    simulate.add_argument("--trials", type=int, default=100_000)
    simulate.add_argument("--seed", type=int, default=42)
    simulate.set_defaults(handler=cmd_simulate)

    scene = subs.add_parser("scene", help="Bloch-ball plot data")
    _add_protocol_flags(scene)
    scene.set_defaults(handler=cmd_scene)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ProtocolParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedSetSize as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
