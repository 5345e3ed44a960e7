"""Batch command-line front end.

Every command reads one JSON document, runs one engine query, and writes one
JSON report.  Verdicts are answers, not errors: "not rationalizable" exits 0.
Exit codes: 0 success, 1 unreadable input, 2 schema or validation problem,
3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional

from . import schemas
from .capacity import core_vertices, is_belief_function, is_convex
from .errors import InfeasibleSetError, SizeLimitError, ValidationError
from .identification import (
    check_menu_homogeneous,
    check_rationalizes,
    construct_menu_measures,
    exists_rationalizing,
    identified_vertices,
    probability_bounds,
    witness_decomposition,
)
from .numeric import format_number, parse_number
from .simulate import synth_population
from .updating import check_average_bias, rationalizing_kappa_interval

COMMANDS = (
    "check",
    "exists",
    "bounds",
    "vertices",
    "witness",
    "menu-homog",
    "identify-kappa",
    "simulate",
    "capacity-audit",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capid",
        description=(
            "Exact identification of decision-rule distributions from "
            "aggregate choices with unobserved menus, and of average "
            "updating biases from posterior-odds data."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--input", required=True, help="path to the input JSON document")
        cmd.add_argument("--output", default=None, help="report path (default: stdout)")
        cmd.add_argument(
            "--mode", choices=("exact", "float"), default="exact",
            help="arithmetic mode (default: exact rationals)",
        )
        cmd.add_argument("--seed", type=int, default=None, help="PRNG seed override")
        cmd.add_argument("--q", default=None, help="inline Q as JSON, e.g. '{\"r1\": \"1/2\"}'")
        cmd.add_argument("--kappa", default=None, help="evaluate a single average bias")
    return parser


def _require_q(args, problem, exact):
    if args.q is None:
        raise ValidationError("this command needs --q with a {rule-id: weight} object")
    try:
        raw = json.loads(args.q)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--q is not valid JSON: {exc}") from exc
    return schemas.parse_q(raw, problem, exact)


def _cmd_check(args, doc, exact):
    bundle = schemas.parse_problem(doc, exact)
    q = _require_q(args, bundle.problem, exact)
    verdict = check_rationalizes(bundle.problem, q)
    return {
        "q": schemas.q_json(q),
        "verdict": schemas.verdict_json(verdict, bundle.problem.ground),
    }


def _cmd_exists(args, doc, exact):
    bundle = schemas.parse_problem(doc, exact)
    q = exists_rationalizing(bundle.problem)
    if q is None:
        return {"feasible": False, "q": None}
    return {"feasible": True, "q": schemas.q_json(q)}


def _cmd_bounds(args, doc, exact):
    bundle = schemas.parse_problem(doc, exact)
    try:
        bounds = probability_bounds(bundle.problem)
    except InfeasibleSetError:
        return {"feasible": False, "bounds": None}
    return {
        "feasible": True,
        "bounds": {
            rid: {"min": format_number(lo), "max": format_number(hi)}
            for rid, (lo, hi) in bounds.items()
        },
    }


def _cmd_vertices(args, doc, exact):
    bundle = schemas.parse_problem(doc, exact)
    try:
        verts = identified_vertices(bundle.problem)
    except InfeasibleSetError:
        return {"feasible": False, "vertices": []}
    return {
        "feasible": True,
        "count": len(verts),
        "vertices": [schemas.q_json(v) for v in verts],
    }


def _cmd_witness(args, doc, exact):
    bundle = schemas.parse_problem(doc, exact)
    q = _require_q(args, bundle.problem, exact)
    verdict = check_rationalizes(bundle.problem, q)
    result: dict[str, Any] = {
        "q": schemas.q_json(q),
        "verdict": schemas.verdict_json(verdict, bundle.problem.ground),
        "witness": None,
    }
    if not verdict.rationalizes:
        return result
    witness = witness_decomposition(bundle.problem, q)
    result["witness"] = {
        rid: schemas.measure_json(rho) for rid, rho in witness.items()
    }
    menu_measures = {}
    for rid, rho in witness.items():
        rule = bundle.decision_rules.get(rid)
        collection = bundle.collections.get(rid)
        if rule is None or collection is None:
            continue
        pi = construct_menu_measures({rid: rho}, [rule], collection)[rid]
        menu_measures[rid] = {
            collection.ground.subset_key(menu): format_number(pi.weights[j])
            for j, menu in enumerate(collection.menus)
            if pi.weights[j] != 0
        }
    if menu_measures:
        result["menu_measures"] = menu_measures
    return result


def _cmd_menu_homog(args, doc, exact):
    bundle = schemas.parse_problem(doc, exact)
    q = _require_q(args, bundle.problem, exact)
    collection = bundle.shared_collection()
    if collection is None:
        raise ValidationError(
            "menu-homog needs every rule to declare the same menus and choices"
        )
    rules = [bundle.decision_rules[r.rule_id] for r in bundle.problem.rules]
    pi = check_menu_homogeneous(rules, collection, bundle.problem.data, q)
    result: dict[str, Any] = {
        "q": schemas.q_json(q),
        "menus": [
            [str(l) for l in collection.ground.labels_of(menu)]
            for menu in collection.menus
        ],
        "feasible": pi is not None,
        "pi": None,
    }
    if pi is not None:
        result["pi"] = {
            collection.ground.subset_key(menu): format_number(pi.weights[j])
            for j, menu in enumerate(collection.menus)
            if pi.weights[j] != 0
        }
    return result


def _cmd_identify_kappa(args, doc, exact):
    grid, model, lam, krange = schemas.parse_updating(doc, exact)
    solution = rationalizing_kappa_interval(lam, model, grid, krange)
    def subsets(masks):
        return [
            [schemas.label_key(l) for l in grid.ground.labels_of(m)] for m in masks
        ]
    result: dict[str, Any] = {
        "kappa_floor": format_number(model.kappa_floor),
        "interval": None
        if solution.empty
        else {"lo": format_number(solution.lo), "hi": format_number(solution.hi)},
        "diagnosis": solution.diagnosis,
        "bayes_violations": {
            "without_prior": subsets(solution.under_witnesses),
            "with_prior": subsets(solution.over_witnesses),
        },
    }
    if args.kappa is not None:
        kappa = parse_number(args.kappa, exact)
        verdict = check_average_bias(lam, model, grid, kappa)
        result["at_kappa"] = {
            "kappa": format_number(kappa),
            "verdict": schemas.verdict_json(verdict, grid.ground),
        }
    return result


def _cmd_capacity_audit(args, doc, exact):
    schemas.check_schema(doc)
    if doc.get("capacity") is not None:
        nu = schemas.parse_capacity(doc["capacity"], exact)
    else:
        ground = schemas.parse_ground(doc.get("labels"))
        carrier = ground.mask_of(doc["carrier"]) if doc.get("carrier") else ground.full_mask
        spec = schemas.parse_info_spec(doc.get("info_spec"), ground, carrier, exact)
        nu = schemas.build_capacity(spec)
    convex = is_convex(nu)
    result: dict[str, Any] = {
        "convex": convex,
        "belief_function": is_belief_function(nu),
        "carrier": [
            schemas.label_key(l)
            for l in nu.ground.labels_of(
                nu.carrier if nu.carrier is not None else nu.ground.full_mask
            )
        ],
        "core_vertex_count": len(core_vertices(nu)) if convex else None,
        "capacity": schemas.capacity_json(nu),
    }
    return result


def _cmd_simulate(args, doc, exact):
    ground, entries, q, seed = schemas.parse_simulation(doc, exact)
    if args.seed is not None:
        seed = args.seed
    result = synth_population([rid for rid, _, _ in entries], [s for _, s, _ in entries], q, seed)
    rules_out = []
    for rid, spec, entry in entries:
        rule_doc: dict[str, Any] = {"id": rid}
        if entry.get("menus") is not None:
            rule_doc["menus"] = entry["menus"]
            rule_doc["choices"] = entry["choices"]
        else:
            rule_doc["carrier"] = entry["carrier"]
        rule_doc["info_spec"] = schemas.info_spec_json(spec)
        rules_out.append(rule_doc)
    return {
        "labels": list(ground.labels),
        "lambda": schemas.measure_json(result.lam),
        "rules": rules_out,
        "options": {},
        "q": schemas.q_json(q),
        "synthesis": {
            **result.metadata,
            "witness": {
                rid: schemas.measure_json(rho)
                for rid, rho in result.rho_by_rule.items()
            },
        },
    }


_HANDLERS = {
    "check": _cmd_check,
    "exists": _cmd_exists,
    "bounds": _cmd_bounds,
    "vertices": _cmd_vertices,
    "witness": _cmd_witness,
    "menu-homog": _cmd_menu_homog,
    "identify-kappa": _cmd_identify_kappa,
    "simulate": _cmd_simulate,
    "capacity-audit": _cmd_capacity_audit,
}


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _error_report(command: str, mode: str, digest: Optional[str], exc: Exception) -> str:
    payload = {
        "schema": schemas.SCHEMA_ID,
        "command": command,
        "mode": mode,
        "input_digest": digest,
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }
    return json.dumps(payload, indent=2) + "\n"


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    exact = args.mode == "exact"
    try:
        with open(args.input, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        _write(_error_report(args.command, args.mode, None, exc), args.output)
        return 1
    digest = schemas.input_digest(raw)
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        _write(_error_report(args.command, args.mode, digest, exc), args.output)
        return 2
    try:
        result = _HANDLERS[args.command](args, doc, exact)
    except SizeLimitError as exc:
        _write(_error_report(args.command, args.mode, digest, exc), args.output)
        return 3
    except (ValidationError, KeyError, TypeError) as exc:
        _write(_error_report(args.command, args.mode, digest, exc), args.output)
        return 2
    if args.command == "simulate":
        # the simulate report is itself a problem document consumable by the
        # identification commands; keep its report fields alongside
        report = {
            "schema": schemas.SCHEMA_ID,
            "command": args.command,
            "mode": args.mode,
            "input_digest": digest,
            **result,
        }
    else:
        report = schemas.report(args.command, args.mode, digest, result)
    _write(schemas.dump_report(report), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
