"""opsflow command line: network init, scenarios, cost sweeps, configtx, serve."""

from __future__ import annotations

import argparse
import json
import sys

from . import configtx as ctx_lib
from .canonical import canonical_json
from .costmodel import (
    SCENARIO_ADD_ORG,
    SCENARIO_DEPLOY_CC,
    CostParams,
    headline_report,
    sweep,
)
from .identity import OrgIdentity
from .scenario import emit_results, run_scenario, sweep_csv
from .simnet.genesis import GenesisSpec
from .simnet.types import ChannelConfig

_SCENARIO_FLAGS = {
    "1": SCENARIO_ADD_ORG,
    "2": SCENARIO_DEPLOY_CC,
    "add-org": SCENARIO_ADD_ORG,
    "deploy-cc": SCENARIO_DEPLOY_CC,
}


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# -- net ---------------------------------------------------------------------


def cmd_net_init(args: argparse.Namespace) -> int:
    spec = GenesisSpec.standard(args.orgs, args.channels, args.chaincodes, args.seed)
    _write(args.out, canonical_json(spec.to_json()) + "\n")
    return 0


def cmd_net_keys(args: argparse.Namespace) -> int:
    spec = GenesisSpec.from_json(_load_json(args.net))
    keys = {
        org.id: OrgIdentity.derive(spec.seed, org.id).public_key for org in spec.orgs
    }
    _write(args.out, canonical_json(keys) + "\n")
    return 0


# -- scenario -----------------------------------------------------------------


def cmd_scenario_run(args: argparse.Namespace) -> int:
    params = CostParams(n=args.orgs, ch=args.channels, cc=args.chaincodes)
    report = run_scenario(
        args.scenario, args.mode, params, args.seed, tuple(args.fail or ())
    )
    if args.metrics:
        emit_results(report, args.metrics)
    summary = {
        "scenario": report.scenario,
        "mode": report.mode,
        "success": report.success,
        "failure_detail": report.failure_detail,
        "actions": sum(report.action_counts.values()),
        "matches_cost_model": report.comparison["all_match"],
        "state_digest": report.state_digest,
    }
    print(canonical_json(summary))
    return 0 if report.success else 1


# -- cost ------------------------------------------------------------------------


def _parse_fixed(text: str) -> dict[str, int]:
    fixed: dict[str, int] = {}
    if text:
        for part in text.split(","):
            key, value = part.split("=")
            fixed[key.strip().lower()] = int(value)
    return fixed


def _parse_vary(text: str) -> tuple[str, int, int]:
    key, bounds = text.split("=")
    start, stop = bounds.split(":")
    return key.strip().lower(), int(start), int(stop)


def cmd_cost_sweep(args: argparse.Namespace) -> int:
    scenario = _SCENARIO_FLAGS[args.scenario]
    rows = sweep(scenario, args.kind, _parse_fixed(args.fix), _parse_vary(args.vary))
    _write(args.out, sweep_csv(rows))
    return 0


def cmd_cost_headline(args: argparse.Namespace) -> int:
    _write(args.out, canonical_json(headline_report()) + "\n")
    return 0


# -- configtx ----------------------------------------------------------------------


def cmd_configtx_compute(args: argparse.Namespace) -> int:
    base = ChannelConfig.from_json(_load_json(args.base))
    ops = [ctx_lib.ConfigOp.from_json(op) for op in _load_json(args.ops)]
    update = ctx_lib.compute_update(base, ops)
    _write(args.out, canonical_json(update.to_json()) + "\n")
    return 0


def cmd_configtx_sign(args: argparse.Namespace) -> int:
    update = ctx_lib.ConfigUpdate.from_json(_load_json(args.update))
    identity = OrgIdentity.derive(args.seed, args.org)
    signature = ctx_lib.sign_update(identity, update)
    _write(args.out, canonical_json(signature.to_json()) + "\n")
    return 0


def cmd_configtx_assemble(args: argparse.Namespace) -> int:
    update = ctx_lib.ConfigUpdate.from_json(_load_json(args.update))
    signatures = [ctx_lib.ConfigSignature.from_json(_load_json(p)) for p in args.sig]
    keys = _load_json(args.keys)
    envelope = ctx_lib.assemble_envelope(update, signatures, keys)
    _write(args.out, canonical_json(envelope.to_json()) + "\n")
    return 0


def cmd_configtx_apply(args: argparse.Namespace) -> int:
    base = ChannelConfig.from_json(_load_json(args.base))
    update = ctx_lib.ConfigUpdate.from_json(_load_json(args.update))
    new_config = ctx_lib.apply_update(base, update)
    _write(args.out, canonical_json(new_config.to_json()) + "\n")
    return 0


# -- serve ----------------------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    from .apiserver import serve_many
    from .runtime import OpsRuntime

    spec = GenesisSpec.from_json(_load_json(args.net))
    runtime = OpsRuntime.build(spec)
    orgs = args.org
    ports = args.port
    if len(orgs) != len(ports):
        raise SystemExit("--org and --port must be given the same number of times")
    tokens = args.token or []
    bindings = [
        (org, port, tokens[i] if i < len(tokens) else None)
        for i, (org, port) in enumerate(zip(orgs, ports))
    ]
    print(
        canonical_json(
            {"serving": [{"org": o, "port": p} for o, p, _ in bindings]}
        ),
        flush=True,
    )
    serve_many(runtime, bindings, pump_interval=args.pump_interval)
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opsflow",
        description="Simulated consortium network with on-chain operations workflows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    net = sub.add_parser("net", help="network genesis utilities")
    net_sub = net.add_subparsers(dest="net_command", required=True)
    init = net_sub.add_parser("init", help="write a genesis spec file")
    init.add_argument("--orgs", type=int, required=True)
    init.add_argument("--channels", type=int, default=0)
    init.add_argument("--chaincodes", type=int, default=0)
    init.add_argument("--seed", type=int, default=0)
    init.add_argument("--out", default=None)
    init.set_defaults(func=cmd_net_init)
    keys = net_sub.add_parser("keys", help="export the orgs' public keys")
    keys.add_argument("--net", required=True)
    keys.add_argument("--out", default=None)
    keys.set_defaults(func=cmd_net_keys)

    scenario = sub.add_parser("scenario", help="run an operations scenario")
    scenario_sub = scenario.add_subparsers(dest="scenario_command", required=True)
    run = scenario_sub.add_parser("run", help="run add-org or deploy-cc end to end")
    run.add_argument("--scenario", choices=("add-org", "deploy-cc"), required=True)
    run.add_argument("--mode", choices=("conventional", "opssc"), required=True)
    run.add_argument("--orgs", type=int, default=4)
    run.add_argument("--channels", type=int, default=2)
    run.add_argument("--chaincodes", type=int, default=2)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument(
        "--fail",
        action="append",
        metavar="task@org@attempt",
        help="inject an agent failure (repeatable)",
    )
    run.add_argument("--metrics", default=None, help="write the full report as JSON")
    run.set_defaults(func=cmd_scenario_run)

    cost = sub.add_parser("cost", help="cost model evaluation")
    cost_sub = cost.add_subparsers(dest="cost_command", required=True)
    sweep_p = cost_sub.add_parser("sweep", help="sweep a parameter, emit CSV")
    sweep_p.add_argument("--scenario", choices=sorted(_SCENARIO_FLAGS), required=True)
    sweep_p.add_argument("--kind", choices=("toc", "lt"), required=True)
    sweep_p.add_argument("--fix", default="", metavar="ch=2,cc=2")
    sweep_p.add_argument("--vary", required=True, metavar="n=2:20")
    sweep_p.add_argument("--out", default=None)
    sweep_p.set_defaults(func=cmd_cost_sweep)
    headline = cost_sub.add_parser("headline", help="the quoted reference reductions")
    headline.add_argument("--out", default=None)
    headline.set_defaults(func=cmd_cost_headline)

    configtx = sub.add_parser("configtx", help="channel config update artifacts")
    configtx_sub = configtx.add_subparsers(dest="configtx_command", required=True)
    compute = configtx_sub.add_parser("compute", help="compute an update from base + ops")
    compute.add_argument("--base", required=True)
    compute.add_argument("--ops", required=True)
    compute.add_argument("--out", default=None)
    compute.set_defaults(func=cmd_configtx_compute)
    sign = configtx_sub.add_parser("sign", help="sign an update with a derived org key")
    sign.add_argument("--update", required=True)
    sign.add_argument("--org", required=True)
    sign.add_argument("--seed", type=int, required=True)
    sign.add_argument("--out", default=None)
    sign.set_defaults(func=cmd_configtx_sign)
    assemble = configtx_sub.add_parser("assemble", help="bundle update + signatures")
    assemble.add_argument("--update", required=True)
    assemble.add_argument("--sig", action="append", required=True)
    assemble.add_argument("--keys", required=True, help="JSON map org_id -> public key")
    assemble.add_argument("--out", default=None)
    assemble.set_defaults(func=cmd_configtx_assemble)
    apply_p = configtx_sub.add_parser("apply", help="apply an update to a base config")
    apply_p.add_argument("--base", required=True)
    apply_p.add_argument("--update", required=True)
    apply_p.add_argument("--out", default=None)
    apply_p.set_defaults(func=cmd_configtx_apply)

    serve = sub.add_parser("serve", help="serve the admin API for one or more orgs")
    serve.add_argument("--net", required=True, help="genesis spec file")
    serve.add_argument("--org", action="append", required=True)
    serve.add_argument("--port", action="append", type=int, required=True)
    serve.add_argument("--token", action="append", default=None)
    serve.add_argument(
        "--pump-interval", type=float, default=0.25,
        help="seconds between background agent rounds",
    )
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
