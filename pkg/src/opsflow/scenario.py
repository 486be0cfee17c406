"""End-to-end scenario driver: add an organization / deploy chaincodes.

Each scenario runs in one of two modes. Conventional mode scripts every
administrator action against the network primitives directly; workflow mode
("opssc") goes through the on-chain proposal/vote contracts and lets the
agents execute. Both modes count each administrator action under a step id so
a run can be compared against the cost model's step tables.

The add-org scenario in workflow mode needs at least two existing orgs: with a
single org, committing the new member onto the ops channel makes the majority
endorsement policy unsatisfiable until the new org's nodes are up, which is
exactly how a real network would block.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from . import configtx as ctx_lib
from .agent import FailureRule
from .canonical import canonical_json
from .costmodel import (
    SCENARIO_ADD_ORG,
    SCENARIO_DEPLOY_CC,
    CostParams,
    measured_compare,
)
from .repository import SourceRef, synthesize_package
from .runtime import OpsRuntime
from .simnet.genesis import SYSTEM_CHANNEL
from .simnet.types import ChaincodeDefinition, SimnetError

MODE_CONVENTIONAL = "conventional"
MODE_OPSSC = "opssc"
MODES = (MODE_CONVENTIONAL, MODE_OPSSC)

SCENARIO_NAMES = {"add-org": SCENARIO_ADD_ORG, "deploy-cc": SCENARIO_DEPLOY_CC}


class ScenarioError(SimnetError):
    """A scenario step failed; carries the failing step id."""

    def __init__(self, step: str, detail: str):
        super().__init__(f"{step}: {detail}")
        self.step = step
        self.detail = detail


@dataclass
class ActionCounter:
    """Administrator actions by step id and by acting org."""

    by_step: dict[str, int] = field(default_factory=dict)
    by_org: dict[str, int] = field(default_factory=dict)

    def record(self, step_id: str, org_id: str) -> None:
        self.by_step[step_id] = self.by_step.get(step_id, 0) + 1
        self.by_org[org_id] = self.by_org.get(org_id, 0) + 1


@dataclass
class ScenarioReport:
    scenario: str
    mode: str
    params: CostParams
    seed: int
    success: bool
    failure_detail: str | None
    action_counts: dict[str, int]
    actions_by_org: dict[str, int]
    proposal_ids: list[str]
    proposal_statuses: dict[str, str]
    block_heights: dict[str, int]
    state_digest: str
    app_system_digest: str  # digest without the ops channel, for cross-mode checks
    new_org: str | None
    comparison: dict

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "mode": self.mode,
            "params": {"n": self.params.n, "ch": self.params.ch, "cc": self.params.cc},
            "seed": self.seed,
            "success": self.success,
            "failure_detail": self.failure_detail,
            "action_counts": self.action_counts,
            "actions_by_org": self.actions_by_org,
            "proposal_ids": self.proposal_ids,
            "proposal_statuses": self.proposal_statuses,
            "block_heights": self.block_heights,
            "state_digest": self.state_digest,
            "app_system_digest": self.app_system_digest,
            "new_org": self.new_org,
            "comparison": self.comparison,
        }


def _app_system_digest(net) -> str:
    selected = [c for c, ch in net.channels.items() if ch.config.kind != "ops"]
    return net.state_digest(selected)


def parse_failure_spec(spec: str) -> tuple[str, str, FailureRule]:
    """Parse task@org@attempt into (task, org, rule)."""
    try:
        task, org, attempt = spec.split("@")
        return task, org, FailureRule(task=task, attempt=int(attempt))
    except ValueError:
        raise ValueError(f"failure spec must be task@org@attempt, got {spec!r}") from None


def run_scenario(
    scenario: str,
    mode: str,
    params: CostParams,
    seed: int,
    failure_specs: tuple[str, ...] = (),
) -> ScenarioReport:
    report, _ = run_scenario_with_runtime(scenario, mode, params, seed, failure_specs)
    return report


def run_scenario_with_runtime(
    scenario: str,
    mode: str,
    params: CostParams,
    seed: int,
    failure_specs: tuple[str, ...] = (),
) -> tuple[ScenarioReport, OpsRuntime]:
    """Like run_scenario, but also returns the runtime for state inspection."""
    scenario = SCENARIO_NAMES.get(scenario, scenario)
    if scenario not in (SCENARIO_ADD_ORG, SCENARIO_DEPLOY_CC):
        raise ValueError(f"unknown scenario {scenario!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    failures: dict[str, list[FailureRule]] = {}
    for spec in failure_specs:
        task, org, rule = parse_failure_spec(spec)
        failures.setdefault(org, []).append(rule)
    if mode == MODE_CONVENTIONAL and failures:
        raise ValueError("failure injection applies to workflow (opssc) mode only")
    if scenario == SCENARIO_ADD_ORG:
        return _run_add_org(mode, params, seed, failures)
    return _run_deploy_cc(mode, params, seed, failures)


# -- scenario 1: add an organization -------------------------------------------


def _add_org_spec_ops(org, kind: str) -> list[dict]:
    ops = [
        {"kind": "add_org", "org_id": org.org_id, "msp_descriptor": org.msp_descriptor},
    ]
    if org.has_orderer:
        ops.append(
            {"kind": "add_orderer_org", "org_id": org.org_id, "msp_descriptor": org.msp_descriptor}
        )
    if kind == "system":
        ops.append(
            {
                "kind": "add_consortium_org",
                "org_id": org.org_id,
                "msp_descriptor": org.msp_descriptor,
            }
        )
    return ops


def _run_add_org(
    mode: str, params: CostParams, seed: int, failures: dict[str, list[FailureRule]]
) -> tuple[ScenarioReport, OpsRuntime]:
    runtime = OpsRuntime.standard(
        params.n, params.ch, params.cc, seed, with_agents=(mode == MODE_OPSSC)
    )
    for org_id, rules in failures.items():
        if org_id in runtime.agents:
            runtime.agents[org_id].config.failure_rules = tuple(rules)
    net = runtime.network
    counter = ActionCounter()
    new_org_id = f"org{params.n + 1}"
    first = net.spec.orgs[0].id
    voters = [o.id for o in net.spec.orgs[1:]]
    proposal_ids: list[str] = []
    statuses: dict[str, str] = {}
    failure_detail = None
    success = True

    try:
        # the new org prepares its identity and hands it to an existing org
        new_org = net.synthesize_org(new_org_id)
        counter.record("launch-ca", new_org_id)
        counter.record("issue-keys", new_org_id)
        counter.record("send-msp", new_org_id)

        if mode == MODE_OPSSC:
            if params.n < 2:
                raise ScenarioError("propose-update", "workflow mode needs n >= 2")
            admin = runtime.admin(first)
            channels = list(net.channels)  # system, ops, apps: CH+2 proposals
            for channel_id in channels:
                kind = net.fetch_config_block(channel_id).kind
                proposal = admin.create_channel_proposal(
                    channel_id, f"add {new_org_id}", _add_org_spec_ops(new_org, kind)
                )
                counter.record("propose-update", first)
                proposal_ids.append(proposal["proposal_id"])
            for pid in proposal_ids:
                for voter in voters:
                    if admin.get_channel_proposal(pid)["status"] != "proposed":
                        break
                    runtime.admin(voter).vote_channel_proposal(pid)
                    counter.record("vote-update", voter)
            for pid in proposal_ids:
                status = admin.get_channel_proposal(pid)["status"]
                statuses[pid] = status
                if status != "committed":
                    raise ScenarioError("vote-update", f"proposal {pid} ended {status}")
            counter.record("share-genesis", first)
            net.launch_org(new_org)
            counter.record("launch-nodes", new_org_id)
            agent = runtime.add_agent(new_org_id, tuple(failures.get(new_org_id, [])))
            agent.bootstrap()
            runtime.pump()
            counter.record("launch-agent", new_org_id)
        else:
            channels = [SYSTEM_CHANNEL] + [
                c for c, ch in net.channels.items() if ch.config.kind == "application"
            ]
            signer_count = params.n // 2  # remaining orgs beyond the proposer
            for channel_id in channels:
                base = net.fetch_config_block(channel_id)
                ops = [
                    ctx_lib.ConfigOp.from_json(op)
                    for op in _add_org_spec_ops(new_org, base.kind)
                ]
                update = ctx_lib.compute_update(base, ops)
                signatures = [ctx_lib.sign_update(net.orgs[first].identity, update)]
                counter.record("create-configtx", first)
                counter.record("share-configtx", first)
                for signer in voters[:signer_count]:
                    signatures.append(ctx_lib.sign_update(net.orgs[signer].identity, update))
                    counter.record("sign-configtx", signer)
                    counter.record("share-signature", signer)
                keys = {s.org_id: net.public_keys[s.org_id] for s in signatures}
                envelope = ctx_lib.assemble_envelope(update, signatures, keys)
                net.apply_config_envelope(channel_id, envelope)
                counter.record("update-channel", first)
            counter.record("share-genesis", first)
            net.launch_org(new_org)
            counter.record("launch-nodes", new_org_id)
            for channel_id in channels:
                net.join_peer(new_org_id, channel_id)
                counter.record("join-channels", new_org_id)
            for channel_id in channels:
                if net.channels[channel_id].config.kind != "application":
                    continue
                for name in sorted(
                    n.removeprefix("committed/")
                    for n in net.channels[channel_id].world.get("_lifecycle", {})
                    if n.startswith("committed/")
                ):
                    state = net.lifecycle_state(channel_id, name)
                    definition = state.committed_definition
                    package = runtime.repo.resolve(definition.source_ref)
                    counter.record("download-cc", new_org_id)
                    net.install_package(new_org_id, channel_id, package)
                    counter.record("install-cc", new_org_id)
                    net.approve_definition(new_org_id, channel_id, definition)
                    counter.record("approve-cc", new_org_id)

        _check_add_org_postconditions(runtime, new_org_id, mode)
    except ScenarioError as exc:
        success, failure_detail = False, str(exc)
    except (SimnetError, ctx_lib.ConfigOpError) as exc:
        success, failure_detail = False, str(exc)

    method = "proposed" if mode == MODE_OPSSC else "conventional"
    report = ScenarioReport(
        scenario=SCENARIO_ADD_ORG,
        mode=mode,
        params=params,
        seed=seed,
        success=success,
        failure_detail=failure_detail,
        action_counts=dict(sorted(counter.by_step.items())),
        actions_by_org=dict(sorted(counter.by_org.items())),
        proposal_ids=proposal_ids,
        proposal_statuses=statuses,
        block_heights={c: net.height(c) for c in net.channels},
        state_digest=net.state_digest(),
        app_system_digest=_app_system_digest(net),
        new_org=new_org_id,
        comparison=measured_compare(counter.by_step, SCENARIO_ADD_ORG, method, params),
    )
    return report, runtime


def _check_add_org_postconditions(runtime: OpsRuntime, new_org_id: str, mode: str) -> None:
    net = runtime.network
    channels = [
        channel_id
        for channel_id, ch in net.channels.items()
        if mode == MODE_OPSSC or ch.config.kind != "ops"
    ]
    for channel_id in channels:
        config = net.fetch_config_block(channel_id)
        if new_org_id not in config.member_orgs:
            raise ScenarioError("postcondition", f"{new_org_id} not a member of {channel_id}")
        if new_org_id not in net.channels[channel_id].joined:
            raise ScenarioError("postcondition", f"{new_org_id} not joined to {channel_id}")
        if config.kind != "application":
            continue
        world = net.channels[channel_id].world.get("_lifecycle", {})
        for key in world:
            if not key.startswith("committed/"):
                continue
            name = key.removeprefix("committed/")
            state = net.lifecycle_state(channel_id, name)
            if state.approvals.get(new_org_id) != state.committed_definition:
                raise ScenarioError(
                    "postcondition", f"{new_org_id} approval missing for {name} on {channel_id}"
                )
            if not state.installs.get(new_org_id):
                raise ScenarioError(
                    "postcondition", f"{new_org_id} install missing for {name} on {channel_id}"
                )


# -- scenario 2: deploy chaincodes ----------------------------------------------


def _new_chaincode(index: int, seed: int) -> ChaincodeDefinition:
    name = f"newcc-{index}"
    return ChaincodeDefinition(
        name=name,
        version="1.0",
        sequence=1,
        source_ref=SourceRef(
            repository_url=f"https://git.invalid/{name}",
            commit_id=f"rev-{seed}",
            path=name,
        ),
    )


def _run_deploy_cc(
    mode: str, params: CostParams, seed: int, failures: dict[str, list[FailureRule]]
) -> tuple[ScenarioReport, OpsRuntime]:
    n_channels = max(params.ch, 1)  # the target channel must exist
    runtime = OpsRuntime.standard(
        params.n, n_channels, 0, seed, with_agents=(mode == MODE_OPSSC)
    )
    for org_id, rules in failures.items():
        if org_id in runtime.agents:
            runtime.agents[org_id].config.failure_rules = tuple(rules)
    net = runtime.network
    counter = ActionCounter()
    first = net.spec.orgs[0].id
    voters = [o.id for o in net.spec.orgs[1:]]
    target = next(c for c, ch in net.channels.items() if ch.config.kind == "application")
    proposal_ids: list[str] = []
    statuses: dict[str, str] = {}
    failure_detail = None
    success = True

    try:
        for index in range(1, params.cc + 1):
            definition = _new_chaincode(index, seed)
            runtime.repo.put(
                definition.source_ref,
                synthesize_package(definition.name, definition.version),
            )
            if mode == MODE_OPSSC:
                admin = runtime.admin(first)
                proposal = admin.create_chaincode_proposal(target, definition.to_json())
                counter.record("propose-cc", first)
                pid = proposal["proposal_id"]
                proposal_ids.append(pid)
                for voter in voters:
                    if admin.get_chaincode_proposal(pid)["status"] != "proposed":
                        break
                    runtime.admin(voter).vote_chaincode_proposal(pid, "for")
                    counter.record("vote-cc", voter)
                status = admin.get_chaincode_proposal(pid)["status"]
                statuses[pid] = status
                if status != "committed":
                    raise ScenarioError("vote-cc", f"proposal {pid} ended {status}")
            else:
                counter.record("share-cc-info", first)
                package = runtime.repo.resolve(definition.source_ref)
                for org in [first] + voters:
                    runtime.repo.resolve(definition.source_ref)
                    counter.record("download-cc", org)
                    net.install_package(org, target, package)
                    counter.record("install-cc", org)
                    net.approve_definition(org, target, definition)
                    counter.record("approve-cc", org)
                net.commit_definition(first, target, definition)
                counter.record("commit-cc", first)
            _check_deploy_postconditions(net, target, definition)
    except ScenarioError as exc:
        success, failure_detail = False, str(exc)
    except (SimnetError, ctx_lib.ConfigOpError) as exc:
        success, failure_detail = False, str(exc)

    method = "proposed" if mode == MODE_OPSSC else "conventional"
    report = ScenarioReport(
        scenario=SCENARIO_DEPLOY_CC,
        mode=mode,
        params=params,
        seed=seed,
        success=success,
        failure_detail=failure_detail,
        action_counts=dict(sorted(counter.by_step.items())),
        actions_by_org=dict(sorted(counter.by_org.items())),
        proposal_ids=proposal_ids,
        proposal_statuses=statuses,
        block_heights={c: net.height(c) for c in net.channels},
        state_digest=net.state_digest(),
        app_system_digest=_app_system_digest(net),
        new_org=None,
        comparison=measured_compare(counter.by_step, SCENARIO_DEPLOY_CC, method, params),
    )
    return report, runtime


def _check_deploy_postconditions(net, channel_id: str, definition: ChaincodeDefinition) -> None:
    state = net.lifecycle_state(channel_id, definition.name)
    if state.committed_definition != definition:
        raise ScenarioError("postcondition", f"{definition.name} not committed as proposed")
    members = net.fetch_config_block(channel_id).member_orgs
    for org in members:
        if not state.installs.get(org):
            raise ScenarioError("postcondition", f"{org} did not install {definition.name}")
        if state.approvals.get(org) != definition:
            raise ScenarioError("postcondition", f"{org} approval mismatch for {definition.name}")


# -- result emission --------------------------------------------------------------


def _cell(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{float(value):g}"


def sweep_csv(rows: list[dict]) -> str:
    """Render sweep rows as CSV; exact where integral, 6 decimals for ratios."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "conventional", "proposed", "reduction"])
    for row in rows:
        writer.writerow(
            [
                row["x"],
                _cell(row["conventional"]),
                _cell(row["proposed"]),
                f"{float(row['reduction']):.6f}",
            ]
        )
    return out.getvalue()


def emit_results(payload, path: str) -> None:
    """Write a scenario report (canonical JSON) or sweep rows (CSV) to a file."""
    if isinstance(payload, ScenarioReport):
        text = canonical_json(payload.to_json()) + "\n"
    elif isinstance(payload, list):
        text = sweep_csv(payload)
    elif isinstance(payload, dict):
        text = canonical_json(payload) + "\n"
    else:
        raise TypeError(f"cannot emit {type(payload).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
