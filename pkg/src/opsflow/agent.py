"""Per-organization operations agent.

An agent watches the ops channel for workflow events and executes the
instructed node operations against its own organization's peers only,
registering every outcome back on-chain. It also bootstraps a newly added
organization: join the ops channel, deploy the embedded workflow contracts,
join every channel the org belongs to, and catch up on committed chaincodes.

Agents are event-driven state machines advanced by explicit ``poll`` calls
(the runtime pumps them after every block), which keeps runs deterministic
while preserving the observable behavior of free-running daemons.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import configtx as ctx_lib
from .canonical import digest_raw
from .opssc import chaincode_ops, channel_ops
from .opssc.common import APPROVED, OperationsEvent
from .repository import RepositoryStore, UnknownSourceError, synthesize_package
from .selection import ExecutorsExhaustedError, select_executor  # re-exported
from .simnet.genesis import OPS_CHANNEL
from .simnet.network import Network
from .simnet.types import (
    ChaincodeDefinition,
    ChaincodeError,
    ConfigRejectedError,
    NotMemberError,
    SimnetError,
)

__all__ = ["Agent", "AgentConfig", "FailureRule", "select_executor", "ExecutorsExhaustedError"]

# Workflow contracts every agent ships with for bootstrapping a new org.
EMBEDDED_CONTRACTS = (
    (channel_ops.NAMESPACE, channel_ops.VERSION),
    (chaincode_ops.NAMESPACE, chaincode_ops.VERSION),
)

# One local retry before a task failure is reported as terminal.
RETRY_BUDGET = 1


@dataclass(frozen=True)
class FailureRule:
    """Inject a failure for ``task`` on the agent's n-th attempt (0-based)."""

    task: str
    attempt: int

    def matches(self, task: str, attempt: int) -> bool:
        return self.task == task and self.attempt == attempt


@dataclass
class AgentConfig:
    org_id: str
    failure_rules: tuple[FailureRule, ...] = ()
    ops_channel_id: str = OPS_CHANNEL


class Agent:
    """Operations agent of one organization."""

    def __init__(self, network: Network, repo: RepositoryStore, config: AgentConfig):
        self.network = network
        self.repo = repo
        self.config = config
        self.org_id = config.org_id
        self.cursor = 0  # next ops-channel block to process
        self._attempts: dict[tuple[str, str], int] = {}

    # -- event loop ----------------------------------------------------------

    def poll(self) -> bool:
        """Process pending ops-channel events; returns True if any were handled."""
        channel = self.network.channels.get(self.config.ops_channel_id)
        if channel is None or self.org_id not in channel.joined:
            return False
        handled = False
        while self.cursor < len(channel.blocks):
            block = channel.blocks[self.cursor]
            self.cursor += 1
            for raw in block.events:
                event = OperationsEvent.from_event(raw)
                if event is not None:
                    self.handle_event(event)
                    handled = True
        return handled

    def handle_event(self, event: OperationsEvent) -> None:
        if event.event_kind == "update_channel":
            if event.executor == self.org_id:
                self._execute_channel_update(event)
        elif event.event_kind == "deploy":
            self._execute_deploy(event)
        elif event.event_kind == "commit":
            if event.executor == self.org_id:
                self._execute_commit(event)
        elif event.event_kind == "config_updated":
            self.catch_up()

    def _next_attempt(self, proposal_id: str, task: str) -> int:
        key = (proposal_id, task)
        attempt = self._attempts.get(key, 0)
        self._attempts[key] = attempt + 1
        return attempt

    def _injected(self, proposal_id: str, task: str) -> bool:
        attempt = self._next_attempt(proposal_id, task)
        return any(rule.matches(task, attempt) for rule in self.config.failure_rules)

    # -- channel update execution --------------------------------------------

    def _execute_channel_update(self, event: OperationsEvent) -> None:
        ops = self.config.ops_channel_id
        proposal = self.network.query(
            ops, channel_ops.NAMESPACE, "get_proposal", {"proposal_id": event.proposal_id}
        )
        if proposal["status"] != APPROVED or proposal["executor"] != self.org_id:
            return
        ok, detail = False, ""
        if self._injected(event.proposal_id, "update_channel"):
            detail = "injected failure"
        else:
            try:
                update = ctx_lib.ConfigUpdate.from_json(proposal["compiled_update"])
                signatures = [
                    ctx_lib.ConfigSignature(org_id=org, signature=sig)
                    for org, sig in sorted(proposal["votes"].items())
                ]
                keys = {
                    org: self.network.query(
                        ops, channel_ops.NAMESPACE, "get_org", {"org_id": org}
                    )["public_key"]
                    for org in proposal["votes"]
                }
                envelope = ctx_lib.assemble_envelope(update, signatures, keys)
                self.network.apply_config_envelope(proposal["target_channel_id"], envelope)
                ok = True
            except (ConfigRejectedError, ctx_lib.SignatureInvalidError, SimnetError) as exc:
                detail = str(exc)
        self._register(
            channel_ops.NAMESPACE,
            "register_result",
            {
                "proposal_id": event.proposal_id,
                "task": "update_channel",
                "ok": ok,
                "detail": detail,
            },
        )

    # -- chaincode deployment ------------------------------------------------

    def _execute_deploy(self, event: OperationsEvent) -> None:
        ops = self.config.ops_channel_id
        proposal = self.network.query(
            ops, chaincode_ops.NAMESPACE, "get_proposal", {"proposal_id": event.proposal_id}
        )
        if proposal["status"] != APPROVED or self.org_id not in proposal["electorate"]:
            return
        definition = ChaincodeDefinition.from_json(proposal["definition"])
        channel_id = proposal["channel_id"]
        package: bytes | None = None

        def download() -> None:
            nonlocal package
            assert definition.source_ref is not None
            package = self.repo.resolve(definition.source_ref)

        def install() -> None:
            assert package is not None
            self.network.install_package(self.org_id, channel_id, package)

        def approve() -> None:
            self.network.approve_definition(self.org_id, channel_id, definition)

        for task, action in (("download", download), ("install", install), ("approve", approve)):
            if not self._run_with_retry(event.proposal_id, task, action):
                return

    def _run_with_retry(self, proposal_id: str, task: str, action) -> bool:
        """Run one deploy task with the local retry budget, registering outcomes."""
        for local_try in range(RETRY_BUDGET + 1):
            ok, detail = True, ""
            if self._injected(proposal_id, task):
                ok, detail = False, "injected failure"
            else:
                try:
                    action()
                except (UnknownSourceError, ChaincodeError, SimnetError) as exc:
                    ok, detail = False, str(exc)
            terminal = not ok and local_try == RETRY_BUDGET
            registered = self._register(
                chaincode_ops.NAMESPACE,
                "register_deploy_result",
                {
                    "proposal_id": proposal_id,
                    "task": task,
                    "ok": ok,
                    "detail": detail,
                    "terminal": terminal,
                },
            )
            if not registered:
                return False
            if ok:
                return True
        return False

    def _execute_commit(self, event: OperationsEvent) -> None:
        ops = self.config.ops_channel_id
        proposal = self.network.query(
            ops, chaincode_ops.NAMESPACE, "get_proposal", {"proposal_id": event.proposal_id}
        )
        if proposal["status"] != "acknowledged" or proposal["executor"] != self.org_id:
            return
        definition = ChaincodeDefinition.from_json(proposal["definition"])
        ok, detail = False, ""
        if self._injected(event.proposal_id, "commit"):
            detail = "injected failure"
        else:
            try:
                self.network.commit_definition(self.org_id, proposal["channel_id"], definition)
                ok = True
            except (ChaincodeError, SimnetError) as exc:
                detail = str(exc)
        self._register(
            chaincode_ops.NAMESPACE,
            "register_commit_result",
            {"proposal_id": event.proposal_id, "ok": ok, "detail": detail},
        )

    def _register(self, namespace: str, op: str, args: dict) -> bool:
        """Report a result on-chain; False when the workflow moved on already."""
        try:
            self.network.invoke(self.config.ops_channel_id, namespace, op, args, self.org_id)
            return True
        except ChaincodeError:
            return False

    # -- bootstrapping ---------------------------------------------------------

    def bootstrap(self) -> None:
        """Catch a newly added org up with the network; idempotent.

        Requires the org to already be a member of the ops channel per the
        committed configuration.
        """
        ops = self.config.ops_channel_id
        config = self.network.fetch_config_block(ops)
        if self.org_id not in config.member_orgs:
            raise NotMemberError(f"{self.org_id} is not yet a member of {ops}")
        self.network.join_peer(self.org_id, ops)
        self.cursor = len(self.network.channels[ops].blocks)
        for name, version in EMBEDDED_CONTRACTS:
            self._deploy_local(ops, name, synthesize_package(name, version))
        self.catch_up()

    def _deploy_local(self, channel_id: str, name: str, package: bytes) -> None:
        """Install a locally available package and approve the committed definition."""
        state = self.network.lifecycle_state(channel_id, name)
        if state.committed_definition is None:
            return
        installed = state.installs.get(self.org_id, ())
        if digest_raw(package) not in installed:
            self.network.install_package(self.org_id, channel_id, package)
        if state.approvals.get(self.org_id) != state.committed_definition:
            self.network.approve_definition(self.org_id, channel_id, state.committed_definition)

    def catch_up(self) -> None:
        """Join all channels this org belongs to and deploy their chaincodes."""
        ops = self.config.ops_channel_id
        channel = self.network.channels.get(ops)
        if channel is None or self.org_id not in channel.joined:
            return
        inventory = self.network.query(ops, channel_ops.NAMESPACE, "list_channels", {})
        for entry in inventory:
            if self.org_id not in entry["member_orgs"]:
                continue
            channel_id = entry["channel_id"]
            if self.org_id not in self.network.channels[channel_id].joined:
                self.network.join_peer(self.org_id, channel_id)
            for record in self.network.query(
                ops, chaincode_ops.NAMESPACE, "list_chaincodes", {"channel_id": channel_id}
            ):
                definition = ChaincodeDefinition.from_json(record["definition"])
                try:
                    package = self.repo.resolve(definition.source_ref)
                except UnknownSourceError:
                    continue
                self._deploy_local(channel_id, definition.name, package)
