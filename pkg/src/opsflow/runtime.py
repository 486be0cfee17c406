"""Assembled operations stack: network, workflow contracts, agents.

``OpsRuntime.build`` creates the simulated network, deploys the two workflow
contracts on the ops channel, seeds the on-chain inventories, registers the
chaincode sources, and starts one agent per genesis org. ``pump`` advances all
agents to quiescence after each mutation; because agents are polled in sorted
org order, a whole run is a deterministic function of the genesis spec and the
sequence of admin calls.
"""

from __future__ import annotations

import threading

from . import configtx as ctx_lib
from .agent import Agent, AgentConfig, FailureRule
from .opssc import chaincode_ops, channel_ops
from .opssc.chaincode_ops import ChaincodeOpsContract
from .opssc.channel_ops import ChannelOpsContract
from .repository import RepositoryStore, genesis_source_ref, synthesize_package
from .simnet.genesis import OPS_CHANNEL, GenesisSpec
from .simnet.network import Network
from .simnet.types import ChaincodeDefinition, ChaincodeError, SimnetError

PUMP_ROUND_LIMIT = 64  # liveness guard: quiescence must arrive well before this


class PumpStalledError(SimnetError):
    """Agents kept producing work past the liveness bound."""


def contract_definition(name: str, version: str) -> ChaincodeDefinition:
    return ChaincodeDefinition(
        name=name, version=version, sequence=1, source_ref=genesis_source_ref(name, version)
    )


class OpsRuntime:
    """Network plus workflow contracts plus one agent per org."""

    def __init__(self, network: Network, repo: RepositoryStore):
        self.network = network
        self.repo = repo
        self.agents: dict[str, Agent] = {}
        self._lock = threading.RLock()

    # -- assembly ------------------------------------------------------------

    @classmethod
    def build(cls, spec: GenesisSpec, with_agents: bool = True) -> "OpsRuntime":
        network = Network.create(spec)
        repo = RepositoryStore()
        for gcc in spec.chaincodes:
            repo.put(
                genesis_source_ref(gcc.name, gcc.version),
                synthesize_package(gcc.name, gcc.version),
            )
        runtime = cls(network, repo)
        runtime._deploy_contracts()
        runtime._seed_inventories()
        if with_agents:
            for gorg in spec.orgs:
                runtime.add_agent(gorg.id)
        return runtime

    @classmethod
    def standard(
        cls, n_orgs: int, n_channels: int, n_chaincodes: int, seed: int, with_agents: bool = True
    ) -> "OpsRuntime":
        return cls.build(
            GenesisSpec.standard(n_orgs, n_channels, n_chaincodes, seed), with_agents
        )

    def _deploy_contracts(self) -> None:
        network = self.network
        network.register_native(ChannelOpsContract())
        network.register_native(ChaincodeOpsContract())
        for name, version in (
            (channel_ops.NAMESPACE, channel_ops.VERSION),
            (chaincode_ops.NAMESPACE, chaincode_ops.VERSION),
        ):
            definition = contract_definition(name, version)
            self.repo.put(definition.source_ref, synthesize_package(name, version))
            network.deploy_genesis_chaincode(OPS_CHANNEL, definition)

    def _seed_inventories(self) -> None:
        """Initialize on-chain state of both contracts from the genesis network."""
        network = self.network
        first = self.network.spec.orgs[0].id
        for contract in (channel_ops, chaincode_ops):
            network.invoke(
                OPS_CHANNEL, contract.NAMESPACE, "init", {"seed": network.seed}, first
            )
        for org in network.orgs.values():
            network.invoke(
                OPS_CHANNEL,
                channel_ops.NAMESPACE,
                "register_org",
                {"org_id": org.org_id, "msp_descriptor": org.msp_descriptor},
                first,
            )
        for channel_id, channel in network.channels.items():
            config = channel.config
            network.invoke(
                OPS_CHANNEL,
                channel_ops.NAMESPACE,
                "register_channel",
                {
                    "channel_id": channel_id,
                    "kind": config.kind,
                    "member_orgs": list(config.member_orgs),
                    "orderer_orgs": list(config.orderer_orgs),
                    "consortium_orgs": list(config.consortium_orgs),
                    "config_version": config.config_version,
                },
                first,
            )
        for gcc in network.spec.chaincodes:
            definition = ChaincodeDefinition(
                name=gcc.name,
                version=gcc.version,
                sequence=1,
                source_ref=genesis_source_ref(gcc.name, gcc.version),
            )
            network.invoke(
                OPS_CHANNEL,
                chaincode_ops.NAMESPACE,
                "bootstrap_chaincode",
                {"channel_id": gcc.channel, "definition": definition.to_json()},
                first,
            )

    def add_agent(self, org_id: str, failure_rules: tuple[FailureRule, ...] = ()) -> Agent:
        agent = Agent(self.network, self.repo, AgentConfig(org_id, failure_rules))
        self.agents[org_id] = agent
        return agent

    # -- agent pump ----------------------------------------------------------

    def pump(self) -> int:
        """Advance all agents until no one has pending work; returns rounds run."""
        with self._lock:
            rounds = 0
            while True:
                progressed = [a.poll() for _, a in sorted(self.agents.items())]
                rounds += 1
                if not any(progressed):
                    return rounds
                if rounds > PUMP_ROUND_LIMIT:
                    raise PumpStalledError(f"no quiescence after {rounds} pump rounds")

    def admin(self, org_id: str, auto_pump: bool = True) -> "AdminClient":
        return AdminClient(self, org_id, auto_pump)

    def start_pumper(self, interval: float = 0.25) -> threading.Event:
        """Run the agents on a background thread, like free-running daemons.

        Returns an event; set it to stop the thread. Used by serve mode so
        workflow progress is observable across polls instead of completing
        inside the mutating request.
        """
        stop = threading.Event()

        def loop() -> None:
            while not stop.wait(interval):
                self.pump()

        threading.Thread(target=loop, daemon=True).start()
        return stop


class AdminClient:
    """Administrator actions of one org; each mutation commits then pumps.

    This is the exact surface the REST API exposes; the scenario driver uses
    it directly so both paths count the same administrator actions. With
    ``auto_pump=False`` the agents are left to an external pumper (the serve
    mode runs them on a background thread, like the daemons they stand for).
    """

    def __init__(self, runtime: OpsRuntime, org_id: str, auto_pump: bool = True):
        self.runtime = runtime
        self.org_id = org_id
        self.auto_pump = auto_pump
        if org_id not in runtime.network.orgs:
            raise SimnetError(f"unknown org {org_id!r}")

    @property
    def _network(self) -> Network:
        return self.runtime.network

    def _identity(self):
        return self._network.orgs[self.org_id].identity

    def _invoke(self, namespace: str, op: str, args: dict) -> object:
        result = self._network.invoke(OPS_CHANNEL, namespace, op, args, self.org_id)
        if self.auto_pump:
            self.runtime.pump()
        return result

    def _query(self, namespace: str, op: str, args: dict) -> object:
        return self._network.query(OPS_CHANNEL, namespace, op, args)

    # -- channel workflow ------------------------------------------------------

    def create_channel_proposal(
        self, target_channel_id: str, description: str, spec_ops: list[dict]
    ) -> dict:
        """Request a channel update; compiles and signs the delta client-side."""
        base = self._network.fetch_config_block(target_channel_id)
        ops = [ctx_lib.ConfigOp.from_json(op) for op in spec_ops]
        compiled = ctx_lib.compute_update(base, ops)
        signature = self._identity().sign(compiled.to_json())
        return self._invoke(
            channel_ops.NAMESPACE,
            "request_proposal",
            {
                "target_channel_id": target_channel_id,
                "description": description,
                "spec": spec_ops,
                "base_config": base.to_json(),
                "signature": signature,
            },
        )

    def vote_channel_proposal(self, proposal_id: str) -> dict:
        proposal = self._query(
            channel_ops.NAMESPACE, "get_proposal", {"proposal_id": proposal_id}
        )
        update = ctx_lib.ConfigUpdate.from_json(proposal["compiled_update"])
        signature = self._identity().sign(update.to_json())
        return self._invoke(
            channel_ops.NAMESPACE,
            "vote",
            {"proposal_id": proposal_id, "signature": signature},
        )

    def get_channel_proposal(self, proposal_id: str) -> dict:
        return self._query(channel_ops.NAMESPACE, "get_proposal", {"proposal_id": proposal_id})

    def list_channel_proposals(self) -> list:
        return self._query(channel_ops.NAMESPACE, "list_proposals", {})

    def list_channels(self) -> list:
        return self._query(channel_ops.NAMESPACE, "list_channels", {})

    def get_channel_info(self, channel_id: str) -> dict:
        return self._query(channel_ops.NAMESPACE, "get_channel_info", {"channel_id": channel_id})

    # -- chaincode workflow ------------------------------------------------------

    def create_chaincode_proposal(self, channel_id: str, definition: dict) -> dict:
        return self._invoke(
            chaincode_ops.NAMESPACE,
            "request_proposal",
            {"channel_id": channel_id, "definition": definition},
        )

    def vote_chaincode_proposal(self, proposal_id: str, decision: str) -> dict:
        return self._invoke(
            chaincode_ops.NAMESPACE,
            "vote",
            {"proposal_id": proposal_id, "decision": decision},
        )

    def get_chaincode_proposal(self, proposal_id: str) -> dict:
        return self._query(chaincode_ops.NAMESPACE, "get_proposal", {"proposal_id": proposal_id})

    def list_chaincode_proposals(self) -> list:
        return self._query(chaincode_ops.NAMESPACE, "list_proposals", {})

    # -- cross-workflow reads ------------------------------------------------

    def find_proposal(self, proposal_id: str) -> dict | None:
        for namespace in (channel_ops.NAMESPACE, chaincode_ops.NAMESPACE):
            try:
                return self._query(namespace, "get_proposal", {"proposal_id": proposal_id})
            except ChaincodeError:
                continue
        return None

    def proposal_history(self, proposal_id: str) -> list:
        """Task records and votes of a proposal, in block order."""
        proposal = self.find_proposal(proposal_id)
        if proposal is None:
            return []
        return sorted(proposal["history"], key=lambda r: r["block_number"])
