"""In-process simulation of a consortium blockchain network.

The network holds organizations, channels (each with its own ledger, world
state, and configuration), and chaincode handlers registered by namespace.
All mutations pass through a single sequencer appending one transaction per
block, so a run is a deterministic function of the genesis spec plus the
sequence of submitted transactions. Everything that contributes to the state
digest is carried inside blocks, which makes the exported block log sufficient
to rebuild an identical network (``Network.replay``).
"""

from __future__ import annotations

import threading
from typing import Iterable, Iterator, Protocol

from .. import configtx as ctx_lib
from ..canonical import canonical_json, decode_bytes, digest, digest_raw, encode_bytes
from ..identity import OrgIdentity, msp_descriptor, verify
from ..repository import genesis_source_ref
from .genesis import GenesisSpec
from .types import (
    VALID,
    Block,
    ChaincodeDefinition,
    ChaincodeError,
    ChaincodeEvent,
    ChannelConfig,
    ConfigRejectedError,
    Endorsement,
    InvalidTransactionError,
    LifecycleState,
    MalformedTransactionError,
    NodeOperation,
    NotMemberError,
    Org,
    Receipt,
    SimnetError,
    Transaction,
    UnknownChannelError,
    invalid,
    majority,
)

GENESIS_PARENT = "0" * 64
LIFECYCLE_NS = "_lifecycle"

_DELETED = object()


class ReplayError(SimnetError):
    """Recorded block log diverges from deterministic re-execution."""


class Channel:
    """Per-channel ledger, configuration, and world state."""

    def __init__(self, channel_id: str):
        self.channel_id = channel_id
        self.config: ChannelConfig | None = None
        self.blocks: list[Block] = []
        self.world: dict[str, dict[str, object]] = {}
        self.joined: set[str] = set()

    @property
    def height(self) -> int:
        return len(self.blocks) - 1

    def state_view(self) -> dict:
        return {
            "config": self.config.to_json() if self.config else None,
            "blocks": [b.to_json() for b in self.blocks],
            "world": self.world,
        }


class HandlerContext:
    """Execution context handed to a chaincode handler.

    Writes are buffered and only applied when the transaction succeeds; reads
    see the handler's own pending writes. Cross-namespace calls are read-only
    and stay on the same channel.
    """

    def __init__(
        self,
        network: "Network",
        channel: Channel,
        namespace: str,
        creator: str | None,
        block_number: int,
        readonly: bool,
        writes: dict[tuple[str, str], object] | None = None,
    ):
        self._network = network
        self._channel = channel
        self.namespace = namespace
        self.creator = creator
        self.block_number = block_number
        self.readonly = readonly
        self._writes: dict[tuple[str, str], object] = writes if writes is not None else {}
        self.events: list[ChaincodeEvent] = []

    @property
    def channel_id(self) -> str:
        return self._channel.channel_id

    @property
    def member_orgs(self) -> tuple[str, ...]:
        assert self._channel.config is not None
        return self._channel.config.member_orgs

    def get(self, key: str, namespace: str | None = None) -> object:
        ns = namespace or self.namespace
        if (ns, key) in self._writes:
            value = self._writes[(ns, key)]
            return None if value is _DELETED else value
        return self._channel.world.get(ns, {}).get(key)

    def keys(self, prefix: str = "", namespace: str | None = None) -> list[str]:
        ns = namespace or self.namespace
        stored = set(self._channel.world.get(ns, {}))
        for (wns, key), value in self._writes.items():
            if wns != ns:
                continue
            if value is _DELETED:
                stored.discard(key)
            else:
                stored.add(key)
        return sorted(k for k in stored if k.startswith(prefix))

    def put(self, key: str, value: object) -> None:
        if self.readonly:
            raise ChaincodeError("state writes are not allowed in queries")
        self._writes[(self.namespace, key)] = value

    def delete(self, key: str) -> None:
        if self.readonly:
            raise ChaincodeError("state writes are not allowed in queries")
        self._writes[(self.namespace, key)] = _DELETED

    def emit(self, name: str, payload: dict) -> None:
        if self.readonly:
            raise ChaincodeError("events are not allowed in queries")
        self.events.append(ChaincodeEvent(namespace=self.namespace, name=name, payload=payload))

    def call(self, namespace: str, op: str, args: dict) -> object:
        """Read-only call into another chaincode on the same channel."""
        handler = self._network._resolve_handler(self._channel, namespace)
        sub = HandlerContext(
            self._network,
            self._channel,
            namespace,
            self.creator,
            self.block_number,
            readonly=True,
            writes=self._writes,
        )
        return handler.query(sub, op, args)


class ChaincodeHandler(Protocol):
    NAMESPACE: str

    def invoke(self, ctx: HandlerContext, op: str, args: dict) -> object: ...

    def query(self, ctx: HandlerContext, op: str, args: dict) -> object: ...


class KVHandler:
    """Generic key-value chaincode standing in for application logic."""

    NAMESPACE = "_kv"

    def invoke(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "put":
            ctx.put(args["key"], args["value"])
            return {"key": args["key"]}
        if op == "delete":
            ctx.delete(args["key"])
            return {"key": args["key"]}
        if op == "emit":
            # test hook: emit an arbitrary application event
            ctx.emit(args["name"], args.get("payload", {}))
            return {"emitted": args["name"]}
        raise ChaincodeError(f"unknown op {op!r}")

    def query(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "get":
            return ctx.get(args["key"])
        raise ChaincodeError(f"unknown query {op!r}")


class LifecycleHandler:
    """Chaincode deployment lifecycle: install, per-org approve, commit.

    State layout (namespace ``_lifecycle``):
      installs/{org}           -> sorted list of package digests on this channel
      approvals/{name}/{org}   -> approved definition
      committed/{name}         -> committed definition
    """

    NAMESPACE = LIFECYCLE_NS

    def invoke(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "install":
            package = decode_bytes(args["package"])
            pkg_digest = digest_raw(package)
            key = f"installs/{ctx.creator}"
            digests = list(ctx.get(key) or [])
            if pkg_digest not in digests:
                digests = sorted(digests + [pkg_digest])
                ctx.put(key, digests)
            return {"package_digest": pkg_digest}
        if op == "approve":
            definition = self._definition(args)
            ctx.put(f"approvals/{definition.name}/{ctx.creator}", definition.to_json())
            return definition.to_json()
        if op == "commit":
            return self._commit(ctx, self._definition(args))
        raise ChaincodeError(f"unknown op {op!r}")

    def query(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "committed":
            return ctx.get(f"committed/{args['name']}")
        if op == "installed":
            return ctx.get(f"installs/{args['org_id']}") or []
        raise ChaincodeError(f"unknown query {op!r}")

    def _definition(self, args: dict) -> ChaincodeDefinition:
        try:
            definition = ChaincodeDefinition.from_json(args["definition"])
        except (KeyError, TypeError) as exc:
            raise ChaincodeError(f"malformed definition: {exc}") from None
        if definition.sequence < 1:
            raise ChaincodeError("definition sequence must be >= 1")
        return definition

    def _commit(self, ctx: HandlerContext, definition: ChaincodeDefinition) -> object:
        committed = ctx.get(f"committed/{definition.name}")
        expected = (committed["sequence"] + 1) if committed else 1
        if definition.sequence != expected:
            raise ChaincodeError(
                f"wrong sequence: expected {expected}, got {definition.sequence}"
            )
        members = ctx.member_orgs
        matches = 0
        for org in members:
            approval = ctx.get(f"approvals/{definition.name}/{org}")
            if approval == definition.to_json():
                matches += 1
        needed = majority(len(members))
        if matches < needed:
            raise ChaincodeError(
                f"insufficient exact-match approvals: {matches} of {needed} required"
            )
        ctx.put(f"committed/{definition.name}", definition.to_json())
        ctx.emit(
            "chaincode_committed",
            {"channel_id": ctx.channel_id, "definition": definition.to_json()},
        )
        return definition.to_json()


class Network:
    """The simulated network; all mutations pass through ``submit``."""

    def __init__(self, spec: GenesisSpec):
        spec.validate()
        self.spec = spec
        self.seed = spec.seed
        self.orgs: dict[str, Org] = {}
        self.public_keys: dict[str, str] = {}
        self.channels: dict[str, Channel] = {}
        self.node_ops: list[NodeOperation] = []
        self._native: dict[str, ChaincodeHandler] = {LIFECYCLE_NS: LifecycleHandler()}
        self._kv = KVHandler()
        self._lock = threading.RLock()

    # -- construction ------------------------------------------------------

    @classmethod
    def create(cls, spec: GenesisSpec) -> "Network":
        """Build a network from a genesis spec, deterministic per (spec, seed).

        Genesis chaincodes are pre-committed through regular lifecycle
        transactions so that the resulting ledger fully explains the state.
        """
        net = cls(spec)
        for gorg in spec.orgs:
            org = net.synthesize_org(gorg.id, has_orderer=gorg.has_orderer)
            net.launch_org(org)
        for gch in spec.channels:
            members = tuple(gch.members)
            config = ChannelConfig(
                channel_id=gch.id,
                kind=gch.kind,
                config_version=0,
                member_orgs=members,
                consortium_orgs=(
                    tuple(m for m in members if net.orgs[m].has_orderer)
                    if gch.kind == "system"
                    else ()
                ),
                orderer_orgs=tuple(m for m in members if net.orgs[m].has_orderer),
            )
            net._create_channel(config)
            for member in members:
                net.join_peer(member, gch.id)
        for gcc in spec.chaincodes:
            ref = genesis_source_ref(gcc.name, gcc.version)
            definition = ChaincodeDefinition(
                name=gcc.name, version=gcc.version, sequence=1, source_ref=ref
            )
            net.deploy_genesis_chaincode(gcc.channel, definition)
        return net

    def synthesize_org(self, org_id: str, has_orderer: bool = True) -> Org:
        """Create keys and node identifiers for an org (not yet launched)."""
        identity = OrgIdentity.derive(self.seed, org_id)
        return Org(
            org_id=org_id,
            identity=identity,
            msp_descriptor=msp_descriptor(org_id, identity.public_key),
            has_orderer=has_orderer,
        )

    def launch_org(self, org: Org) -> None:
        """Bring an org's nodes online; makes its identity usable for signing."""
        self.orgs[org.org_id] = org
        self.public_keys[org.org_id] = org.identity.public_key

    def register_native(self, handler: ChaincodeHandler) -> None:
        self._native[handler.NAMESPACE] = handler

    def _create_channel(self, config: ChannelConfig) -> Channel:
        if config.channel_id in self.channels:
            raise SimnetError(f"channel {config.channel_id} already exists")
        channel = Channel(config.channel_id)
        self.channels[config.channel_id] = channel
        tx = Transaction(
            tx_id=self._tx_id(config.channel_id, 0, {"genesis": config.to_json()}),
            kind="config",
            namespace=None,
            payload={"genesis": config.to_json()},
        )
        self._append_block(channel, tx, [])
        channel.config = config
        return channel

    def deploy_genesis_chaincode(self, channel_id: str, definition: ChaincodeDefinition) -> None:
        """Install, approve (all members), and commit a definition at genesis."""
        channel = self._channel(channel_id)
        assert channel.config is not None
        package = self._package_for(definition)
        for org in channel.config.member_orgs:
            self.install_package(org, channel_id, package)
        for org in channel.config.member_orgs:
            self.approve_definition(org, channel_id, definition)
        self.commit_definition(channel.config.member_orgs[0], channel_id, definition)

    @staticmethod
    def _package_for(definition: ChaincodeDefinition) -> bytes:
        from ..repository import synthesize_package

        return synthesize_package(definition.name, definition.version)

    # -- sequencing --------------------------------------------------------

    def _channel(self, channel_id: str) -> Channel:
        try:
            return self.channels[channel_id]
        except KeyError:
            raise UnknownChannelError(f"unknown channel {channel_id!r}") from None

    @staticmethod
    def _tx_id(channel_id: str, height: int, payload: dict) -> str:
        return digest({"channel": channel_id, "height": height, "payload": payload})[:24]

    @staticmethod
    def _endorsement_payload(channel_id: str, namespace: str, payload: dict) -> dict:
        return {"channel_id": channel_id, "namespace": namespace, "payload": payload}

    def endorse(self, org_id: str, channel_id: str, namespace: str, payload: dict) -> Endorsement:
        """Simulated peer endorsement: the org signs the proposed payload."""
        org = self.orgs[org_id]
        signature = org.identity.sign(self._endorsement_payload(channel_id, namespace, payload))
        return Endorsement(org_id=org_id, signature=signature)

    def build_invoke(
        self,
        channel_id: str,
        namespace: str,
        op: str,
        args: dict,
        creator: str,
        endorsers: Iterable[str] | None = None,
    ) -> Transaction:
        """Assemble an endorsed invoke transaction as the creator's client.

        By default every launched member org endorses (the simulated peers
        execute mechanically); tests pass explicit ``endorsers`` to exercise
        endorsement failures.
        """
        channel = self._channel(channel_id)
        assert channel.config is not None
        payload = {"op": op, "args": args, "creator": creator}
        if endorsers is None:
            endorsers = [m for m in channel.config.member_orgs if m in self.orgs]
        if creator not in self.orgs:
            raise SimnetError(f"creator {creator!r} has no launched identity")
        endorser_set = sorted(set(endorsers) | {creator})
        endorsements = tuple(
            self.endorse(org, channel_id, namespace, payload) for org in endorser_set
        )
        return Transaction(
            tx_id=self._tx_id(channel_id, channel.height + 1, payload),
            kind="invoke",
            namespace=namespace,
            payload=payload,
            endorsements=endorsements,
        )

    def submit(self, channel_id: str, tx: Transaction) -> Receipt:
        """Order, validate, and apply one transaction (one block per tx).

        Invalid invoke transactions are recorded in the block but change no
        state. Rejected config envelopes are not recorded at all: the
        sequencer refuses them the way an ordering service would.
        """
        with self._lock:
            channel = self._channel(channel_id)
            if channel.config is None:
                raise SimnetError(f"channel {channel_id} has no configuration yet")
            if tx.kind == "config":
                return self._submit_config(channel, tx)
            if tx.kind != "invoke":
                raise MalformedTransactionError(f"unknown tx kind {tx.kind!r}")
            if not isinstance(tx.payload, dict) or not {"op", "args", "creator"} <= set(
                tx.payload
            ):
                raise MalformedTransactionError("invoke payload needs op/args/creator")

            validity = self._validate_invoke(channel, tx)
            events: list[ChaincodeEvent] = []
            result = None
            if validity == VALID:
                try:
                    writes, events, result = self._execute_invoke(
                        channel, tx, channel.height + 1
                    )
                except ChaincodeError as exc:
                    validity = invalid(f"chaincode:{exc}")
                else:
                    self._apply_writes(channel, writes)
            tx.validity = validity
            block = self._append_block(channel, tx, events)
            return Receipt(
                block_number=block.block_number,
                validity=validity,
                result=result,
                events=tuple(events),
            )

    def _submit_config(self, channel: Channel, tx: Transaction) -> Receipt:
        if "envelope" not in tx.payload:
            raise MalformedTransactionError("config payload needs an envelope")
        envelope = ctx_lib.Envelope.from_json(tx.payload["envelope"])
        reason = self._validate_envelope(channel, envelope)
        if reason is not None:
            raise ConfigRejectedError(reason)
        assert channel.config is not None
        new_config = ctx_lib.apply_update(channel.config, envelope.update)
        self._absorb_identities(envelope.update)
        channel.config = new_config
        block = self._append_block(channel, tx, [])
        return Receipt(block_number=block.block_number, validity=VALID, result=new_config.to_json())

    def _validate_envelope(self, channel: Channel, envelope: ctx_lib.Envelope) -> str | None:
        config = channel.config
        assert config is not None
        update = envelope.update
        if update.channel_id != config.channel_id:
            return f"envelope targets {update.channel_id!r}"
        if update.base_version != config.config_version:
            return (
                f"stale base_version {update.base_version}, "
                f"current is {config.config_version}"
            )
        governing = config.governing_orgs()
        signers: set[str] = set()
        for sig in envelope.signatures:
            if sig.org_id in signers:
                continue
            if sig.org_id not in governing:
                return f"signature from non-governing org {sig.org_id}"
            key = self.public_keys.get(sig.org_id)
            if key is None or not ctx_lib.verify_signature(key, update, sig):
                return f"signature verification failed for {sig.org_id}"
            signers.add(sig.org_id)
        needed = majority(len(governing))
        if len(signers) < needed:
            return f"insufficient signatures: {len(signers)} of {needed} required"
        try:
            ctx_lib.apply_update(config, update)
        except (ctx_lib.ConfigOpError, ctx_lib.VersionMismatchError) as exc:
            return f"invalid update: {exc}"
        return None

    def _absorb_identities(self, update: ctx_lib.ConfigUpdate) -> None:
        # learn public keys of orgs introduced by add_* operations
        for op in update.ops:
            if op.msp_descriptor and op.org_id not in self.public_keys:
                self.public_keys[op.org_id] = op.msp_descriptor["public_key"]

    def _validate_invoke(self, channel: Channel, tx: Transaction) -> str:
        config = channel.config
        assert config is not None
        payload_to_sign = self._endorsement_payload(
            channel.channel_id, tx.namespace or "", tx.payload
        )
        creator = tx.payload["creator"]
        if creator not in config.member_orgs:
            return invalid(f"endorsement:creator {creator} is not a channel member")
        endorsing: set[str] = set()
        for endorsement in tx.endorsements:
            key = self.public_keys.get(endorsement.org_id)
            if key is None or not verify(key, payload_to_sign, endorsement.signature):
                return invalid(f"endorsement:bad signature from {endorsement.org_id}")
            if endorsement.org_id in config.member_orgs:
                endorsing.add(endorsement.org_id)
        if creator not in endorsing:
            return invalid(f"endorsement:creator {creator} did not endorse")
        needed = majority(len(config.member_orgs))
        if len(endorsing) < needed:
            return invalid(
                f"endorsement:{len(endorsing)} member endorsements, {needed} required"
            )
        return VALID

    def _resolve_handler(self, channel: Channel, namespace: str) -> ChaincodeHandler:
        if namespace == LIFECYCLE_NS:
            return self._native[LIFECYCLE_NS]
        committed = channel.world.get(LIFECYCLE_NS, {}).get(f"committed/{namespace}")
        if committed is None:
            raise ChaincodeError(f"no committed chaincode {namespace!r} on this channel")
        return self._native.get(namespace, self._kv)

    def _execute_invoke(
        self, channel: Channel, tx: Transaction, block_number: int
    ) -> tuple[dict, list[ChaincodeEvent], object]:
        namespace = tx.namespace or ""
        handler = self._resolve_handler(channel, namespace)
        hctx = HandlerContext(
            self,
            channel,
            namespace,
            tx.payload["creator"],
            block_number,
            readonly=False,
        )
        result = handler.invoke(hctx, tx.payload["op"], tx.payload["args"])
        return hctx._writes, hctx.events, result

    @staticmethod
    def _apply_writes(channel: Channel, writes: dict) -> None:
        for (ns, key), value in writes.items():
            space = channel.world.setdefault(ns, {})
            if value is _DELETED:
                space.pop(key, None)
            else:
                space[key] = value

    def _append_block(
        self, channel: Channel, tx: Transaction, events: list[ChaincodeEvent]
    ) -> Block:
        parent = channel.blocks[-1].digest() if channel.blocks else GENESIS_PARENT
        block = Block(
            block_number=len(channel.blocks),
            channel_id=channel.channel_id,
            transactions=[tx],
            events=list(events),
            parent_digest=parent,
        )
        channel.blocks.append(block)
        return block

    # -- client-facing operations -------------------------------------------

    def invoke(
        self,
        channel_id: str,
        namespace: str,
        op: str,
        args: dict,
        creator: str,
        endorsers: Iterable[str] | None = None,
    ) -> object:
        """Submit an endorsed invoke and raise if it did not take effect."""
        tx = self.build_invoke(channel_id, namespace, op, args, creator, endorsers)
        receipt = self.submit(channel_id, tx)
        if receipt.valid:
            return receipt.result
        reason = receipt.validity.removeprefix("invalid:")
        if reason.startswith("chaincode:"):
            raise ChaincodeError(reason.removeprefix("chaincode:"))
        raise InvalidTransactionError(reason, receipt.block_number)

    def query(self, channel_id: str, namespace: str, op: str, args: dict) -> object:
        """Read-only chaincode call; produces no block."""
        with self._lock:
            channel = self._channel(channel_id)
            handler = self._resolve_handler(channel, namespace)
            hctx = HandlerContext(
                self, channel, namespace, None, channel.height, readonly=True
            )
            return handler.query(hctx, op, args)

    def fetch_config_block(self, channel_id: str) -> ChannelConfig:
        """Current configuration snapshot (immutable value)."""
        channel = self._channel(channel_id)
        assert channel.config is not None
        return channel.config

    def apply_config_envelope(self, channel_id: str, envelope: ctx_lib.Envelope) -> int:
        """Submit a signed configuration envelope; returns the new version.

        Raises ConfigRejectedError (and records nothing) when the envelope is
        stale, under-signed, or carries a bad signature.
        """
        payload = {"envelope": envelope.to_json()}
        channel = self._channel(channel_id)
        tx = Transaction(
            tx_id=self._tx_id(channel_id, channel.height + 1, payload),
            kind="config",
            namespace=None,
            payload=payload,
        )
        receipt = self.submit(channel_id, tx)
        assert channel.config is not None
        return channel.config.config_version

    def join_peer(self, org_id: str, channel_id: str) -> None:
        """Join the org's peers to the channel; idempotent."""
        with self._lock:
            channel = self._channel(channel_id)
            assert channel.config is not None
            if org_id not in channel.config.member_orgs:
                raise NotMemberError(f"{org_id} is not a member of {channel_id}")
            if org_id in channel.joined:
                return
            channel.joined.add(org_id)
            org = self.orgs.get(org_id)
            for peer in org.peer_ids if org else ():
                self.node_ops.append(
                    NodeOperation(actor_org=org_id, peer=peer, action="join", channel_id=channel_id)
                )

    def install_package(self, org_id: str, channel_id: str, package: bytes) -> str:
        """Install package bytes on the org's peers for use on a channel."""
        result = self.invoke(
            channel_id,
            LIFECYCLE_NS,
            "install",
            {"package": encode_bytes(package)},
            creator=org_id,
        )
        org = self.orgs.get(org_id)
        for peer in org.peer_ids if org else ():
            self.node_ops.append(
                NodeOperation(actor_org=org_id, peer=peer, action="install", channel_id=channel_id)
            )
        return result["package_digest"]

    def approve_definition(
        self, org_id: str, channel_id: str, definition: ChaincodeDefinition
    ) -> None:
        channel = self._channel(channel_id)
        assert channel.config is not None
        if org_id not in channel.config.member_orgs:
            raise NotMemberError(f"{org_id} is not a member of {channel_id}")
        self.invoke(
            channel_id,
            LIFECYCLE_NS,
            "approve",
            {"definition": definition.to_json()},
            creator=org_id,
        )

    def commit_definition(
        self, org_id: str, channel_id: str, definition: ChaincodeDefinition
    ) -> Receipt:
        """Commit a definition; raises ChaincodeError unless enough orgs
        approved an exact match and the sequence is the next one."""
        channel = self._channel(channel_id)
        assert channel.config is not None
        if org_id not in channel.config.member_orgs:
            raise NotMemberError(f"{org_id} is not a member of {channel_id}")
        tx = self.build_invoke(
            channel_id, LIFECYCLE_NS, "commit", {"definition": definition.to_json()}, org_id
        )
        receipt = self.submit(channel_id, tx)
        if not receipt.valid:
            reason = receipt.validity.removeprefix("invalid:")
            if reason.startswith("chaincode:"):
                raise ChaincodeError(reason.removeprefix("chaincode:"))
            raise InvalidTransactionError(reason, receipt.block_number)
        return receipt

    def lifecycle_state(self, channel_id: str, name: str) -> LifecycleState:
        channel = self._channel(channel_id)
        world = channel.world.get(LIFECYCLE_NS, {})
        committed = world.get(f"committed/{name}")
        approvals = {}
        prefix = f"approvals/{name}/"
        for key, value in world.items():
            if key.startswith(prefix):
                approvals[key.removeprefix(prefix)] = ChaincodeDefinition.from_json(value)
        installs = {}
        for key, value in world.items():
            if key.startswith("installs/"):
                installs[key.removeprefix("installs/")] = tuple(value)
        return LifecycleState(
            committed_definition=ChaincodeDefinition.from_json(committed) if committed else None,
            approvals=approvals,
            installs=installs,
        )

    def subscribe_events(
        self, channel_id: str, from_block: int = 0
    ) -> list[tuple[int, ChaincodeEvent]]:
        """Chaincode events from ``from_block`` on, in block then intra-block order."""
        channel = self._channel(channel_id)
        if from_block < 0 or from_block > channel.height + 1:
            raise SimnetError(
                f"from_block {from_block} out of range (height {channel.height})"
            )
        out: list[tuple[int, ChaincodeEvent]] = []
        for block in channel.blocks[from_block:]:
            for event in block.events:
                out.append((block.block_number, event))
        return out

    def height(self, channel_id: str) -> int:
        return self._channel(channel_id).height

    # -- digests, export, replay -------------------------------------------

    def state_digest(self, channel_ids: Iterable[str] | None = None) -> str:
        """Digest over configs, ledgers, and world states of the channels.

        The seed is folded in because identities and executor selection derive
        from it: equal digests must mean observably identical networks.
        """
        with self._lock:
            selected = sorted(channel_ids) if channel_ids is not None else sorted(self.channels)
            view = {cid: self._channel(cid).state_view() for cid in selected}
            return digest({"seed": self.seed, "channels": view})

    def iter_block_lines(self) -> Iterator[str]:
        """Canonical-JSON block log, one block per line, channel by channel."""
        for channel_id in self.channels:  # creation order
            for block in self.channels[channel_id].blocks:
                yield canonical_json(block.to_json())

    def export_block_log(self, path: str) -> int:
        count = 0
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.iter_block_lines():
                fh.write(line + "\n")
                count += 1
        return count

    @classmethod
    def replay(
        cls,
        spec: GenesisSpec,
        lines: Iterable[str],
        handlers: Iterable[ChaincodeHandler] = (),
    ) -> "Network":
        """Rebuild a network by re-validating and re-executing a block log.

        Raises ReplayError when the recorded chain diverges from deterministic
        re-execution (digest chain, tx ids, validity flags, or events).
        """
        import json as _json

        net = cls(spec)
        for handler in handlers:
            net.register_native(handler)
        for gorg in spec.orgs:
            net.launch_org(net.synthesize_org(gorg.id, has_orderer=gorg.has_orderer))
        for line in lines:
            block = Block.from_json(_json.loads(line))
            channel = net.channels.get(block.channel_id)
            if channel is None:
                channel = Channel(block.channel_id)
                net.channels[block.channel_id] = channel
            if block.block_number != len(channel.blocks):
                raise ReplayError(
                    f"{block.channel_id}: expected block {len(channel.blocks)}, "
                    f"got {block.block_number}"
                )
            parent = channel.blocks[-1].digest() if channel.blocks else GENESIS_PARENT
            if block.parent_digest != parent:
                raise ReplayError(f"{block.channel_id}: parent digest mismatch")
            if len(block.transactions) != 1:
                raise ReplayError("expected one transaction per block")
            net._replay_tx(channel, block)
            channel.blocks.append(block)
        return net

    def _replay_tx(self, channel: Channel, block: Block) -> None:
        tx = block.transactions[0]
        expected_id = self._tx_id(channel.channel_id, block.block_number, tx.payload)
        if tx.tx_id != expected_id:
            raise ReplayError(f"tx id mismatch in block {block.block_number}")
        if tx.kind == "config":
            if "genesis" in tx.payload:
                if channel.config is not None:
                    raise ReplayError("genesis config tx on configured channel")
                channel.config = ChannelConfig.from_json(tx.payload["genesis"])
                return
            envelope = ctx_lib.Envelope.from_json(tx.payload["envelope"])
            reason = self._validate_envelope(channel, envelope)
            if reason is not None:
                raise ReplayError(f"recorded config tx no longer validates: {reason}")
            assert channel.config is not None
            self._absorb_identities(envelope.update)
            channel.config = ctx_lib.apply_update(channel.config, envelope.update)
            return
        validity = self._validate_invoke(channel, tx)
        events: list[ChaincodeEvent] = []
        if validity == VALID:
            try:
                writes, events, _ = self._execute_invoke(channel, tx, block.block_number)
            except ChaincodeError as exc:
                validity = invalid(f"chaincode:{exc}")
            else:
                self._apply_writes(channel, writes)
        if validity != tx.validity:
            raise ReplayError(
                f"validity mismatch in block {block.block_number}: "
                f"recorded {tx.validity}, recomputed {validity}"
            )
        if [e.to_json() for e in events] != [e.to_json() for e in block.events]:
            raise ReplayError(f"event mismatch in block {block.block_number}")
