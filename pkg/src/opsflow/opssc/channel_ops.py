"""Workflow contract for channel configuration operations.

Runs as a chaincode on the ops channel. An admin requests a channel update
proposal (human-readable op list plus the compiled delta and their signature);
other member orgs vote by adding their own signature over the same delta; once
a majority of the electorate has signed, the contract emits an update_channel
event naming one executor agent, which submits the assembled envelope to the
target channel and registers the outcome. The contract also keeps the channel
inventory, since the platform itself offers no way to list channels.

State layout (namespace ``channel-ops``):
  seed              -> network seed for executor selection
  org/{id}          -> identity material (public key) per known org
  channel/{id}      -> channel inventory entry
  proposal/{pid}    -> proposal record, including votes and task history
  counter           -> proposal id counter
"""

from __future__ import annotations

from .. import configtx as ctx_lib
from ..identity import verify
from ..selection import select_executor
from ..simnet.network import HandlerContext
from ..simnet.types import ChaincodeError, ChannelConfig, majority
from .common import APPROVED, COMMITTED, FAILED, PROPOSED, OperationsEvent, task_record

NAMESPACE = "channel-ops"
VERSION = "1.0"


class ChannelOpsContract:
    NAMESPACE = NAMESPACE

    # -- invocations ---------------------------------------------------------

    def invoke(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "init":
            return self._init(ctx, args)
        if op == "register_org":
            ctx.put(f"org/{args['org_id']}", args["msp_descriptor"])
            return {"org_id": args["org_id"]}
        if op == "register_channel":
            return self._register_channel(ctx, args)
        if op == "request_proposal":
            return self._request_proposal(ctx, args)
        if op == "vote":
            return self._vote(ctx, args)
        if op == "register_result":
            return self._register_result(ctx, args)
        raise ChaincodeError(f"unknown op {op!r}")

    def query(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "get_channel_info":
            info = ctx.get(f"channel/{args['channel_id']}")
            if info is None:
                raise ChaincodeError(f"unknown channel {args['channel_id']!r}")
            return info
        if op == "list_channels":
            return [ctx.get(key) for key in ctx.keys("channel/")]
        if op == "get_proposal":
            return self._proposal(ctx, args["proposal_id"])
        if op == "list_proposals":
            return [ctx.get(key) for key in ctx.keys("proposal/")]
        if op == "get_org":
            org = ctx.get(f"org/{args['org_id']}")
            if org is None:
                raise ChaincodeError(f"unknown org {args['org_id']!r}")
            return org
        raise ChaincodeError(f"unknown query {op!r}")

    # -- helpers -------------------------------------------------------------

    def _init(self, ctx: HandlerContext, args: dict) -> object:
        if ctx.get("seed") is not None:
            raise ChaincodeError("already initialized")
        ctx.put("seed", args["seed"])
        return {"seed": args["seed"]}

    def _register_channel(self, ctx: HandlerContext, args: dict) -> object:
        entry = {
            "channel_id": args["channel_id"],
            "kind": args["kind"],
            "member_orgs": sorted(args["member_orgs"]),
            "orderer_orgs": sorted(args.get("orderer_orgs", [])),
            "consortium_orgs": sorted(args.get("consortium_orgs", [])),
            "config_version": args.get("config_version", 0),
        }
        ctx.put(f"channel/{args['channel_id']}", entry)
        return entry

    def _proposal(self, ctx: HandlerContext, proposal_id: str) -> dict:
        proposal = ctx.get(f"proposal/{proposal_id}")
        if proposal is None:
            raise ChaincodeError(f"unknown proposal {proposal_id!r}")
        return proposal

    def _org_key(self, ctx: HandlerContext, org_id: str) -> str:
        descriptor = ctx.get(f"org/{org_id}")
        if descriptor is None:
            raise ChaincodeError(f"no identity material registered for {org_id}")
        return descriptor["public_key"]

    def _request_proposal(self, ctx: HandlerContext, args: dict) -> object:
        target = args["target_channel_id"]
        if ctx.get(f"channel/{target}") is None:
            raise ChaincodeError(f"unknown channel {target!r}")
        base = ChannelConfig.from_json(args["base_config"])
        if base.channel_id != target:
            raise ChaincodeError("base_config does not belong to the target channel")
        electorate = sorted(base.governing_orgs())
        proposer = ctx.creator
        if proposer not in electorate:
            raise ChaincodeError(f"proposer {proposer} is not in the governing member set")
        ops = [ctx_lib.ConfigOp.from_json(op) for op in args["spec"]]
        try:
            compiled = ctx_lib.compute_update(base, ops)
        except (ctx_lib.ConfigOpError, ctx_lib.VersionMismatchError) as exc:
            raise ChaincodeError(f"compile failed: {exc}") from None
        signature = args["signature"]
        if not verify(self._org_key(ctx, proposer), compiled.to_json(), signature):
            raise ChaincodeError("proposer signature does not cover the compiled update")

        counter = (ctx.get("counter") or 0) + 1
        ctx.put("counter", counter)
        proposal_id = f"chprop-{counter:04d}"
        proposal = {
            "workflow": "channel_update",
            "proposal_id": proposal_id,
            "proposer": proposer,
            "target_channel_id": target,
            "description": args.get("description", ""),
            "spec": [op.to_json() for op in ops],
            "compiled_update": compiled.to_json(),
            "status": PROPOSED,
            "votes": {proposer: signature},
            "electorate": electorate,
            "attempt": 0,
            "executor": None,
            "history": [
                task_record(proposal_id, proposer, "request", True, "", ctx.block_number)
            ],
        }
        self._maybe_approve(ctx, proposal)
        ctx.put(f"proposal/{proposal_id}", proposal)
        return proposal

    def _vote(self, ctx: HandlerContext, args: dict) -> object:
        proposal = dict(self._proposal(ctx, args["proposal_id"]))
        voter = ctx.creator
        if proposal["status"] != PROPOSED:
            raise ChaincodeError(f"cannot vote in status {proposal['status']}")
        if voter not in proposal["electorate"]:
            raise ChaincodeError(f"{voter} is not in the electorate")
        if voter in proposal["votes"]:
            raise ChaincodeError(f"{voter} has already voted")
        update = ctx_lib.ConfigUpdate.from_json(proposal["compiled_update"])
        if not verify(self._org_key(ctx, voter), update.to_json(), args["signature"]):
            raise ChaincodeError("vote signature does not cover the compiled update")
        proposal["votes"] = dict(proposal["votes"], **{voter: args["signature"]})
        proposal["history"] = proposal["history"] + [
            task_record(proposal["proposal_id"], voter, "vote", True, "", ctx.block_number)
        ]
        self._maybe_approve(ctx, proposal)
        ctx.put(f"proposal/{proposal['proposal_id']}", proposal)
        return proposal

    def _maybe_approve(self, ctx: HandlerContext, proposal: dict) -> None:
        needed = majority(len(proposal["electorate"]))
        if proposal["status"] == PROPOSED and len(proposal["votes"]) >= needed:
            proposal["status"] = APPROVED
            self._emit_update_event(ctx, proposal)

    def _emit_update_event(self, ctx: HandlerContext, proposal: dict) -> None:
        executor = select_executor(
            sorted(proposal["votes"]),
            ctx.get("seed"),
            proposal["proposal_id"],
            proposal["attempt"],
        )
        proposal["executor"] = executor
        event = OperationsEvent(
            event_kind="update_channel",
            proposal_id=proposal["proposal_id"],
            executor=executor,
            attempt=proposal["attempt"],
            extra={"target_channel_id": proposal["target_channel_id"]},
        )
        ctx.emit(event.event_kind, event.to_payload())

    def _register_result(self, ctx: HandlerContext, args: dict) -> object:
        proposal = dict(self._proposal(ctx, args["proposal_id"]))
        org = ctx.creator
        if proposal["status"] != APPROVED:
            raise ChaincodeError(f"cannot register results in status {proposal['status']}")
        if args.get("task") != "update_channel":
            raise ChaincodeError("unknown task for a channel update proposal")
        if org != proposal["executor"]:
            raise ChaincodeError(f"{org} is not the selected executor")
        ok = bool(args["ok"])
        proposal["history"] = proposal["history"] + [
            task_record(
                proposal["proposal_id"],
                org,
                "update_channel",
                ok,
                args.get("detail", ""),
                ctx.block_number,
            )
        ]
        if ok:
            proposal["status"] = COMMITTED
            self._apply_to_inventory(ctx, proposal)
        else:
            proposal["attempt"] += 1
            voters = sorted(proposal["votes"])
            if proposal["attempt"] < len(voters):
                self._emit_update_event(ctx, proposal)
            else:
                proposal["status"] = FAILED
                proposal["executor"] = None
        ctx.put(f"proposal/{proposal['proposal_id']}", proposal)
        return proposal

    def _apply_to_inventory(self, ctx: HandlerContext, proposal: dict) -> None:
        """Fold the committed update into the channel inventory entry."""
        entry = dict(ctx.get(f"channel/{proposal['target_channel_id']}"))
        members = set(entry["member_orgs"])
        orderers = set(entry["orderer_orgs"])
        consortium = set(entry["consortium_orgs"])
        for op in proposal["spec"]:
            kind, org = op["kind"], op["org_id"]
            if kind == "add_org":
                members.add(org)
            elif kind == "remove_org":
                members.discard(org)
            elif kind == "add_orderer_org":
                orderers.add(org)
            elif kind == "remove_orderer_org":
                orderers.discard(org)
            elif kind == "add_consortium_org":
                consortium.add(org)
            elif kind == "remove_consortium_org":
                consortium.discard(org)
            if op.get("msp_descriptor"):
                ctx.put(f"org/{org}", op["msp_descriptor"])
        entry["member_orgs"] = sorted(members)
        entry["orderer_orgs"] = sorted(orderers)
        entry["consortium_orgs"] = sorted(consortium)
        entry["config_version"] = entry["config_version"] + 1
        ctx.put(f"channel/{entry['channel_id']}", entry)
        event = OperationsEvent(
            event_kind="config_updated",
            proposal_id=proposal["proposal_id"],
            extra={
                "target_channel_id": entry["channel_id"],
                "config_version": entry["config_version"],
            },
        )
        ctx.emit(event.event_kind, event.to_payload())
