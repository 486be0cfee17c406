"""Workflow contract for chaincode deployment and upgrade operations.

Runs as a chaincode on the ops channel. An admin proposes a definition (with a
source link); member orgs vote for or against; on a for-majority the contract
emits a deploy event, every org's agent downloads/installs/approves and
registers each task outcome; when all electorate orgs have succeeded on all
three tasks, the contract emits a commit event naming one executor, which
commits the definition and registers the result. Channel membership is
resolved by calling into the channel operations contract on the same channel.

State layout (namespace ``chaincode-ops``):
  seed                      -> network seed for executor selection
  chaincode/{channel}/{name} -> latest committed definition
  proposal/{pid}            -> proposal record
  counter                   -> proposal id counter
"""

from __future__ import annotations

from ..selection import select_executor
from ..simnet.network import HandlerContext
from ..simnet.types import ChaincodeDefinition, ChaincodeError, majority
from . import channel_ops
from .common import (
    ACKNOWLEDGED,
    APPROVED,
    COMMITTED,
    FAILED,
    PROPOSED,
    REJECTED,
    OperationsEvent,
    task_record,
)

NAMESPACE = "chaincode-ops"
VERSION = "1.0"

DEPLOY_TASKS = ("download", "install", "approve")
TERMINAL = (COMMITTED, REJECTED, FAILED)


class ChaincodeOpsContract:
    NAMESPACE = NAMESPACE

    def invoke(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "init":
            if ctx.get("seed") is not None:
                raise ChaincodeError("already initialized")
            ctx.put("seed", args["seed"])
            return {"seed": args["seed"]}
        if op == "bootstrap_chaincode":
            return self._bootstrap_chaincode(ctx, args)
        if op == "request_proposal":
            return self._request_proposal(ctx, args)
        if op == "vote":
            return self._vote(ctx, args)
        if op == "register_deploy_result":
            return self._register_deploy_result(ctx, args)
        if op == "register_commit_result":
            return self._register_commit_result(ctx, args)
        raise ChaincodeError(f"unknown op {op!r}")

    def query(self, ctx: HandlerContext, op: str, args: dict) -> object:
        if op == "get_proposal":
            return self._proposal(ctx, args["proposal_id"])
        if op == "list_proposals":
            return [ctx.get(key) for key in ctx.keys("proposal/")]
        if op == "get_chaincode":
            record = ctx.get(f"chaincode/{args['channel_id']}/{args['name']}")
            if record is None:
                raise ChaincodeError(
                    f"no committed chaincode {args['name']!r} on {args['channel_id']!r}"
                )
            return record
        if op == "list_chaincodes":
            prefix = "chaincode/"
            if args.get("channel_id"):
                prefix += args["channel_id"] + "/"
            return [ctx.get(key) for key in ctx.keys(prefix)]
        raise ChaincodeError(f"unknown query {op!r}")

    # -- helpers -------------------------------------------------------------

    def _proposal(self, ctx: HandlerContext, proposal_id: str) -> dict:
        proposal = ctx.get(f"proposal/{proposal_id}")
        if proposal is None:
            raise ChaincodeError(f"unknown proposal {proposal_id!r}")
        return proposal

    def _bootstrap_chaincode(self, ctx: HandlerContext, args: dict) -> object:
        definition = ChaincodeDefinition.from_json(args["definition"])
        record = {"channel_id": args["channel_id"], "definition": definition.to_json()}
        ctx.put(f"chaincode/{args['channel_id']}/{definition.name}", record)
        return record

    def _committed_sequence(self, ctx: HandlerContext, channel_id: str, name: str) -> int:
        record = ctx.get(f"chaincode/{channel_id}/{name}")
        return record["definition"]["sequence"] if record else 0

    def _request_proposal(self, ctx: HandlerContext, args: dict) -> object:
        channel_id = args["channel_id"]
        info = ctx.call(channel_ops.NAMESPACE, "get_channel_info", {"channel_id": channel_id})
        members = sorted(info["member_orgs"])
        proposer = ctx.creator
        if proposer not in members:
            raise ChaincodeError(f"{proposer} is not a member of {channel_id}")
        try:
            definition = ChaincodeDefinition.from_json(args["definition"])
        except (KeyError, TypeError) as exc:
            raise ChaincodeError(f"malformed definition: {exc}") from None
        if definition.source_ref is None:
            raise ChaincodeError("definition must carry a source_ref")
        expected = self._committed_sequence(ctx, channel_id, definition.name) + 1
        if definition.sequence != expected:
            raise ChaincodeError(
                f"bad sequence: expected {expected}, got {definition.sequence}"
            )
        counter = (ctx.get("counter") or 0) + 1
        ctx.put("counter", counter)
        proposal_id = f"ccprop-{counter:04d}"
        proposal = {
            "workflow": "chaincode_update",
            "proposal_id": proposal_id,
            "proposer": proposer,
            "channel_id": channel_id,
            "definition": definition.to_json(),
            "status": PROPOSED,
            "votes": {proposer: "for"},
            "electorate": members,
            "org_task_status": {},
            "attempt": 0,
            "executor": None,
            "history": [
                task_record(proposal_id, proposer, "request", True, "", ctx.block_number)
            ],
        }
        self._tally(ctx, proposal)
        ctx.put(f"proposal/{proposal_id}", proposal)
        return proposal

    def _vote(self, ctx: HandlerContext, args: dict) -> object:
        proposal = dict(self._proposal(ctx, args["proposal_id"]))
        voter = ctx.creator
        decision = args["decision"]
        if decision not in ("for", "against"):
            raise ChaincodeError(f"decision must be for/against, got {decision!r}")
        if proposal["status"] != PROPOSED:
            raise ChaincodeError(f"cannot vote in status {proposal['status']}")
        if voter not in proposal["electorate"]:
            raise ChaincodeError(f"{voter} is not in the electorate")
        if voter in proposal["votes"]:
            raise ChaincodeError(f"{voter} has already voted")
        proposal["votes"] = dict(proposal["votes"], **{voter: decision})
        proposal["history"] = proposal["history"] + [
            task_record(
                proposal["proposal_id"], voter, "vote", True, decision, ctx.block_number
            )
        ]
        self._tally(ctx, proposal)
        ctx.put(f"proposal/{proposal['proposal_id']}", proposal)
        return proposal

    def _tally(self, ctx: HandlerContext, proposal: dict) -> None:
        needed = majority(len(proposal["electorate"]))
        votes_for = sum(1 for d in proposal["votes"].values() if d == "for")
        votes_against = len(proposal["votes"]) - votes_for
        if proposal["status"] != PROPOSED:
            return
        if votes_for >= needed:
            proposal["status"] = APPROVED
            event = OperationsEvent(
                event_kind="deploy",
                proposal_id=proposal["proposal_id"],
                extra={"channel_id": proposal["channel_id"]},
            )
            ctx.emit(event.event_kind, event.to_payload())
        elif votes_against >= needed:
            proposal["status"] = REJECTED

    def _register_deploy_result(self, ctx: HandlerContext, args: dict) -> object:
        proposal = dict(self._proposal(ctx, args["proposal_id"]))
        org = ctx.creator
        task = args["task"]
        if task not in DEPLOY_TASKS:
            raise ChaincodeError(f"unknown deploy task {task!r}")
        if proposal["status"] != APPROVED:
            raise ChaincodeError(f"cannot register results in status {proposal['status']}")
        if org not in proposal["electorate"]:
            raise ChaincodeError(f"{org} is not in the electorate")
        ok = bool(args["ok"])
        statuses = {o: dict(t) for o, t in proposal["org_task_status"].items()}
        existing = statuses.get(org, {}).get(task)
        if ok and existing and existing.get("ok"):
            return proposal  # duplicate success report: idempotent, no new event
        statuses.setdefault(org, {})[task] = {"ok": ok, "detail": args.get("detail", "")}
        proposal["org_task_status"] = statuses
        proposal["history"] = proposal["history"] + [
            task_record(
                proposal["proposal_id"], org, task, ok, args.get("detail", ""), ctx.block_number
            )
        ]
        if not ok and args.get("terminal", False):
            proposal["status"] = FAILED
        elif self._all_tasks_done(proposal):
            proposal["status"] = ACKNOWLEDGED
            self._emit_commit_event(ctx, proposal)
        ctx.put(f"proposal/{proposal['proposal_id']}", proposal)
        return proposal

    @staticmethod
    def _all_tasks_done(proposal: dict) -> bool:
        statuses = proposal["org_task_status"]
        return all(
            statuses.get(org, {}).get(task, {}).get("ok", False)
            for org in proposal["electorate"]
            for task in DEPLOY_TASKS
        )

    def _emit_commit_event(self, ctx: HandlerContext, proposal: dict) -> None:
        voters_for = sorted(o for o, d in proposal["votes"].items() if d == "for")
        executor = select_executor(
            voters_for, ctx.get("seed"), proposal["proposal_id"], proposal["attempt"]
        )
        proposal["executor"] = executor
        event = OperationsEvent(
            event_kind="commit",
            proposal_id=proposal["proposal_id"],
            executor=executor,
            attempt=proposal["attempt"],
            extra={"channel_id": proposal["channel_id"]},
        )
        ctx.emit(event.event_kind, event.to_payload())

    def _register_commit_result(self, ctx: HandlerContext, args: dict) -> object:
        proposal = dict(self._proposal(ctx, args["proposal_id"]))
        org = ctx.creator
        if proposal["status"] != ACKNOWLEDGED:
            raise ChaincodeError(f"cannot register commit in status {proposal['status']}")
        if org != proposal["executor"]:
            raise ChaincodeError(f"{org} is not the selected executor")
        ok = bool(args["ok"])
        proposal["history"] = proposal["history"] + [
            task_record(
                proposal["proposal_id"], org, "commit", ok, args.get("detail", ""),
                ctx.block_number,
            )
        ]
        if ok:
            proposal["status"] = COMMITTED
            record = {"channel_id": proposal["channel_id"], "definition": proposal["definition"]}
            ctx.put(
                f"chaincode/{proposal['channel_id']}/{proposal['definition']['name']}", record
            )
        else:
            proposal["attempt"] += 1
            voters_for = sorted(o for o, d in proposal["votes"].items() if d == "for")
            if proposal["attempt"] < len(voters_for):
                self._emit_commit_event(ctx, proposal)
            else:
                proposal["status"] = FAILED
                proposal["executor"] = None
        ctx.put(f"proposal/{proposal['proposal_id']}", proposal)
        return proposal
