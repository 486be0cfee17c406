"""Admin REST API, one logical server per organization.

Every mutating call is submitted as a transaction under the server's own org
identity, so a server bound to org O can never produce a transaction
attributed to another org. The server holds no state of its own: every
response is reconstructed from the ledger, which makes it restart-safe.
Responses are canonical JSON.
"""

from __future__ import annotations

import threading

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from pydantic import BaseModel

from .canonical import canonical_json
from .configtx import ConfigOpError, SignatureInvalidError
from .runtime import OpsRuntime
from .simnet.types import (
    ChaincodeError,
    ConfigRejectedError,
    InvalidTransactionError,
    NotMemberError,
    SimnetError,
    UnknownChannelError,
)


class ChannelProposalIn(BaseModel):
    target_channel_id: str
    description: str = ""
    spec: list[dict]


class ChaincodeProposalIn(BaseModel):
    channel_id: str
    definition: dict


class ChaincodeVoteIn(BaseModel):
    decision: str


def default_token(org_id: str) -> str:
    return f"{org_id}-token"


def _json(payload) -> Response:
    return Response(content=canonical_json(payload), media_type="application/json")


def _http_error(exc: Exception) -> HTTPException:
    message = str(exc)
    if isinstance(exc, (UnknownChannelError, NotMemberError)):
        return HTTPException(status_code=404, detail=message)
    if isinstance(exc, ChaincodeError):
        status = 404 if message.startswith("unknown") else 409
        return HTTPException(status_code=status, detail=message)
    if isinstance(exc, (InvalidTransactionError, ConfigRejectedError)):
        return HTTPException(status_code=403, detail=message)
    if isinstance(exc, (ConfigOpError, SignatureInvalidError, ValueError)):
        return HTTPException(status_code=400, detail=message)
    if isinstance(exc, SimnetError):
        return HTTPException(status_code=409, detail=message)
    raise exc


def create_app(
    runtime: OpsRuntime, org_id: str, token: str | None = None, auto_pump: bool = True
) -> FastAPI:
    """Build the admin API app bound to one org's identity.

    With ``auto_pump`` (the default) agents run to quiescence inside each
    mutating call, so tests see final states synchronously. Serve mode passes
    False and runs the agents on a background pumper instead.
    """
    expected = token or default_token(org_id)
    admin = runtime.admin(org_id, auto_pump=auto_pump)
    app = FastAPI(title=f"opsflow admin API ({org_id})")

    def require_token(authorization: str = Header(default="")) -> None:
        if authorization != f"Bearer {expected}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    auth = Depends(require_token)

    @app.get("/api/org")
    def who_am_i(_: None = auth) -> Response:
        return _json({"org_id": org_id})

    @app.get("/api/channels")
    def list_channels(_: None = auth) -> Response:
        return _json(admin.list_channels())

    @app.get("/api/channels/{channel_id}")
    def get_channel(channel_id: str, _: None = auth) -> Response:
        try:
            return _json(admin.get_channel_info(channel_id))
        except Exception as exc:  # noqa: BLE001 - translated to HTTP below
            raise _http_error(exc) from exc

    @app.post("/api/channel-proposals")
    def create_channel_proposal(body: ChannelProposalIn, _: None = auth) -> Response:
        try:
            return _json(
                admin.create_channel_proposal(
                    body.target_channel_id, body.description, body.spec
                )
            )
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc) from exc

    @app.get("/api/channel-proposals")
    def list_channel_proposals(_: None = auth) -> Response:
        return _json(admin.list_channel_proposals())

    @app.get("/api/channel-proposals/{proposal_id}")
    def get_channel_proposal(proposal_id: str, _: None = auth) -> Response:
        try:
            return _json(admin.get_channel_proposal(proposal_id))
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc) from exc

    @app.post("/api/channel-proposals/{proposal_id}/vote")
    def vote_channel_proposal(proposal_id: str, _: None = auth) -> Response:
        try:
            return _json(admin.vote_channel_proposal(proposal_id))
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc) from exc

    @app.post("/api/chaincode-proposals")
    def create_chaincode_proposal(body: ChaincodeProposalIn, _: None = auth) -> Response:
        try:
            return _json(admin.create_chaincode_proposal(body.channel_id, body.definition))
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc) from exc

    @app.get("/api/chaincode-proposals")
    def list_chaincode_proposals(_: None = auth) -> Response:
        return _json(admin.list_chaincode_proposals())

    @app.get("/api/chaincode-proposals/{proposal_id}")
    def get_chaincode_proposal(proposal_id: str, _: None = auth) -> Response:
        try:
            return _json(admin.get_chaincode_proposal(proposal_id))
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc) from exc

    @app.post("/api/chaincode-proposals/{proposal_id}/vote")
    def vote_chaincode_proposal(
        proposal_id: str, body: ChaincodeVoteIn, _: None = auth
    ) -> Response:
        try:
            return _json(admin.vote_chaincode_proposal(proposal_id, body.decision))
        except Exception as exc:  # noqa: BLE001
            raise _http_error(exc) from exc

    @app.get("/api/proposals/{proposal_id}/history")
    def proposal_history(proposal_id: str, _: None = auth) -> Response:
        proposal = admin.find_proposal(proposal_id)
        if proposal is None:
            raise HTTPException(status_code=404, detail=f"unknown proposal {proposal_id!r}")
        return _json(
            {
                "proposal_id": proposal_id,
                "status": proposal["status"],
                "records": admin.proposal_history(proposal_id),
            }
        )

    return app


def serve(
    runtime: OpsRuntime, org_id: str, port: int, token: str | None = None,
    pump_interval: float = 0.25,
) -> None:
    """Run one org's API server (blocking); agents run on a background pumper."""
    serve_many(runtime, [(org_id, port, token)], pump_interval)


def serve_many(
    runtime: OpsRuntime,
    bindings: list[tuple[str, int, str | None]],
    pump_interval: float = 0.25,
) -> None:
    """Run several orgs' API servers against one shared runtime (blocking).

    Each server thread funnels its mutations through the runtime's serialized
    submission path; the agents advance on a shared background pumper so
    workflow progress is observable across client polls.
    """
    import uvicorn

    stop = runtime.start_pumper(pump_interval)
    servers = []
    threads = []
    for org_id, port, token in bindings:
        config = uvicorn.Config(
            create_app(runtime, org_id, token, auto_pump=False),
            host="127.0.0.1",
            port=port,
            log_level="warning",
        )
        server = uvicorn.Server(config)
        servers.append(server)
        thread = threading.Thread(target=server.run, daemon=True)
        threads.append(thread)
        thread.start()
    try:
        for thread in threads:
            thread.join()
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        for server in servers:
            server.should_exit = True
