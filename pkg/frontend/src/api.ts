// Typed client for the admin API. Thin by design: every call maps 1:1 to an
// endpoint and errors carry the server's message for inline display.

import type { PortalConfig } from "./config.js";
import type {
  ChannelInfo,
  ChaincodeDefinition,
  ConfigOp,
  HistoryResponse,
  Proposal,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export class PortalApi {
  constructor(private readonly config: PortalConfig) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.config.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.config.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = (JSON.parse(text) as { detail?: string }).detail ?? text;
      } catch {
        // non-JSON error body: show it as-is
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(text) as T;
  }

  whoAmI(): Promise<{ org_id: string }> {
    return this.request("GET", "/api/org");
  }

  channels(): Promise<ChannelInfo[]> {
    return this.request("GET", "/api/channels");
  }

  channel(id: string): Promise<ChannelInfo> {
    return this.request("GET", `/api/channels/${encodeURIComponent(id)}`);
  }

  channelProposals(): Promise<Proposal[]> {
    return this.request("GET", "/api/channel-proposals");
  }

  chaincodeProposals(): Promise<Proposal[]> {
    return this.request("GET", "/api/chaincode-proposals");
  }

  async proposals(): Promise<Proposal[]> {
    const [channel, chaincode] = await Promise.all([
      this.channelProposals(),
      this.chaincodeProposals(),
    ]);
    return [...channel, ...chaincode];
  }

  async proposal(id: string): Promise<Proposal> {
    const path = id.startsWith("ccprop")
      ? `/api/chaincode-proposals/${encodeURIComponent(id)}`
      : `/api/channel-proposals/${encodeURIComponent(id)}`;
    return this.request("GET", path);
  }

  history(id: string): Promise<HistoryResponse> {
    return this.request("GET", `/api/proposals/${encodeURIComponent(id)}/history`);
  }

  createChannelProposal(
    targetChannelId: string,
    description: string,
    spec: ConfigOp[],
  ): Promise<Proposal> {
    return this.request("POST", "/api/channel-proposals", {
      target_channel_id: targetChannelId,
      description,
      spec,
    });
  }

  createChaincodeProposal(channelId: string, definition: ChaincodeDefinition): Promise<Proposal> {
    return this.request("POST", "/api/chaincode-proposals", {
      channel_id: channelId,
      definition,
    });
  }

  voteChannel(id: string): Promise<Proposal> {
    return this.request("POST", `/api/channel-proposals/${encodeURIComponent(id)}/vote`);
  }

  voteChaincode(id: string, decision: "for" | "against"): Promise<Proposal> {
    return this.request("POST", `/api/chaincode-proposals/${encodeURIComponent(id)}/vote`, {
      decision,
    });
  }
}
