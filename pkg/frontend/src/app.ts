// The portal application: hash routing, polling, and form/vote actions.
//
// Stateless by construction: every render is built from fresh API reads, so
// reloading the page (or constructing a second portal on the same hash)
// reconstructs the identical view. All validation errors come from the API
// and are shown inline in the error banner.

import { ApiError, PortalApi } from "./api.js";
import type { PortalConfig } from "./config.js";
import type { ChaincodeDefinition, ConfigOp } from "./types.js";
import {
  channelsView,
  createChaincodeProposalForm,
  createChannelProposalForm,
  navBar,
  proposalDetailView,
  proposalListView,
} from "./views.js";

type Route =
  | { view: "channels" }
  | { view: "proposals" }
  | { view: "proposal"; id: string }
  | { view: "create-channel" }
  | { view: "create-chaincode" };

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").filter(Boolean);
  if (parts[0] === "proposals" && parts[1]) {
    return { view: "proposal", id: parts[1] };
  }
  switch (parts[0]) {
    case "channels":
      return { view: "channels" };
    case "create-channel":
      return { view: "create-channel" };
    case "create-chaincode":
      return { view: "create-chaincode" };
    default:
      return { view: "proposals" };
  }
}

export class Portal {
  readonly api: PortalApi;
  orgId = "";
  private timer: ReturnType<typeof setInterval> | null = null;
  private rendering = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly config: PortalConfig,
    private readonly win: Window = window,
  ) {
    this.api = new PortalApi(config);
  }

  async start(): Promise<void> {
    this.orgId = (await this.api.whoAmI()).org_id;
    this.root.innerHTML = navBar(this.orgId);
    this.root.addEventListener("click", (event) => void this.onClick(event));
    this.root.addEventListener("submit", (event) => void this.onSubmit(event));
    this.win.addEventListener("hashchange", () => void this.refresh());
    await this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.config.pollIntervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  navigate(hash: string): Promise<void> {
    this.win.location.hash = hash;
    return this.refresh();
  }

  private viewEl(): HTMLElement {
    return this.root.querySelector('[data-role="view"]') as HTMLElement;
  }

  private showError(message: string): void {
    const banner = this.root.querySelector('[data-role="error-banner"]');
    if (banner === null) {
      console.error("portal error before mount:", message);
      return;
    }
    banner.textContent = message;
    banner.classList.remove("hidden");
  }

  private clearError(): void {
    const banner = this.root.querySelector('[data-role="error-banner"]');
    if (banner !== null) {
      banner.textContent = "";
      banner.classList.add("hidden");
    }
  }

  /** Re-fetch the current route's data and re-render it. */
  async refresh(): Promise<void> {
    if (this.rendering) {
      return; // a fetch is already in flight; the next tick will catch up
    }
    this.rendering = true;
    try {
      const route = parseRoute(this.win.location.hash);
      const view = this.viewEl();
      if (route.view === "channels") {
        view.innerHTML = channelsView(await this.api.channels());
      } else if (route.view === "proposals") {
        view.innerHTML = proposalListView(await this.api.proposals());
      } else if (route.view === "proposal") {
        const [proposal, history] = await Promise.all([
          this.api.proposal(route.id),
          this.api.history(route.id),
        ]);
        view.innerHTML = proposalDetailView(proposal, history.records, this.orgId);
      } else if (route.view === "create-channel") {
        if (!view.querySelector('[data-role="create-channel-form"]')) {
          view.innerHTML = createChannelProposalForm(await this.api.channels());
        }
      } else if (route.view === "create-chaincode") {
        if (!view.querySelector('[data-role="create-chaincode-form"]')) {
          view.innerHTML = createChaincodeProposalForm(await this.api.channels());
        }
      }
    } catch (error) {
      this.showError(error instanceof Error ? error.message : String(error));
    } finally {
      this.rendering = false;
    }
  }

  private async onClick(event: Event): Promise<void> {
    const target = event.target as HTMLElement;
    const action = target.dataset["action"];
    if (!action || action.startsWith("submit-")) {
      return;
    }
    event.preventDefault();
    const id = target.dataset["id"] ?? "";
    try {
      if (action === "vote-channel") {
        await this.api.voteChannel(id);
      } else if (action === "vote-chaincode") {
        await this.api.voteChaincode(id, target.dataset["decision"] as "for" | "against");
      }
      this.clearError();
      await this.refresh();
    } catch (error) {
      // surface the API's message; keep the rendered state untouched
      this.showError(error instanceof ApiError ? error.detail : String(error));
    }
  }

  private async onSubmit(event: Event): Promise<void> {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    const data = new FormData(form);
    const get = (name: string) => String(data.get(name) ?? "");
    try {
      let proposalId: string;
      if (form.dataset["role"] === "create-channel-form") {
        const spec = JSON.parse(get("spec")) as ConfigOp[];
        const created = await this.api.createChannelProposal(
          get("target"),
          get("description"),
          spec,
        );
        proposalId = created.proposal_id;
      } else if (form.dataset["role"] === "create-chaincode-form") {
        const definition: ChaincodeDefinition = {
          name: get("name"),
          version: get("version"),
          sequence: Number(get("sequence")),
          endorsement_policy: "majority-of-members",
          source_ref: {
            repository_url: get("repository_url"),
            commit_id: get("commit_id"),
            path: get("path"),
          },
        };
        const created = await this.api.createChaincodeProposal(get("channel"), definition);
        proposalId = created.proposal_id;
      } else {
        return;
      }
      this.clearError();
      await this.navigate(`#/proposals/${proposalId}`);
    } catch (error) {
      this.showError(error instanceof ApiError ? error.detail : String(error));
    }
  }
}
