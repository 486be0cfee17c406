// HTML renderers for each view. Pure string-in/string-out: the portal keeps
// no client-side model beyond what the API returned for the current render.

import type {
  ChannelInfo,
  Proposal,
  TaskRecord,
} from "./types.js";
import { isChannelProposal } from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

const e = escapeHtml;

export function navBar(orgId: string): string {
  return `
    <nav class="nav">
      <span class="brand">opsflow portal</span>
      <a href="#/channels" data-nav="channels">Channels</a>
      <a href="#/proposals" data-nav="proposals">Proposals</a>
      <a href="#/create-channel" data-nav="create-channel">New channel update</a>
      <a href="#/create-chaincode" data-nav="create-chaincode">New chaincode</a>
      <span class="org-badge" data-testid="org-badge">${e(orgId)}</span>
    </nav>
    <div data-role="error-banner" class="error hidden" data-testid="error-banner"></div>
    <main data-role="view"></main>`;
}

export function channelsView(channels: ChannelInfo[]): string {
  const rows = channels
    .map(
      (c) => `
      <tr data-testid="channel-row" data-channel="${e(c.channel_id)}">
        <td>${e(c.channel_id)}</td>
        <td>${e(c.kind)}</td>
        <td>${e(c.config_version)}</td>
        <td data-testid="members">${c.member_orgs.map(e).join(", ")}</td>
      </tr>`,
    )
    .join("");
  return `
    <h1>Channels</h1>
    <table class="listing" data-testid="channels-table">
      <thead><tr><th>Channel</th><th>Kind</th><th>Version</th><th>Members</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function proposalTarget(p: Proposal): string {
  return isChannelProposal(p) ? p.target_channel_id : p.channel_id;
}

function proposalKind(p: Proposal): string {
  return isChannelProposal(p) ? "channel update" : "chaincode update";
}

export function proposalListView(proposals: Proposal[]): string {
  if (proposals.length === 0) {
    return `<h1>Proposals</h1><p data-testid="empty">No proposals yet.</p>`;
  }
  const rows = proposals
    .map(
      (p) => `
      <tr data-testid="proposal-row" data-proposal="${e(p.proposal_id)}">
        <td><a href="#/proposals/${e(p.proposal_id)}">${e(p.proposal_id)}</a></td>
        <td>${e(proposalKind(p))}</td>
        <td>${e(proposalTarget(p))}</td>
        <td>${e(p.proposer)}</td>
        <td data-testid="row-status">${e(p.status)}</td>
        <td>${Object.keys(p.votes).length}/${p.electorate.length}</td>
      </tr>`,
    )
    .join("");
  return `
    <h1>Proposals</h1>
    <table class="listing" data-testid="proposals-table">
      <thead><tr><th>Id</th><th>Kind</th><th>Target</th><th>Proposer</th><th>Status</th><th>Votes</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function votesTable(p: Proposal): string {
  const rows = Object.entries(p.votes)
    .map(([org, value]) => {
      const shown = isChannelProposal(p) ? "signed" : value;
      return `<tr><td>${e(org)}</td><td>${e(shown)}</td></tr>`;
    })
    .join("");
  return `
    <table class="listing" data-testid="votes-table">
      <thead><tr><th>Org</th><th>Vote</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function historyTable(records: TaskRecord[]): string {
  const rows = records
    .map(
      (r) => `
      <tr data-testid="history-row">
        <td>${e(r.block_number)}</td>
        <td>${e(r.org_id)}</td>
        <td>${e(r.task)}</td>
        <td>${r.ok ? "ok" : "failed"}</td>
        <td>${e(r.detail)}</td>
      </tr>`,
    )
    .join("");
  return `
    <table class="listing" data-testid="history-table">
      <thead><tr><th>Block</th><th>Org</th><th>Task</th><th>Outcome</th><th>Detail</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

function canVote(p: Proposal, myOrg: string): boolean {
  // only offer actions the API would accept for this org right now
  return p.status === "proposed" && p.electorate.includes(myOrg) && !(myOrg in p.votes);
}

function voteActions(p: Proposal, myOrg: string): string {
  if (!canVote(p, myOrg)) {
    return "";
  }
  if (isChannelProposal(p)) {
    return `<button data-action="vote-channel" data-id="${e(p.proposal_id)}">Vote for</button>`;
  }
  return `
    <button data-action="vote-chaincode" data-decision="for" data-id="${e(p.proposal_id)}">Vote for</button>
    <button data-action="vote-chaincode" data-decision="against" data-id="${e(p.proposal_id)}">Vote against</button>`;
}

export function proposalDetailView(p: Proposal, records: TaskRecord[], myOrg: string): string {
  const subject = isChannelProposal(p)
    ? `<p>Target channel: <strong>${e(p.target_channel_id)}</strong></p>
       <p>${e(p.description)}</p>
       <pre data-testid="spec">${e(JSON.stringify(p.spec, null, 2))}</pre>`
    : `<p>Channel: <strong>${e(p.channel_id)}</strong></p>
       <pre data-testid="definition">${e(JSON.stringify(p.definition, null, 2))}</pre>`;
  return `
    <h1>${e(p.proposal_id)}</h1>
    <p>
      Status: <strong data-testid="status">${e(p.status)}</strong>
      &middot; proposer ${e(p.proposer)}
      &middot; executor ${e(p.executor ?? "-")}
      &middot; attempt ${e(p.attempt)}
    </p>
    ${subject}
    <div class="actions" data-testid="actions">${voteActions(p, myOrg)}</div>
    <h2>Votes (${Object.keys(p.votes).length}/${p.electorate.length})</h2>
    ${votesTable(p)}
    <h2>History</h2>
    ${historyTable(records)}`;
}

export function createChannelProposalForm(channels: ChannelInfo[]): string {
  const options = channels
    .map((c) => `<option value="${e(c.channel_id)}">${e(c.channel_id)}</option>`)
    .join("");
  return `
    <h1>New channel update proposal</h1>
    <form data-role="create-channel-form">
      <label>Target channel
        <select name="target" data-testid="target-select">${options}</select>
      </label>
      <label>Description <input name="description" type="text"></label>
      <label>Operations (JSON list)
        <textarea name="spec" rows="8" data-testid="spec-input">[]</textarea>
      </label>
      <button type="submit" data-action="submit-channel-proposal">Create proposal</button>
    </form>`;
}

export function createChaincodeProposalForm(channels: ChannelInfo[]): string {
  const options = channels
    .filter((c) => c.kind === "application")
    .map((c) => `<option value="${e(c.channel_id)}">${e(c.channel_id)}</option>`)
    .join("");
  return `
    <h1>New chaincode proposal</h1>
    <form data-role="create-chaincode-form">
      <label>Channel <select name="channel" data-testid="channel-select">${options}</select></label>
      <label>Name <input name="name" type="text"></label>
      <label>Version <input name="version" type="text" value="1.0"></label>
      <label>Sequence <input name="sequence" type="number" value="1"></label>
      <label>Repository URL <input name="repository_url" type="text"></label>
      <label>Commit <input name="commit_id" type="text"></label>
      <label>Path <input name="path" type="text"></label>
      <button type="submit" data-action="submit-chaincode-proposal">Create proposal</button>
    </form>`;
}
