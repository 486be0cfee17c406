// Shapes served by the admin API. The portal renders them verbatim; all
// validation happens server-side.

export interface ChannelInfo {
  channel_id: string;
  kind: string;
  member_orgs: string[];
  orderer_orgs: string[];
  consortium_orgs: string[];
  config_version: number;
}

export interface TaskRecord {
  proposal_id: string;
  org_id: string;
  task: string;
  ok: boolean;
  detail: string;
  block_number: number;
}

export interface ConfigOp {
  kind: string;
  org_id: string;
  msp_descriptor: Record<string, unknown> | null;
}

export interface SourceRef {
  repository_url: string;
  commit_id: string;
  path: string;
}

export interface ChaincodeDefinition {
  name: string;
  version: string;
  sequence: number;
  endorsement_policy: string;
  source_ref: SourceRef | null;
}

interface ProposalBase {
  proposal_id: string;
  proposer: string;
  status: string;
  electorate: string[];
  attempt: number;
  executor: string | null;
  history: TaskRecord[];
}

export interface ChannelProposal extends ProposalBase {
  workflow: "channel_update";
  target_channel_id: string;
  description: string;
  spec: ConfigOp[];
  votes: Record<string, string>; // org -> signature
}

export interface ChaincodeProposal extends ProposalBase {
  workflow: "chaincode_update";
  channel_id: string;
  definition: ChaincodeDefinition;
  votes: Record<string, "for" | "against">;
  org_task_status: Record<string, Record<string, { ok: boolean; detail: string }>>;
}

export type Proposal = ChannelProposal | ChaincodeProposal;

export interface HistoryResponse {
  proposal_id: string;
  status: string;
  records: TaskRecord[];
}

export function isChannelProposal(p: Proposal): p is ChannelProposal {
  return p.workflow === "channel_update";
}
