"""Deploying a chaincode through the on-chain workflow.

One admin proposes a definition with a source link, other orgs vote, and the
per-org agents take over: download, install, approve everywhere, then a single
seeded-random executor commits. Every task lands in the on-chain history.
"""

from opsflow.repository import SourceRef, synthesize_package
from opsflow.runtime import OpsRuntime
from opsflow.simnet.types import ChaincodeDefinition

rt = OpsRuntime.standard(n_orgs=4, n_channels=1, n_chaincodes=0, seed=7)

definition = ChaincodeDefinition(
    name="trade-cc",
    version="1.0",
    sequence=1,
    source_ref=SourceRef("https://git.example/trade-cc", "3f9a2c", "trade-cc"),
)
rt.repo.put(definition.source_ref, synthesize_package("trade-cc", "1.0"))

admin1 = rt.admin("org1")
proposal = admin1.create_chaincode_proposal("app-channel-1", definition.to_json())
pid = proposal["proposal_id"]
print("proposal", pid, "status:", proposal["status"], "votes:", proposal["votes"])

rt.admin("org2").vote_chaincode_proposal(pid, "for")
print("after 2nd vote:", admin1.get_chaincode_proposal(pid)["status"])

# the third vote reaches the majority; agents deploy and commit synchronously
rt.admin("org3").vote_chaincode_proposal(pid, "for")
final = admin1.get_chaincode_proposal(pid)
print("final status:", final["status"], "committed by:", final["executor"])

print("\non-chain history (block, org, task, ok):")
for record in admin1.proposal_history(pid):
    print(f"  {record['block_number']:3d}  {record['org_id']:<6} {record['task']:<9} {record['ok']}")

state = rt.network.lifecycle_state("app-channel-1", "trade-cc")
print("\ninstalled by:", sorted(state.installs))
print("approved by:", sorted(state.approvals))
print("committed definition:", state.committed_definition.to_json())
