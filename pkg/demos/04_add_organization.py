"""Adding an organization, with and without executor failures.

Runs the add-org scenario through the workflow contracts (one proposal per
channel, majority votes, agent-executed channel updates, automatic bootstrap
of the new org) and compares the administrator action counts against the cost
model. Then shows the failure model: a failing executor is replaced by the
next seeded-random voter, so the workflow still completes.
"""

from opsflow.costmodel import CostParams
from opsflow.scenario import run_scenario, run_scenario_with_runtime

report = run_scenario("add-org", "opssc", CostParams(n=4, ch=2, cc=2), seed=7)
print("success:", report.success)
print("administrator actions:", report.action_counts)
print("matches the cost model:", report.comparison["all_match"])
print("proposals:", {p: s for p, s in report.proposal_statuses.items()})

# Conventional mode reaches the same application/system state with more steps.
conventional = run_scenario("add-org", "conventional", CostParams(n=4, ch=2, cc=2), seed=7)
print("\nconventional actions:", sum(conventional.action_counts.values()),
      "vs workflow:", sum(report.action_counts.values()))
print("app+system state identical across modes:",
      conventional.app_system_digest == report.app_system_digest)

# Failure model: org2's agent fails whenever it is selected to execute a
# channel update; reselection still drives every proposal to committed.
resilient, runtime = run_scenario_with_runtime(
    "add-org", "opssc", CostParams(n=4, ch=1, cc=1), seed=7,
    failure_specs=("update_channel@org2@0",),
)
print("\nwith injected executor failures, success:", resilient.success)
for pid in resilient.proposal_ids:
    records = [
        (r["org_id"], r["ok"])
        for r in runtime.admin("org1").proposal_history(pid)
        if r["task"] == "update_channel"
    ]
    print(f"  {pid}: executor attempts {records}")
