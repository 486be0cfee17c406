"""Cost model figures: headline numbers, sweeps, and convergence.

Evaluates the step tables for both scenarios and methods, prints the reference
reductions, and writes the sweep CSVs (total operational cost over the number
of orgs; lead time over channels / chaincodes). The reduction of the add-org
scenario converges to one third as the network grows.
"""

from fractions import Fraction

from opsflow.costmodel import (
    CostParams,
    closed_form,
    headline_report,
    step_table,
    sweep,
    toc,
    toc_ratio_limit,
)
from opsflow.scenario import emit_results

print("reference reductions:")
for name, entry in headline_report().items():
    print(f"  {name}: {entry}")

params = CostParams(n=10, ch=2, cc=2)
print("\nstep-by-step, add-org conventional at N=10, CH=2, CC=2:")
for step in step_table("add_org", "conventional").steps:
    print(f"  {step.step_id:<16} x{step.multiplicity(params)}")
print("  total:", toc(step_table("add_org", "conventional"), params))

print("\nwriting sweep CSVs:")
jobs = [
    ("add_org", "toc", {"ch": 2, "cc": 2}, ("n", 2, 20), "fig_add_org_toc.csv"),
    ("add_org", "lt", {"n": 10, "cc": 2}, ("ch", 2, 10), "fig_add_org_lt.csv"),
    ("deploy_cc", "toc", {"ch": 2, "cc": 2}, ("n", 2, 20), "fig_deploy_cc_toc.csv"),
    ("deploy_cc", "lt", {"n": 10}, ("cc", 2, 10), "fig_deploy_cc_lt.csv"),
]
for scenario, kind, fixed, vary, path in jobs:
    rows = sweep(scenario, kind, fixed, vary)
    emit_results(rows, path)
    print(f"  {path}: {len(rows)} rows")

print("\nconvergence of the add-org TOC reduction (CH=2, CC=2):")
for n in (10, 100, 10_000, 1_000_000):
    p = CostParams(n=n, ch=2, cc=2)
    conv = closed_form("add_org", "conventional", "toc", p)
    prop = closed_form("add_org", "proposed", "toc", p)
    print(f"  N={n:>9}: reduction {float(1 - Fraction(prop, conv)) * 100:6.2f}%")
print(f"  limit     : reduction {float(1 - toc_ratio_limit(2)) * 100:6.2f}%")
