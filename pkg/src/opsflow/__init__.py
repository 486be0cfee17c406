"""opsflow: deterministic consortium-network simulator with on-chain
operations workflows, per-org agents, an admin REST API, and an operational
cost model."""

__version__ = "0.1.0"
