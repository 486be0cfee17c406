"""The four channel-update artifacts, end to end.

An administrator fetches the current channel configuration, computes a delta
(the update), collects signatures from a majority of member orgs, bundles
everything into an envelope, and submits it. The same library backs the
`opsflow configtx` subcommands and is called internally by the workflow
contract.
"""

from opsflow.configtx import (
    ConfigOp,
    assemble_envelope,
    compute_update,
    sign_update,
)
from opsflow.simnet.genesis import GenesisSpec
from opsflow.simnet.network import Network

net = Network.create(GenesisSpec.standard(n_orgs=4, n_channels=1, n_chaincodes=0, seed=42))
channel = "app-channel-1"

# Step 1: fetch the current configuration.
base = net.fetch_config_block(channel)
print("base version:", base.config_version, "members:", base.member_orgs)

# Step 2: compute the delta that adds a freshly synthesized org.
new_org = net.synthesize_org("org5")
update = compute_update(
    base,
    [
        ConfigOp("add_org", "org5", new_org.msp_descriptor),
        ConfigOp("add_orderer_org", "org5", new_org.msp_descriptor),
    ],
)
print("delta ops:", [op.kind for op in update.ops])

# Step 3: collect signatures from a majority (3 of 4).
signers = ["org1", "org2", "org3"]
signatures = [sign_update(net.orgs[s].identity, update) for s in signers]

# Step 4: assemble the envelope and send it to the channel.
keys = {s: net.orgs[s].identity.public_key for s in signers}
envelope = assemble_envelope(update, signatures, keys)
version = net.apply_config_envelope(channel, envelope)
print("applied; new version:", version)
print("members now:", net.fetch_config_block(channel).member_orgs)

# A stale envelope (recomputed against the old version) is rejected atomically.
from opsflow.simnet.types import ConfigRejectedError

try:
    net.apply_config_envelope(channel, envelope)
except ConfigRejectedError as exc:
    print("second submission rejected:", exc.reason)
