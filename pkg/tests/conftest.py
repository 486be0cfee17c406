"""Shared fixtures and helpers for the test suite."""

import pytest

from opsflow.configtx import ConfigOp, sign_update
from opsflow.runtime import OpsRuntime
from opsflow.simnet.genesis import GenesisSpec
from opsflow.simnet.network import Network


@pytest.fixture
def net322():
    """Plain network (no workflow contracts): 3 orgs, 2 channels, 2 chaincodes."""
    return Network.create(GenesisSpec.standard(3, 2, 2, seed=7))


@pytest.fixture
def rt422():
    """Full runtime: 4 orgs, 2 channels, 2 chaincodes."""
    return OpsRuntime.standard(4, 2, 2, seed=7)


def make_add_org_envelope(network, channel_id, new_org, signer_ids, extra_ops=()):
    """Assemble a signed add-org envelope using the orgs' real identities."""
    from opsflow.configtx import assemble_envelope, compute_update

    base = network.fetch_config_block(channel_id)
    ops = [ConfigOp("add_org", new_org.org_id, new_org.msp_descriptor), *extra_ops]
    update = compute_update(base, ops)
    signatures = [sign_update(network.orgs[s].identity, update) for s in signer_ids]
    keys = {s: network.orgs[s].identity.public_key for s in signer_ids}
    return assemble_envelope(update, signatures, keys)
