"""Command line interface: every subcommand drives the real machinery."""

import json
import subprocess
import sys

from opsflow.cli import main


def test_net_init_writes_canonical_spec(tmp_path):
    out = tmp_path / "net.json"
    assert main(["net", "init", "--orgs", "3", "--channels", "2", "--chaincodes", "1",
                 "--seed", "7", "--out", str(out)]) == 0
    spec = json.loads(out.read_text())
    assert len(spec["orgs"]) == 3
    assert len(spec["channels"]) == 4
    assert spec["seed"] == 7


def test_net_keys_exports_public_keys(tmp_path):
    net = tmp_path / "net.json"
    keys = tmp_path / "keys.json"
    main(["net", "init", "--orgs", "2", "--seed", "7", "--out", str(net)])
    assert main(["net", "keys", "--net", str(net), "--out", str(keys)]) == 0
    parsed = json.loads(keys.read_text())
    assert set(parsed) == {"org1", "org2"}
    assert all(len(v) == 64 for v in parsed.values())


def test_scenario_run_writes_metrics(tmp_path, capsys):
    metrics = tmp_path / "metrics.json"
    code = main(
        [
            "scenario", "run", "--scenario", "deploy-cc", "--mode", "opssc",
            "--orgs", "4", "--channels", "1", "--chaincodes", "1",
            "--seed", "7", "--metrics", str(metrics),
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["success"] is True
    report = json.loads(metrics.read_text())
    assert report["action_counts"] == {"propose-cc": 1, "vote-cc": 2}


def test_scenario_run_reproducible_metrics(tmp_path):
    args = [
        "scenario", "run", "--scenario", "add-org", "--mode", "opssc",
        "--orgs", "3", "--channels", "1", "--chaincodes", "1", "--seed", "9",
    ]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(args + ["--metrics", str(a)])
    main(args + ["--metrics", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_cost_sweep_csv(tmp_path):
    out = tmp_path / "fig.csv"
    code = main(
        ["cost", "sweep", "--scenario", "1", "--kind", "toc",
         "--fix", "ch=2,cc=2", "--vary", "n=2:20", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "x,conventional,proposed,reduction"
    assert len(lines) == 20
    assert "10,59,30,0.491525" in lines


def test_cost_headline(capsys):
    assert main(["cost", "headline"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["add_org_two_channels"]["reduction_percent"] == "49.15"
    assert report["deploy_cc"]["reduction_percent"] == "81.25"


def test_configtx_pipeline_via_files(tmp_path):
    base = tmp_path / "base.json"
    ops = tmp_path / "ops.json"
    update = tmp_path / "update.json"
    sig1 = tmp_path / "sig1.json"
    sig2 = tmp_path / "sig2.json"
    keys = tmp_path / "keys.json"
    envelope = tmp_path / "env.json"
    new_config = tmp_path / "new.json"

    net = tmp_path / "net.json"
    main(["net", "init", "--orgs", "2", "--channels", "1", "--seed", "5", "--out", str(net)])
    main(["net", "keys", "--net", str(net), "--out", str(keys)])

    base.write_text(
        json.dumps(
            {
                "channel_id": "app-channel-1",
                "kind": "application",
                "config_version": 0,
                "member_orgs": ["org1", "org2"],
                "consortium_orgs": [],
                "orderer_orgs": ["org1", "org2"],
                "mod_policy": "majority-of-members",
            }
        )
    )
    from opsflow.identity import OrgIdentity, msp_descriptor

    org3_key = OrgIdentity.derive(5, "org3").public_key
    ops.write_text(
        json.dumps(
            [{"kind": "add_org", "org_id": "org3",
              "msp_descriptor": msp_descriptor("org3", org3_key)}]
        )
    )

    assert main(["configtx", "compute", "--base", str(base), "--ops", str(ops),
                 "--out", str(update)]) == 0
    assert main(["configtx", "sign", "--update", str(update), "--org", "org1",
                 "--seed", "5", "--out", str(sig1)]) == 0
    assert main(["configtx", "sign", "--update", str(update), "--org", "org2",
                 "--seed", "5", "--out", str(sig2)]) == 0
    assert main(["configtx", "assemble", "--update", str(update), "--sig", str(sig1),
                 "--sig", str(sig2), "--keys", str(keys), "--out", str(envelope)]) == 0
    assert main(["configtx", "apply", "--base", str(base), "--update", str(update),
                 "--out", str(new_config)]) == 0

    applied = json.loads(new_config.read_text())
    assert applied["member_orgs"] == ["org1", "org2", "org3"]
    assert applied["config_version"] == 1
    assembled = json.loads(envelope.read_text())
    assert [s["org_id"] for s in assembled["signatures"]] == ["org1", "org2"]


def test_console_script_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "opsflow.cli", "cost", "headline"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 0
    assert "add_org_two_channels" in result.stdout


def test_failed_scenario_exits_nonzero(tmp_path):
    code = main(
        [
            "scenario", "run", "--scenario", "deploy-cc", "--mode", "opssc",
            "--orgs", "2", "--channels", "1", "--chaincodes", "1", "--seed", "7",
            "--fail", "install@org1@0", "--fail", "install@org1@1",
        ]
    )
    assert code == 1
