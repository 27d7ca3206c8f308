import json

import pytest

from sdc_res.cli import main, parse_fault
from sdc_res.harness import ConfigError


def test_parse_fault():
    f = parse_fault("bit=3,node=2,iter=4,component=1", 10.0)
    assert (f.bit, f.node, f.iteration, f.component, f.t_fault) == (3, 2, 4, 1, 10.0)
    assert parse_fault("bit=0,node=0,iteration=1", 0.0).component == 0
    for bad in ("bit=3,node=2", "bit=x,node=1,iter=1", "bits=1,node=1,iter=1", "bit=70,node=1,iter=1"):
        with pytest.raises(ConfigError):
            parse_fault(bad, 0.0)


def test_run_prints_json(capsys):
    assert main(["run", "--problem", "dahlquist", "--strategy", "dt_adaptive",
                 "--fault", "bit=0,node=2,iter=2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["strategy"] == "dt_adaptive" and out["restarts"] == 1 and not out["crashed"]
    assert out["fault"]["bit"] == 0


def test_run_crash_is_not_an_error(capsys):
    assert main(["run", "--problem", "lorenz", "--fault", "bit=3,node=2,iter=1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["crashed"] and out["global_error"] == "inf"


@pytest.mark.parametrize("argv", [
    ["run", "--problem", "heat"],
    ["run", "--problem", "lorenz", "--fault", "bit=1"],
    ["run", "--problem", "lorenz", "--fault", "bit=1,node=7,iter=1"],
    ["run", "--problem", "lorenz", "--fault", "bit=1,node=1,iter=1,component=3"],
    ["run", "--problem", "lorenz", "--strategy", "dt_adaptive", "--eps-tol", "-1"],
    ["run", "--problem", "lorenz", "--dt", "0"],
    ["frobnicate"],
    [],
])
def test_config_errors_exit_1(argv, capsys):
    assert main(argv) == 1


def test_campaign_and_stats(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": "dahlquist", "n_faults": 256, "output_dir": str(tmp_path / "o")}))
    assert main(["campaign", "--config", str(cfg), "--quiet"]) == 0
    assert "dahlquist" in capsys.readouterr().out
    assert main(["stats", "--input", str(tmp_path / "o" / "trials.csv"), "--by", "node"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "strategy,node,n,rate" and len(lines) == 1 + 5 * 4
    assert main(["stats", "--input", str(tmp_path / "o" / "trials.csv"), "--recoverable-only"]) == 0


def test_campaign_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": "dahlquist", "strategies": ["k_adaptive"]}))
    assert main(["campaign", "--config", str(bad)]) == 1
    assert main(["campaign", "--config", str(tmp_path / "missing.json")]) == 2


def test_io_errors_exit_2(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": "dahlquist", "n_faults": 4, "output_dir": str(blocker / "out")}))
    assert main(["campaign", "--config", str(cfg)]) == 2
    assert main(["stats", "--input", str(tmp_path / "nope.csv")]) == 2
