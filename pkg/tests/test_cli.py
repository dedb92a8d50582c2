import json

import pytest

from acbug.cli import main
from acbug.scm import from_json, save

from helpers import root_scm


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def test_gen_to_stdout(tmp_path, capsys):
    cfg = write_json(tmp_path / "gen.json",
                     {"num_vars": 4, "num_parents": 2, "seed": 3})
    assert main(["gen", "--config", cfg]) == 0
    scm = from_json(capsys.readouterr().out)
    assert scm.num_vars == 4
    assert len(scm.outcome.parents) == 2


def test_gen_seed_override_changes_model(tmp_path, capsys):
    cfg = write_json(tmp_path / "gen.json",
                     {"num_vars": 4, "num_parents": 2, "seed": 3})
    main(["gen", "--config", cfg])
    base = capsys.readouterr().out
    main(["gen", "--config", cfg, "--seed", "9"])
    assert capsys.readouterr().out != base


def test_gen_to_file(tmp_path, capsys):
    cfg = write_json(tmp_path / "gen.json", {"num_vars": 3, "num_parents": 1})
    out = tmp_path / "model.json"
    assert main(["gen", "--config", cfg, "--out", str(out)]) == 0
    assert "wrote" in capsys.readouterr().out
    assert from_json(out.read_text()).num_vars == 3


def test_gen_rejects_unknown_field(tmp_path, capsys):
    cfg = write_json(tmp_path / "gen.json",
                     {"num_vars": 3, "num_parents": 1, "fanout": 2})
    assert main(["gen", "--config", cfg]) == 2
    assert "fanout" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["gen", "--config", str(tmp_path / "nope.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "valid JSON" in capsys.readouterr().err


def test_run_end_to_end(tmp_path, capsys):
    cfg = write_json(tmp_path / "exp.json", {
        "gen": {"num_vars": 3, "num_parents": 1, "support_lo": 2,
                "support_hi": 3},
        "sweep": {"param": "num_parents", "values": [1, 2]},
        "algorithms": ["modl", "p1"],
        "epsilon": 1.0,
        "delta": 0.2,
        "num_scms": 1,
        "runs_per_scm": 2,
        "schedule": "final-epsilon",
        "mc_budget": 20000,
    })
    outdir = tmp_path / "results"
    assert main(["run", "--config", cfg, "--out", str(outdir),
                 "--seed", "5"]) == 0
    assert "records" in capsys.readouterr().out
    recs = (outdir / "records.csv").read_text().strip().split("\n")
    assert len(recs) == 1 + 2 * 1 * 2 * 2
    assert (outdir / "summary.csv").is_file()
    assert (outdir / "scms" / "sweep0_scm0.json").is_file()


def test_run_rejects_bad_experiment_config(tmp_path):
    cfg = write_json(tmp_path / "exp.json", {"gen": {"num_vars": 2}})
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_bound_on_saved_model(tmp_path, capsys):
    scm = root_scm([2], {0: [1.0, 0.0]}, noise_sigma2=1.0)
    model = tmp_path / "model.json"
    save(scm, model)
    cfg = write_json(tmp_path / "bound.json", {
        "scm": str(model), "epsilon": 0.5, "delta": 0.1, "sigma2": 1.0,
        "reward_bound": 5.0,
    })
    assert main(["bound", "--config", cfg]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert len(out) == 1
    label, value = out[0].split()
    assert label == "H_eps"
    assert float(value) == pytest.approx(93.41681223529775, rel=1e-8)


def test_bound_with_known_parent_count(tmp_path, capsys):
    scm = root_scm([2], {0: [1.0, 0.0]}, noise_sigma2=1.0)
    model = tmp_path / "model.json"
    save(scm, model)
    cfg = write_json(tmp_path / "bound.json", {
        "scm": str(model), "epsilon": 0.5, "delta": 0.1, "sigma2": 1.0,
        "reward_bound": 5.0, "parents_bound": 1,
    })
    assert main(["bound", "--config", cfg]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0].startswith("H_eps ")
    assert lines[1].startswith("H_eps_known_parents ")
    assert float(lines[1].split()[1]) < float(lines[0].split()[1])


def test_bound_requires_model_source(tmp_path, capsys):
    cfg = write_json(tmp_path / "bound.json", {"epsilon": 0.5, "delta": 0.1})
    assert main(["bound", "--config", cfg]) == 2
    assert "'scm'" in capsys.readouterr().err


def test_bound_requires_epsilon_and_delta(tmp_path):
    cfg = write_json(tmp_path / "bound.json", {
        "gen": {"num_vars": 2, "num_parents": 1}, "epsilon": 0.5,
    })
    assert main(["bound", "--config", cfg]) == 2


def test_validate_passes(capsys):
    assert main(["validate", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "all" in out and "passed" in out
    assert "FAIL" not in out


def test_unknown_flags_and_commands_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        main(["gen", "--config", "x.json", "--frobnicate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["launch"])
    assert e.value.code == 2
    capsys.readouterr()
