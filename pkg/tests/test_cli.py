import json

import pytest

from flowqubo import BinaryProgram, Constraint, IlDesignSpace, QuboModel, SampleSet
from flowqubo.cli import main


@pytest.fixture()
def tiny_space_file(tmp_path):
    space = IlDesignSpace(
        reactors=("R1",), separators=("S1",), cations=("c1",), anions=("a1",),
        c_fixed={"R1": 2.0, "S1": 1.0},
        c_oper_reactor={"R1": 1.0},
        c_oper_separator={"S1": 1.0},
        c_invest={"R1": 0.5, "S1": 0.25},
        c_energy={"S1": 0.125},
        alpha={"R1": 0.8},
        beta={"S1": {"c1": {"a1": 1.0}}},
        f_lower={"R1": 1.0, "S1": 1.0},
        f_upper={"R1": 20.0, "S1": 16.0},
        demand=5.0,
    )
    path = tmp_path / "tiny_space.json"
    space.save(path)
    return str(path)


@pytest.fixture()
def custom_model_file(tmp_path):
    program = BinaryProgram(
        var_names=("a", "b"),
        objective={"a": 1.0, "b": 2.0},
        constraints=(Constraint({"a": 1.0, "b": 1.0}, ">=", 1.0, label="pick one"),),
    )
    path = tmp_path / "model.json"
    program.save(path)
    return str(path)


def test_build_writes_artifact_set(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["build", "--case", "ds", "--out", str(out)]) == 0
    for name in ("ip.json", "qubo.json", "reformulation.json", "run_config.json"):
        assert (out / name).exists()
    stdout = capsys.readouterr().out
    assert "binary variables: 19" in stdout
    assert "qubo variables: 28" in stdout
    assert "penalty weight: 509.0" in stdout
    program = BinaryProgram.load(out / "ip.json")
    assert program.num_vars == 19
    qubo = QuboModel.load(out / "qubo.json")
    assert qubo.num_vars == 28
    config = json.loads((out / "run_config.json").read_text())
    assert config["command"] == "build"
    assert config["rho"] == 509.0


def test_build_rejects_bad_rho(tmp_path, capsys):
    assert main(["build", "--case", "ds", "--rho", "-4",
                 "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_custom_case_requires_model(tmp_path, capsys):
    assert main(["build", "--case", "custom", "--out", str(tmp_path)]) == 2
    assert "--model" in capsys.readouterr().err


def test_solve_custom_model(tmp_path, custom_model_file):
    out = tmp_path / "out"
    assert main(["solve", "--case", "custom", "--model", custom_model_file,
                 "--solver", "oracle", "--out", str(out)]) == 0
    samples = SampleSet.load(out / "samples.json")
    assert samples.solver == "oracle"
    assert samples.best().objective == 1.0


def test_solve_oracle_ds(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["solve", "--case", "ds", "--solver", "oracle",
                 "--out", str(out)]) == 0
    samples = SampleSet.load(out / "samples.json")
    assert len(samples.records) == 36
    assert samples.best().objective == 138.0
    stdout = capsys.readouterr().out
    assert "solver: oracle  status: ok" in stdout
    assert "records: 36" in stdout


def test_solve_bb_modes_agree_with_oracle(tmp_path):
    out_bb = tmp_path / "bb"
    out_enum = tmp_path / "enum"
    assert main(["solve", "--case", "ds", "--solver", "bb",
                 "--out", str(out_bb)]) == 0
    assert main(["solve", "--case", "ds", "--solver", "bb-enumerate",
                 "--out", str(out_enum)]) == 0
    best = SampleSet.load(out_bb / "samples.json").best()
    enum = SampleSet.load(out_enum / "samples.json")
    assert best.objective == 138.0
    assert len(enum.records) == 36


def test_solve_pool_size_validation(tmp_path, capsys):
    assert main(["solve", "--case", "ds", "--solver", "bb-pool",
                 "--pool-size", "0", "--out", str(tmp_path)]) == 2
    assert "pool-size" in capsys.readouterr().err


def test_solve_sa_seeded_rerun_is_byte_identical(tmp_path, tiny_space_file):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    argv = ["solve", "--case", "il", "--params", tiny_space_file,
            "--solver", "sa", "--seed", "11", "--reads", "50",
            "--sweeps", "60"]
    assert main(argv + ["--out", str(out_a)]) == 0
    assert main(argv + ["--out", str(out_b)]) == 0
    for name in ("samples.json", "run_config.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_solve_sa_invalid_reads_exits_3(tmp_path, capsys):
    assert main(["solve", "--case", "ds", "--solver", "sa", "--seed", "1",
                 "--reads", "0", "--out", str(tmp_path)]) == 3
    assert "error:" in capsys.readouterr().err


def test_tau_is_null_unless_requested(tmp_path, tiny_space_file):
    argv = ["solve", "--case", "il", "--params", tiny_space_file,
            "--solver", "sa", "--seed", "3", "--reads", "20", "--sweeps", "30"]
    out_plain = tmp_path / "plain"
    assert main(argv + ["--out", str(out_plain)]) == 0
    payload = json.loads((out_plain / "samples.json").read_text())
    assert payload["tau_seconds"] is None
    out_tau = tmp_path / "tau"
    assert main(argv + ["--record-tau", "--out", str(out_tau)]) == 0
    payload = json.loads((out_tau / "samples.json").read_text())
    assert isinstance(payload["tau_seconds"], float)


def test_import_round_trip(tmp_path):
    out_oracle = tmp_path / "oracle"
    assert main(["solve", "--case", "ds", "--solver", "oracle",
                 "--out", str(out_oracle)]) == 0
    out_import = tmp_path / "imported"
    assert main(["solve", "--case", "ds", "--solver", "import",
                 "--import-file", str(out_oracle / "samples.json"),
                 "--out", str(out_import)]) == 0
    original = SampleSet.load(out_oracle / "samples.json")
    imported = SampleSet.load(out_import / "samples.json")
    assert imported.records == original.records


def test_import_energy_check_rejects_program_level_samples(tmp_path, capsys):
    # oracle samples live in the 19-variable source space, not the QUBO space,
    # so recomputing their energies against the case QUBO must fail loudly
    out_oracle = tmp_path / "oracle"
    assert main(["solve", "--case", "ds", "--solver", "oracle",
                 "--out", str(out_oracle)]) == 0
    code = main(["solve", "--case", "ds", "--solver", "import",
                 "--import-file", str(out_oracle / "samples.json"),
                 "--check-energies", "--out", str(tmp_path / "checked")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_import_requires_file(tmp_path, capsys):
    assert main(["solve", "--case", "ds", "--solver", "import",
                 "--out", str(tmp_path)]) == 2
    assert "--import-file" in capsys.readouterr().err


def test_report_with_reference(tmp_path, capsys):
    out_oracle = tmp_path / "oracle"
    assert main(["solve", "--case", "ds", "--solver", "oracle",
                 "--out", str(out_oracle)]) == 0
    out_report = tmp_path / "report"
    assert main(["report", "--samples", str(out_oracle / "samples.json"),
                 "--reference", str(out_oracle / "samples.json"),
                 "--target", "both", "--case", "ds",
                 "--out", str(out_report)]) == 0
    lines = (out_report / "ttt.csv").read_text().splitlines()
    assert lines[0] == "solver,tau,ttopt99,ttfeas99,coverage"
    assert lines[1] == "oracle,-,-,-,36/36"
    div = json.loads((out_report / "diversity.json").read_text())
    assert div["total"] == 36
    assert div["coverage"] == 1.0
    assert div["rank_hits"]["1"] == 1
    stdout = capsys.readouterr().out
    assert "coverage=36/36" in stdout


def test_report_s_column_follows_flag(tmp_path):
    out_oracle = tmp_path / "oracle"
    assert main(["solve", "--case", "ds", "--solver", "oracle",
                 "--out", str(out_oracle)]) == 0
    out_report = tmp_path / "report"
    assert main(["report", "--samples", str(out_oracle / "samples.json"),
                 "--target", "opt", "--s", "0.5", "--case", "ds",
                 "--out", str(out_report)]) == 0
    header = (out_report / "ttt.csv").read_text().splitlines()[0]
    assert header == "solver,tau,ttopt50,ttfeas50,coverage"


def test_report_validation(tmp_path, capsys):
    out_oracle = tmp_path / "oracle"
    assert main(["solve", "--case", "ds", "--solver", "oracle",
                 "--out", str(out_oracle)]) == 0
    samples = str(out_oracle / "samples.json")
    assert main(["report", "--samples", samples, "--s", "1.5",
                 "--out", str(tmp_path / "r1")]) == 2
    assert main(["report", "--samples", samples, "--target", "feas",
                 "--case", "ds", "--out", str(tmp_path / "r2")]) == 2
    err = capsys.readouterr().err
    assert "--s" in err and "--reference" in err


def test_sweep_seeded_rerun_is_byte_identical(tmp_path, tiny_space_file, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    argv = ["sweep", "--case", "il", "--params", tiny_space_file,
            "--seed", "5", "--budget", "80", "--starts", "3"]
    assert main(argv + ["--out", str(out_a)]) == 0
    assert main(argv + ["--out", str(out_b)]) == 0
    assert (out_a / "pareto.csv").read_bytes() == (out_b / "pareto.csv").read_bytes()
    lines = (out_a / "pareto.csv").read_text().splitlines()
    assert lines[0] == "config_id,discrete_objective,continuous_objective,status,on_front"
    assert len(lines) == 2
    assert lines[1].startswith("1111,")
    assert lines[1].endswith(",ok,true")
    assert "on pareto front: 1" in capsys.readouterr().out


def test_sweep_rejects_ds_case(tmp_path, capsys):
    assert main(["sweep", "--case", "ds", "--out", str(tmp_path)]) == 2
    assert "il case only" in capsys.readouterr().err


def test_out_dir_env_fallback(tmp_path, monkeypatch):
    target = tmp_path / "from-env"
    monkeypatch.setenv("FLOWQUBO_OUT_DIR", str(target))
    assert main(["solve", "--case", "ds", "--solver", "bb"]) == 0
    assert (target / "samples.json").exists()
