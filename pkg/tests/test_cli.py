"""Command line behavior: exit codes, document shapes, determinism."""

import json

import pytest

from segbasis import main
from segbasis.cli import _parse_bumps, parse_synth_config

STEP_CSV = "0,1,2,3\n0,0,1,1\n"


@pytest.fixture
def step_csv(tmp_path):
    path = tmp_path / "step.csv"
    path.write_text(STEP_CSV)
    return str(path)


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(
        "# compact instance for fast runs\n"
        "n = 3\n"
        "m = 16\n"
        "bumps = 0.3:0.05:1.0, 0.7:0.1:-0.5\n"
    )
    return str(path)


def _run_json(tmp_path, argv, expect=0):
    out = tmp_path / "result.json"
    code = main([*argv, "--output", str(out)])
    assert code == expect
    return json.loads(out.read_text())


# ---------------------------------------------------------------- fit


def test_fit_step(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["fit", "--input", step_csv, "--grid-row", "--segments", "2"],
    )
    assert doc["command"] == "fit" and doc["cost"] == "sse" and doc["k"] == 2
    (row,) = doc["records"]
    assert row["ends"] == [2, 4]
    # downdated rows leave ~1e-16 of cancellation noise on exact-fit segments
    assert abs(row["sse_total"]) < 1e-12 and abs(row["loo_total"]) < 1e-12
    assert doc["source"]["kind"] == "csv"


def test_fit_whole_range(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["fit", "--input", step_csv, "--grid-row", "--segments", "1"],
    )
    assert doc["records"][0]["ends"] == [4]
    assert doc["records"][0]["sse_total"] == 1.0


def test_fit_linear_omits_loo_total(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["fit", "--input", step_csv, "--grid-row", "--segments", "2",
         "--cost", "linear"],
    )
    (row,) = doc["records"]
    assert row["objective_total"] == 0.0
    assert "loo_total" not in row


def test_fit_emits_coefficients(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["fit", "--input", step_csv, "--grid-row", "--segments", "2",
         "--emit-coefficients"],
    )
    assert doc["coefficients"] == [[0.0, 1.0]]


def test_fit_timing_is_opt_in(tmp_path, step_csv):
    base = ["fit", "--input", step_csv, "--grid-row", "--segments", "2"]
    assert "timing" not in _run_json(tmp_path, base)
    timed = _run_json(tmp_path, [*base, "--timing"])
    assert set(timed["timing"]) == {"build_ms", "dp_ms"}


def test_fit_k_out_of_range(tmp_path, step_csv, capsys):
    code = main(["fit", "--input", step_csv, "--grid-row", "--segments", "0",
                 "--output", str(tmp_path / "x.json")])
    assert code == 1
    assert "k out of range" in capsys.readouterr().err


def test_fit_loo_infeasible_writes_flagged_document(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["fit", "--input", step_csv, "--grid-row", "--segments", "3",
         "--cost", "loo"],
        expect=2,
    )
    assert doc["infeasible"] is True
    (row,) = doc["records"]
    assert row["ends"] is None
    assert row["sse_total"] == "inf" and row["loo_total"] == "inf"
    assert row["infeasible"] is True


def test_fit_missing_input_file(tmp_path, capsys):
    code = main(["fit", "--input", str(tmp_path / "absent.csv"),
                 "--segments", "2"])
    assert code == 1
    assert "segbasis: error:" in capsys.readouterr().err


def test_fit_synth_default(tmp_path):
    doc = _run_json(tmp_path, ["fit", "--synth", "default", "--segments", "4"])
    src = doc["source"]
    assert src["kind"] == "synth" and (src["n"], src["m"]) == (124, 256)
    assert src["seed"] == 0
    assert len(doc["records"][0]["ends"]) == 4


# ---------------------------------------------------------------- usage errors


@pytest.mark.parametrize(
    "argv",
    [
        ["fit", "--input", "x.csv", "--segments", "2", "--frobnicate"],
        ["fit", "--input", "x.csv"],  # --segments is required
        ["fit", "--input", "x.csv", "--synth", "default", "--segments", "2"],
        ["fit", "--segments", "2"],  # an input source is required
        ["fit", "--input", "x.csv", "--segments", "2", "--cost", "cubic"],
        ["select", "--input", "x.csv", "--strategy", "bogus"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors_exit_64(argv, capsys):
    assert main(argv) == 64
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "fit" in capsys.readouterr().out


# ---------------------------------------------------------------- select


def test_select_full_loo_step(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["select", "--input", step_csv, "--grid-row"],
    )
    assert doc["strategy"] == "full-loo"
    assert doc["k_max"] == 2  # default: half the grid size
    assert doc["selected_k"] == 2
    assert [r["k"] for r in doc["records"]] == [1, 2]


def test_select_standard_marks_unselectable_rows(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["select", "--input", step_csv, "--grid-row",
         "--strategy", "standard", "--max-segments", "4"],
    )
    assert doc["selected_k"] == 2
    tail = doc["records"][2:]
    for row in tail:
        # the SSE-optimal basis exists but its estimate is infinite
        assert row["ends"] is not None
        assert row["loo_total"] == "inf"
        assert row["infeasible"] is True


def test_select_full_loo_marks_infeasible_rows(tmp_path, step_csv):
    doc = _run_json(
        tmp_path,
        ["select", "--input", step_csv, "--grid-row", "--max-segments", "3"],
    )
    row = doc["records"][2]
    assert row["ends"] is None and row["infeasible"] is True


def test_select_degenerate_exits_two(tmp_path):
    single = tmp_path / "single.csv"
    single.write_text("5\n")
    doc = _run_json(
        tmp_path,
        ["select", "--input", str(single)],
        expect=2,
    )
    assert doc["degenerate"] is True
    assert doc["selected_k"] == 1


def test_select_k_max_out_of_range(tmp_path, step_csv, capsys):
    code = main(["select", "--input", step_csv, "--grid-row",
                 "--max-segments", "9"])
    assert code == 1
    assert "k_max out of range" in capsys.readouterr().err


# ---------------------------------------------------------------- experiment


def test_experiment_noiseless(tmp_path, small_cfg):
    doc = _run_json(
        tmp_path,
        ["experiment", "--synth", small_cfg, "--max-segments", "5"],
    )
    names = [r["basis"] for r in doc["records"]]
    assert names == ["fixed", "standard-then-loo", "full-loo"]
    for row in doc["records"]:
        # sigma = 0: the noisy data IS the clean data, errors must agree
        assert row["clean_error"] == row["noisy_error"]
    assert doc["records"][0]["k"] == 5
    assert doc["records"][1]["selected_k"] == doc["records"][1]["k"]
    assert doc["source"]["sigma"] == 0.0
    assert doc["source"]["noise_seed"] == doc["source"]["seed"] + 1


def test_experiment_negative_sigma(capsys):
    assert main(["experiment", "--sigma", "-1"]) == 1
    assert "sigma must be nonnegative" in capsys.readouterr().err


def test_experiment_noisy_clean_errors_differ(tmp_path, small_cfg):
    doc = _run_json(
        tmp_path,
        ["experiment", "--synth", small_cfg, "--sigma", "0.1",
         "--seed", "3", "--max-segments", "5"],
    )
    for row in doc["records"]:
        assert row["clean_error"] != row["noisy_error"]


# ---------------------------------------------------------------- synth config


def test_config_applies_values(small_cfg):
    spec = parse_synth_config(small_cfg)
    assert (spec.n, spec.m) == (3, 16)
    assert spec.bumps == ((0.3, 0.05, 1.0), (0.7, 0.1, -0.5))
    assert spec.jitter == 0.2  # untouched keys keep their defaults


def test_config_unknown_key(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n = 4\nwobble = 3\n")
    with pytest.raises(ValueError, match=r"bad\.cfg:2: unknown key 'wobble'"):
        parse_synth_config(str(bad))
    assert main(["experiment", "--synth", str(bad)]) == 1
    assert "unknown key" in capsys.readouterr().err


def test_config_missing_equals(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    with pytest.raises(ValueError, match="expected key = value"):
        parse_synth_config(str(bad))


def test_config_bad_bump(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("bumps = 0.5:0.1\n")
    with pytest.raises(ValueError, match="expected center:width:amplitude"):
        parse_synth_config(str(bad))


def test_config_invalid_spec(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("m = 1\n")
    with pytest.raises(ValueError, match="m must be at least 2"):
        parse_synth_config(str(bad))


def test_parse_bumps():
    assert _parse_bumps("0.1:0.2:0.3, 0.4:0.5:-0.6") == (
        (0.1, 0.2, 0.3),
        (0.4, 0.5, -0.6),
    )
    assert _parse_bumps("") == ()


# ---------------------------------------------------------------- bench


def test_bench_csv_shape(tmp_path):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--m-list", "16,32", "--n", "2", "--k", "4",
                 "--repeats", "2", "--output", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "m,n,k,repeat,build_ms,dp_ms"
    assert len(lines) == 1 + 2 * (2 + 1)  # per grid size: repeats + a median
    rows = [line.split(",") for line in lines[1:]]
    assert [r[3] for r in rows] == ["1", "2", "median"] * 2
    assert all(float(r[4]) >= 0 and float(r[5]) >= 0 for r in rows)


def test_bench_stdout(capsys):
    assert main(["bench", "--m-list", "8", "--n", "1", "--k", "2",
                 "--repeats", "1"]) == 0
    assert capsys.readouterr().out.startswith("m,n,k,repeat,build_ms,dp_ms")


@pytest.mark.parametrize(
    "argv, message",
    [
        (["bench", "--m-list", "a,b"], "bad --m-list"),
        (["bench", "--m-list", ""], "empty --m-list"),
        (["bench", "--m-list", "8", "--k", "9"], "k out of range"),
        (["bench", "--repeats", "0"], "repeats must be at least 1"),
    ],
)
def test_bench_input_errors(argv, message, capsys):
    assert main(argv) == 1
    assert message in capsys.readouterr().err


# ---------------------------------------------------------------- determinism


def _bytes_for(tmp_path, argv, name):
    path = tmp_path / name
    assert main([*argv, "--output", str(path)]) == 0
    return path.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["fit", "--synth", "CFG", "--segments", "3"],
        ["fit", "--synth", "CFG", "--segments", "3", "--cost", "loo"],
        ["select", "--synth", "CFG", "--seed", "2"],
        ["select", "--synth", "CFG", "--strategy", "standard"],
        ["experiment", "--synth", "CFG", "--sigma", "0.05", "--seed", "7",
         "--max-segments", "6"],
    ],
)
def test_repeat_runs_are_byte_identical(tmp_path, small_cfg, argv):
    argv = [small_cfg if a == "CFG" else a for a in argv]
    first = _bytes_for(tmp_path, argv, "a.json")
    second = _bytes_for(tmp_path, argv, "b.json")
    assert first == second
