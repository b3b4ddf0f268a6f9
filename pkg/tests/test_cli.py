import json

import pytest

from fraclab.bounds import bound_table
from fraclab.cli import main
from fraclab.measures import load_measure


def run(args):
    return main([str(a) for a in args])


IFS_SPEC = {"kind": "ifs", "branch_count": 2, "ratio": 1 / 3,
            "translations": [0.0, 2 / 3], "probabilities": [0.5, 0.5],
            "levels": 12}


def test_construct_and_estimate_roundtrip(tmp_path, capsys):
    spec = tmp_path / "ifs.json"
    spec.write_text(json.dumps(IFS_SPEC))
    out = tmp_path / "cantor.txt"
    assert run(["construct", "--spec", spec, "--out", out]) == 0
    mu = load_measure(out)
    assert mu.n_atoms == 4096
    meta = json.loads((tmp_path / "cantor.txt.meta.json").read_text())
    assert meta["similarity_dimension"] == pytest.approx(0.63093, abs=1e-5)
    code = run(["estimate", "--measure", out, "--base", "3", "--r0", "1",
                "--annuli", "7", "--scale-min", "0.000457247", "--scale-max",
                str(1 / 3), "--json", tmp_path / "est.json"])
    assert code == 0
    est = json.loads((tmp_path / "est.json").read_text())
    assert est["fourier"]["dim_value"] <= 0.15
    assert est["frostman"]["dim_value"] == pytest.approx(0.6309, abs=0.05)
    assert est["box"]["dim_value"] == pytest.approx(0.6309, abs=0.05)


def test_construct_malformed_json_exits_2(tmp_path, capsys):
    spec = tmp_path / "bad.json"
    spec.write_text('{"kind": "ifs", "ratio": }')
    assert run(["construct", "--spec", spec, "--out", tmp_path / "x.txt"]) == 2
    err = capsys.readouterr().err
    assert "line" in err and "column" in err


def test_construct_unknown_kind_names_field(tmp_path, capsys):
    spec = tmp_path / "bad.json"
    spec.write_text('{"kind": "frobnicate"}')
    assert run(["construct", "--spec", spec, "--out", tmp_path / "x.txt"]) == 2
    assert "kind" in capsys.readouterr().err


def test_construct_stochastic_requires_seed(tmp_path, capsys):
    spec = tmp_path / "b.json"
    spec.write_text(json.dumps({"kind": "brownian", "t": 1.0, "atoms": 256}))
    assert run(["construct", "--spec", spec, "--out", tmp_path / "x.txt"]) == 2
    assert "--seed" in capsys.readouterr().err
    assert run(["construct", "--spec", spec, "--out", tmp_path / "x.txt",
                "--seed", 5]) == 0


def test_estimate_scale_violation_exits_3(tmp_path, capsys):
    spec = tmp_path / "ifs.json"
    small = dict(IFS_SPEC, levels=8)
    spec.write_text(json.dumps(small))
    out = tmp_path / "c8.txt"
    run(["construct", "--spec", spec, "--out", out])
    code = run(["estimate", "--measure", out, "--r0", "4", "--annuli", "9"])
    assert code == 3
    assert "annul" in capsys.readouterr().err


def test_construct_outputs_byte_identical(tmp_path):
    spec = tmp_path / "b.json"
    spec.write_text(json.dumps({"kind": "brownian", "t": 0.5, "atoms": 256}))
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(["construct", "--spec", spec, "--out", a, "--seed", 42])
    run(["construct", "--spec", spec, "--out", b, "--seed", 42])
    assert a.read_bytes() == b.read_bytes()


def test_bounds_single_point(capsys):
    assert run(["bounds", "--regime", "kakeya", "--s", 1, "--t", 1]) == 0
    out = capsys.readouterr().out
    assert "lower 0.666666666667" in out


def test_bounds_grid_csv(tmp_path):
    csv = tmp_path / "table.csv"
    assert run(["bounds", "--regime", "ff", "--s-grid", "0.2:1:5",
                "--t-grid", "0.2:2:7", "--csv", csv]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "s,t,lower,upper"
    assert len(lines) == 1 + 5 * 7


def test_bounds_out_of_domain_exits_2(capsys):
    assert run(["bounds", "--regime", "kakeya", "--s", 1.5, "--t", 1]) == 2


def test_plot_svg_and_csv_match_bound_table(tmp_path):
    svg = tmp_path / "fig.svg"
    csv = tmp_path / "fig.csv"
    assert run(["plot", "--regime", "kakeya", "--fixed-s", 0.4,
                "--samples", 128, "--out", svg, "--csv", csv]) == 0
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text
    rows = [line.split(",") for line in csv.read_text().splitlines()[1:]]
    expected = bound_table("kakeya", [0.4], [(k + 1) / 128 for k in range(128)])
    for row, exp in zip(rows, expected):
        assert abs(float(row[2]) - exp[2]) <= 1e-12
        assert abs(float(row[3]) - exp[3]) <= 1e-12


def test_plot_fh_shows_jump(tmp_path):
    csv = tmp_path / "fh.csv"
    assert run(["plot", "--regime", "fh", "--fixed-s", 0.4, "--samples", 64,
                "--out", tmp_path / "fh.svg", "--csv", csv]) == 0
    rows = [line.split(",") for line in csv.read_text().splitlines()[1:]]
    uppers = {float(t): float(u) for _, t, _, u in rows}
    below = max(v for t, v in uppers.items() if t <= 1.0)
    above = min(v for t, v in uppers.items() if t > 1.0)
    assert below == 0.0 and above == pytest.approx(0.4, abs=1e-12)


def test_plot_requires_exactly_one_fixed_param(tmp_path):
    assert run(["plot", "--regime", "ff", "--out", tmp_path / "x.svg"]) == 2
    assert run(["plot", "--regime", "ff", "--fixed-s", 0.4, "--fixed-t", 0.4,
                "--out", tmp_path / "x.svg"]) == 2


def test_verify_exit_codes(tmp_path):
    passing = [{
        "experiment_id": "mini", "construction": "uniform-interval",
        "params": {"atoms": 2000},
        "plan": {"dim": 1, "r0": 4.0, "annuli": 7, "samples": 64, "seed": 0},
        "checks": [{"estimator": "fourier", "type": "within", "target": 1.0,
                    "tol": 0.1}]}]
    man = tmp_path / "man.json"
    man.write_text(json.dumps(passing))
    out = tmp_path / "report.json"
    assert run(["verify", "--manifest", man, "--out", out, "--threads", 1]) == 0
    report = json.loads(out.read_text())
    assert report["all_ok"] is True

    failing = [dict(passing[0],
                    checks=[{"estimator": "fourier", "type": "within",
                             "target": 0.2, "tol": 0.05}])]
    man.write_text(json.dumps(failing))
    assert run(["verify", "--manifest", man, "--out", out, "--threads", 1]) == 4


def test_export_manifest_roundtrip(tmp_path):
    out = tmp_path / "default.json"
    assert run(["export-manifest", "--out", out]) == 0
    data = json.loads(out.read_text())
    assert isinstance(data, list) and len(data) >= 10
