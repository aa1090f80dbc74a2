import json
from fractions import Fraction as F

import numpy as np
import pytest

from arnold_cat import cli
from arnold_cat.config import ConfigError, parse_config, parse_range
from arnold_cat.emit import allowed_segments, csv_text, emit_csv, svg_text, OutputError
from arnold_cat.spectral import GridSpec, solve


def cfg(**kw):
    d = {"schema": 1}
    d.update(kw)
    return json.dumps(d)


def test_minimal_config():
    c = parse_config(cfg(potential={"N": 2, "params": [1, 2]}))
    assert c.potential.couplings == (5, 9) and c.shift is not None


def test_conflicting_forms_listed():
    with pytest.raises(ConfigError) as err:
        parse_config(cfg(potential={"params": [1, 2], "couplings": [5, 9]}))
    assert any("conflict" in e for e in err.value.errors)


def test_fig1_config_normalized():
    c = parse_config(cfg(potential={"raw_coefficients": ["-61/25", 0, "36/25", 0],
                                    "lambda_sq": "1/36"}))
    assert c.potential.couplings == (F(61, 75), F(12, 25))
    assert c.potential.lambda_sq == F(1, 36)
    assert c.potential.coefficients() == [0, 0, F(36, 25), 0, F(-61, 25), 0, 1]


def test_all_errors_collected(tmp_path):
    text = json.dumps({"schema": 2, "potentail": {}, "grid": {"half_width": 1, "points": 10},
                       "outputs": {"csv": str(tmp_path / "nodir" / "x.csv")}, "states": -1})
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    msgs = err.value.errors
    assert len(msgs) >= 5
    assert any("potentail" in m for m in msgs)
    assert any("schema" in m for m in msgs)
    assert any("not writable" in m for m in msgs)


def test_misspelled_nested_key():
    with pytest.raises(ConfigError, match="lamda_sq"):
        parse_config(cfg(potential={"params": [1], "lamda_sq": 1}))


def test_not_json():
    with pytest.raises(ConfigError, match="JSON"):
        parse_config("{schema: 1")


def test_parse_range():
    r = parse_range("0.3:3:0.05")
    assert len(r.values()) == 55 and r.values()[-1] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        parse_range("1:0:0.1")


def test_csv_bit_stable_and_empty(tmp_path, fig1_potential):
    assert csv_text(["n", "E"], []) == "n,E\n"
    r = solve(fig1_potential, GridSpec(2.2, 2001), 3)
    from arnold_cat.emit import spectrum_rows
    a = csv_text(*spectrum_rows(r))
    b = csv_text(*spectrum_rows(solve(fig1_potential, GridSpec(2.2, 2001), 3)))
    assert a == b
    assert a.splitlines()[0] == ("n,E,parity,splitting_partner,weight_region_0,"
                                 "weight_region_1,weight_region_2")
    assert a.splitlines()[1].split(",")[1] == "%.12g" % r.energies[0]


def test_output_error_has_path(tmp_path):
    bad = str(tmp_path / "missing" / "x.csv")
    with pytest.raises(OutputError, match="missing"):
        emit_csv(bad, ["a"], [])


def test_allowed_segments():
    x = np.linspace(-2, 2, 401)
    v = (x * x - 1) ** 2
    segs = allowed_segments(x, v, 0.25)
    assert len(segs) == 2
    assert segs[0][0] == pytest.approx(-np.sqrt(1.5), abs=1e-3)
    assert segs[1][1] == pytest.approx(np.sqrt(1.5), abs=1e-3)


def test_svg_structure():
    x = np.linspace(-1, 1, 11)
    text = svg_text([(x, x * x)], [(0.5, [(-0.7, 0.7)])], title="a < b")
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text.count("<polyline") == 1 and text.count("<line") == 1
    assert "a &lt; b" in text


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_weights(capsys):
    code, out, _ = run(["weights", "--n", "6"], capsys)
    assert code == 0 and out.strip() == "(6,15,20,30,60)"
    code, out, _ = run(["weights", "--n", "3", "--emit-formulas"], capsys)
    assert "c1^2 = alpha^2 + 2*beta^2 + gamma^2" in out


def test_cli_exit_codes(tmp_path, capsys):
    leak = tmp_path / "leak.json"
    leak.write_text(cfg(potential={"params": [1, 2]}, grid={"half_width": 3.5, "points": 1001},
                        states=2))
    code, _, err = run(["solve", "--config", str(leak)], capsys)
    assert code == 3 and "leak" in err
    bad = tmp_path / "bad.json"
    bad.write_text(cfg(potential={"params": [1, 2], "couplings": [5, 9]}))
    code, _, err = run(["solve", "--config", str(bad)], capsys)
    assert code == 2 and "conflict" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1
    assert run([], capsys)[0] == 1


def test_cli_solve_outputs(tmp_path, capsys):
    conf = tmp_path / "run.json"
    conf.write_text(cfg(potential={"params": [1, 1]}, states=4,
                        outputs={"csv": str(tmp_path / "s.csv")}))
    code, _, _ = run(["--seed", "7", "solve", "--config", str(conf),
                      "--dump-psi", str(tmp_path / "psi.csv"), "--svg", str(tmp_path / "s.svg")],
                     capsys)
    assert code == 0
    first = (tmp_path / "s.csv").read_bytes()
    run(["solve", "--config", str(conf)], capsys)
    assert (tmp_path / "s.csv").read_bytes() == first
    assert (tmp_path / "psi.csv").read_text().splitlines()[0] == "x,psi_0,psi_1,psi_2,psi_3"
    assert "<line" in (tmp_path / "s.svg").read_text()


def test_cli_estimate_build(tmp_path, capsys):
    conf = tmp_path / "run.json"
    conf.write_text(cfg(potential={"params": [1, 2]}, states=4, n_max=1))
    code, out, _ = run(["estimate", "--config", str(conf), "--with-numeric"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split("\t")[-2:] == ["E0", "E1"]
    assert lines[2].split("\t")[3] == "-243"
    code, out, _ = run(["build", "--params", "1,1,1"], capsys)
    data = json.loads(out)
    assert data["couplings"] == [4.0, 13.0, 28.0]
    assert [e["V"] for e in data["extrema"]] == [-49, 32, -49, 0, -49, 32, -49]


def test_cli_locus_scan(tmp_path, capsys):
    out = tmp_path / "locus.csv"
    code, _, _ = run(["locus", "--path", "k5_alpha_beta", "--alpha-range", "1:1.2:0.1",
                      "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "fixed_value,branch,critical_value,delta_residual"
    assert lines[1].startswith("1,lower,0.19088938")
    out = tmp_path / "scan.csv"
    code, _, err = run(["scan", "--path", "k7_eta", "--alpha", "2", "--eta-range",
                        "0:0.004:0.001", "--out", str(out)], capsys)
    assert code == 0 and "flip" in err
    assert len(out.read_text().splitlines()) == 6


@pytest.mark.parametrize("fig", ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"])
def test_reproduce(fig, tmp_path, capsys):
    code, out, _ = run(["reproduce", fig, "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    csv_file, svg_file = tmp_path / f"{fig}.csv", tmp_path / f"{fig}.svg"
    assert csv_file.exists() and svg_file.read_text().startswith("<svg")
    if fig == "fig1":
        assert len(csv_file.read_text().splitlines()) == 8
        assert svg_file.read_text().count("<line") >= 7


def test_reproduce_fig2_values(tmp_path):
    from arnold_cat.config import parse_config as pc
    from arnold_cat.figures import figure_config
    c = pc(figure_config("fig2"))
    assert c.potential.couplings == (4, 13, 28)
    c = pc(figure_config("fig6"))
    assert c.potential.N == 5
