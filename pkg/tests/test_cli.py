import csv
import json

import numpy as np
import pytest

from fidmin import cli
from fidmin.cli import dump_state, fmt, load_state, main, sweep_grid
from fidmin.states import BipartiteState, InvalidStateError, bell_state, random_state


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.json"
    dump_state(bell_state(), path)
    return path


def _value(out: str) -> float:
    line = next(l for l in out.splitlines() if l.startswith("value:"))
    return float(line.split(":", 1)[1])


class TestStateFile:
    def test_round_trip(self, tmp_path):
        rho = random_state(2, 3, seed=1)
        dump_state(rho, tmp_path / "s.json")
        back = load_state(tmp_path / "s.json")
        assert back.dims == (2, 3)
        assert np.array_equal(back.matrix, rho.matrix)

    def test_flat_layout_accepted(self, tmp_path):
        doc = {"dims": [2, 1], "matrix": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}
        (tmp_path / "f.json").write_text(json.dumps(doc))
        assert np.allclose(load_state(tmp_path / "f.json").matrix, np.eye(2) / 2)

    @pytest.mark.parametrize("doc, message", [
        ({"dims": [2, 2]}, "keys"),
        ({"dims": [2], "matrix": []}, "dims"),
        ({"dims": [2, 1], "matrix": [[[1, 0]]]}, "pairs"),
        ({"dims": [2, 1], "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, "trace"),
        ({"dims": [2, 1], "matrix": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}, "positive"),
    ])
    def test_invalid(self, tmp_path, doc, message):
        (tmp_path / "bad.json").write_text(json.dumps(doc))
        with pytest.raises(InvalidStateError, match=message):
            load_state(tmp_path / "bad.json")


class TestFormat:
    @pytest.mark.parametrize("v, s", [
        (0.0, "0"), (0.5, "0.5"), (1 / 3, "0.333333333333"), (-1.0, "-1"),
        (0.0012345, "0.0012345"), (9 / 22, "0.409090909091"), (123.456, "123.456"),
        (1.5e-5, "1.5e-5"),
    ])
    def test_fmt(self, v, s):
        assert fmt(v) == s


class TestCompute:
    def test_bell(self, bell_file, capsys):
        assert main(["compute", str(bell_file)]) == 0
        assert _value(capsys.readouterr().out) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("method", ["direct", "closed-2xn", "pure", "bound"])
    def test_bell_methods(self, bell_file, capsys, method):
        assert main(["compute", str(bell_file), "--method", method]) == 0
        assert _value(capsys.readouterr().out) == pytest.approx(0.5, abs=1e-9)

    @pytest.mark.parametrize("method", ["direct", "closed-2xn", "pure"])
    def test_bell_hs(self, bell_file, capsys, method):
        assert main(["compute", str(bell_file), "--measure", "hs", "--method", method]) == 0
        assert _value(capsys.readouterr().out) == pytest.approx(0.5, abs=1e-9)

    def test_maximally_mixed(self, tmp_path, capsys):
        dump_state(BipartiteState((3, 2), np.eye(6) / 6), tmp_path / "mm.json")
        assert main(["compute", str(tmp_path / "mm.json"), "--show-measurement"]) == 0
        out = capsys.readouterr().out
        assert abs(_value(out)) <= 1e-12
        assert "bound: 0" in out
        assert "measurement basis" in out

    def test_inapplicable(self, tmp_path):
        dump_state(random_state(3, 3, seed=0), tmp_path / "s.json")
        assert main(["compute", str(tmp_path / "s.json"), "--method", "closed-2xn"]) == 3
        assert main(["compute", str(tmp_path / "s.json"), "--method", "pure"]) == 3
        assert main(["compute", str(tmp_path / "s.json"), "--measure", "hs", "--method", "bound"]) == 3

    def test_invalid_file(self, tmp_path):
        (tmp_path / "x.json").write_text("{not json")
        assert main(["compute", str(tmp_path / "x.json")]) == 1
        assert main(["compute", str(tmp_path / "missing.json")]) == 1

    def test_invalid_flags(self, bell_file):
        with pytest.raises(SystemExit) as exc:
            main(["compute", str(bell_file), "--method", "nope"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["compute", str(bell_file), "--restarts", "0"])
        assert exc.value.code == 2


class TestSweep:
    def test_grid_includes_vanishing_point(self):
        g = sweep_grid("isotropic", 3, 11)
        assert 1 / 9 in g and len(g) == 12
        g = sweep_grid("werner", 2, 5)
        assert list(g) == [-1, -0.5, 0, 0.5, 1]

    def test_csv_and_stability(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--family", "werner", "--m", "2", "--points", "11"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        raw = a.read_bytes()
        assert raw == b.read_bytes()
        assert raw.startswith(b"family,m,x,N_F,N_HS,bound\n")
        assert b"\r" not in raw
        rows = list(csv.DictReader(raw.decode().splitlines()))
        first = rows[0]
        assert first["x"] == "-1" and float(first["N_F"]) == pytest.approx(0.5, abs=1e-5)
        zero = next(r for r in rows if r["x"] == "0.5")
        assert float(zero["N_F"]) <= 1e-12

    def test_measures_flag(self, tmp_path):
        out = tmp_path / "f.csv"
        assert main(["sweep", "--family", "isotropic", "--m", "2", "--points", "3",
                     "--measures", "fidelity", "--out", str(out)]) == 0
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert all(r["N_HS"] == "" for r in rows)

    def test_mismatch_exit_and_no_partial_file(self, tmp_path, monkeypatch):
        formulas = dict(cli.FAMILY_FORMULAS)
        nf, hs, dom = formulas["werner"]
        formulas["werner"] = (lambda m, x: nf(m, x) + 1e-3, hs, dom)
        monkeypatch.setattr(cli, "FAMILY_FORMULAS", formulas)
        out = tmp_path / "w.csv"
        assert main(["sweep", "--family", "werner", "--m", "2", "--points", "5", "--out", str(out)]) == 4
        assert not out.exists()

    def test_unwritable(self, tmp_path):
        out = tmp_path / "missing-dir" / "w.csv"
        assert main(["sweep", "--family", "werner", "--m", "2", "--points", "3", "--out", str(out)]) == 1
        assert list(tmp_path.iterdir()) == []

    def test_bad_args(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--family", "werner", "--m", "1", "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--family", "ghz", "--m", "2", "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == 2


class TestVerify:
    @pytest.mark.parametrize("suite", sorted(cli.SUITES))
    def test_suites_pass(self, suite, capsys):
        assert main(["verify", "--suite", suite, "--trials", "4", "--restarts", "4"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 5
        assert out[-1].startswith(f"{suite}: 4/4 passed")

    def test_failure_exit(self, monkeypatch, capsys):
        monkeypatch.setitem(cli.SUITES, "pure", (lambda t, rng, s: (1.0, "forced"), 1e-6))
        assert main(["verify", "--suite", "pure", "--trials", "2", "--quiet"]) == 1
        assert "0/2 passed" in capsys.readouterr().out


def test_state_subcommand(tmp_path):
    out = tmp_path / "w.json"
    assert main(["state", "--family", "werner", "--m", "3", "--x", "-0.5", "--out", str(out)]) == 0
    assert load_state(out).dims == (3, 3)
    with pytest.raises(SystemExit):
        main(["state", "--family", "werner", "--m", "2", "--x", "3", "--out", str(out)])


def test_pure_method_reports_attaining_measurement():
    from fidmin.measure import fidelity_objective
    from fidmin.optimizer import OptimizerSettings
    from fidmin.states import random_pure_state

    for dims, seed in [((3, 2), 1), ((2, 4), 2), ((4, 3), 3)]:
        rho = random_pure_state(*dims, seed=seed)
        report = cli.compute(rho, "fidelity", "pure", OptimizerSettings())
        assert report["measurement"].vectors.shape == (dims[0], dims[0])
        assert abs(fidelity_objective(rho, report["measurement"]) - report["value"]) < 1e-10
