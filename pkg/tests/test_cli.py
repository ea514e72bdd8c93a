import csv
import io
import json

import numpy as np
import pytest

from discordlab import channels, measure, states
from discordlab.cli import main, sweep_grid, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def table(text):
    out = {}
    for line in text.strip().splitlines():
        key, _, value = line.rpartition("  ")
        out[key.strip()] = value.strip()
    return out


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.json"
    states.save_state(states.bell_state(0).density(), path)
    return str(path)


@pytest.fixture
def product_file(tmp_path):
    rho = states.product(states.random_density((2,), seed=1), states.random_density((2,), seed=2))
    path = tmp_path / "product.json"
    states.save_state(rho, path)
    return str(path)


class TestCorrelations:
    def test_bell(self, capsys, bell_file):
        code, out, _ = run(capsys, "correlations", "--state", bell_file)
        assert code == 0
        t = table(out)
        assert t["D(A:B)"] == "1.000000"
        assert t["D(B:A)"] == "1.000000"
        assert t["I(A:B)"] == "2.000000"
        assert t["S(A|B)"] == "-1.000000"
        assert t["C"] == "1.000000"

    def test_product(self, capsys, product_file):
        code, out, _ = run(capsys, "correlations", "--state", product_file)
        assert code == 0
        t = table(out)
        for key in ("I(A:B)", "J(A:B)", "D(A:B)", "J(B:A)", "D(B:A)", "C"):
            assert t[key] == "0.000000", key

    def test_builtin_state(self, capsys):
        code, out, _ = run(capsys, "correlations", "--state", "werner:1")
        assert code == 0 and table(out)["D(A:B)"] == "1.000000"

    def test_json_round_trip(self, capsys, tmp_path, bell_file):
        out_path = tmp_path / "out.json"
        code, _, _ = run(capsys, "correlations", "--state", bell_file, "--json", "--out", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["quantities"]["D(A:B)"] == pytest.approx(1, abs=1e-6)
        povm = measure.povm_from_json(doc["optimal_measurement_B"])
        assert povm.dim == 2 and povm.is_rank1()
        # feed the optimal measurement back in as a POVM file
        povm_path = tmp_path / "opt.json"
        povm_path.write_text(json.dumps(doc["optimal_measurement_B"]))
        code, out, _ = run(capsys, "correlations", "--state", bell_file, "--povm", str(povm_path))
        assert code == 0 and table(out)["Zurek D(A:B)"] == "1.000000"

    def test_state_file_round_trip(self, tmp_path):
        rho = states.random_density((2, 3), seed=4)
        path = tmp_path / "s.json"
        states.save_state(rho, path)
        assert np.array_equal(states.load_state(path).mat, rho.mat)

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dims": [2, 2], "matrix": [[1, 0]')
        code, _, err = run(capsys, "correlations", "--state", str(path))
        assert code != 0
        assert "line 1" in err and "column" in err

    def test_bad_field_named(self, capsys, tmp_path):
        doc = states.state_to_json(states.bell_state(0).density())
        doc["matrix"][1][2] = [0.5]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(capsys, "correlations", "--state", str(path))
        assert code != 0
        assert "matrix[1][2]" in err

    def test_missing_dims_field(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"matrix": [[[1, 0]]]}))
        code, _, err = run(capsys, "correlations", "--state", str(path))
        assert code != 0 and "dims" in err

    def test_invariant_violation_named(self, capsys, tmp_path):
        doc = states.state_to_json(states.bell_state(0).density())
        doc["matrix"][0][0] = [2.0, 0.0]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(capsys, "correlations", "--state", str(path))
        assert code == 1
        assert "invariant violated" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "correlations", "--state", "/nonexistent/x.json")
        assert code == 2 and "error" in err


class TestProtocol:
    def test_teleport_z(self, capsys, bell_file):
        code, out, _ = run(capsys, "protocol", "teleport", "--state", bell_file, "--channel", "measure:Z")
        assert code == 0 and table(out)["loss"] == "1.000000"

    def test_fqsw_identity(self, capsys, bell_file):
        code, out, _ = run(capsys, "protocol", "fqsw", "--state", bell_file, "--channel", "identity")
        t = table(out)
        assert code == 0
        assert t["net gain"] == "1.000000" and t["loss"] == "0.000000"

    def test_povm_option(self, capsys, bell_file):
        code, out, _ = run(capsys, "protocol", "fqsw", "--state", bell_file, "--povm", "X")
        assert code == 0 and table(out)["loss"] == "1.000000"

    def test_channel_file(self, capsys, tmp_path, bell_file):
        path = tmp_path / "ch.json"
        channels.save_channel(channels.depolarizing(2, 0.5), path)
        code, out, _ = run(capsys, "protocol", "densecode", "--state", bell_file, "--channel", str(path), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["loss"] == pytest.approx(1.5487949406953985, abs=1e-9)

    def test_merge_markup_matches_discord(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        states.save_state(states.werner(0.5), path)
        code, out, _ = run(
            capsys, "protocol", "merge", "--state", str(path), "--channel", "dephasing:1.0", "--verify-discord", "--json"
        )
        assert code == 0
        doc = json.loads(out)
        check = doc["verify_discord"]
        assert check["gap"] <= 1e-5
        assert doc["loss"] == pytest.approx(check["discord"], abs=1e-5)
        assert doc["loss"] == pytest.approx(check["min_loss"], abs=1e-5)

    def test_unknown_protocol(self, capsys, bell_file):
        code, _, err = run(capsys, "protocol", "swap", "--state", bell_file, "--channel", "identity")
        assert code == 2
        assert "fqsw" in err and "merge" in err

    def test_dimension_mismatch(self, capsys, bell_file, tmp_path):
        path = tmp_path / "ch.json"
        channels.save_channel(channels.identity_channel(3), path)
        code, _, err = run(capsys, "protocol", "fqsw", "--state", bell_file, "--channel", str(path))
        assert code == 2 and "dim" in err

    def test_needs_channel(self, capsys, bell_file):
        code, _, _ = run(capsys, "protocol", "fqsw", "--state", bell_file)
        assert code == 2


class TestSweep:
    def test_werner(self, capsys):
        code, out, _ = run(capsys, "sweep", "--family", "werner", "--start", "0", "--stop", "1", "--step", "0.25")
        assert code == 0
        r = rows(out)
        assert r[0] == ["p", "discord", "concurrence"]
        assert len(r) == 6
        assert [float(x) for x in r[1]] == pytest.approx([0, 0, 0], abs=1e-6)
        assert [float(x) for x in r[-1]] == pytest.approx([1, 1, 1], abs=1e-6)
        assert "\r" not in out

    def test_empty_grid(self, capsys):
        code, _, err = run(capsys, "sweep", "--start", "0", "--stop", "0.1", "--step", "0.5")
        assert code == 2 and "empty grid" in err

    def test_deterministic(self, capsys):
        argv = ("sweep", "--family", "depolarizing", "--values", "0,0.3,0.9", "--quantities", "discord,loss")
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_depolarizing_loss_column(self, capsys):
        code, out, _ = run(capsys, "sweep", "--family", "depolarizing", "--values", "0.5", "--quantities", "loss")
        assert code == 0
        assert float(rows(out)[1][1]) == pytest.approx(1.5487949406953985, abs=1e-9)

    def test_unknown_quantity(self, capsys):
        code, _, _ = run(capsys, "sweep", "--quantities", "discord,entanglement")
        assert code == 2

    def test_grid_helper(self):
        assert sweep_grid(0, 1, 0.25) == [0, 0.25, 0.5, 0.75, 1.0]
        assert sweep_grid(0, 1, 0.1)[-1] == 1.0
        with pytest.raises(UsageError):
            sweep_grid(0, 1, 0)


class TestRandomScan:
    def test_pure_state(self, capsys):
        code, out, err = run(capsys, "random-scan", "--n", "1", "--rank", "1", "--seed", "3")
        assert code == 0
        row = dict(zip(*rows(out)))
        assert float(row["discord_b"]) == pytest.approx(float(row["entropy_a"]), abs=2e-5)
        assert float(row["gap"]) <= 1e-5
        assert err.startswith("summary: n=1 max_gap=")

    def test_zero_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "random-scan", "--n", "0")
        assert code == 2

    def test_invalid_dims(self, capsys):
        assert run(capsys, "random-scan", "--n", "1", "--dims", "2,x")[0] == 2
        assert run(capsys, "random-scan", "--n", "1", "--dims", "2,2,2")[0] == 2

    def test_deterministic_and_small_gap(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "random-scan", "--n", "3", "--restarts", "8", "--out", str(a))
        _, _, err = run(capsys, "random-scan", "--n", "3", "--restarts", "8", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert float(err.split("max_gap=")[1]) <= 1e-5
        r = rows(a.read_text())
        assert r[0] == ["index", "seed", "discord_b", "discord_a", "concurrence", "entropy_a", "min_loss", "gap"]
        assert [x[1] for x in r[1:]] == ["42", "43", "44"]
