import csv
import io
import json

import pytest

from ordsearch.cli import EXIT_CONFIG, EXIT_OK, EXIT_REGIME, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_params_accepts_default_triple(capsys):
    code, out, _ = run(capsys, "params", "--q", "18.3", "--t", "8", "--u", "4")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["accepted"] and doc["coefficient"] == "1/12" and doc["v"] == 6
    assert doc["q_qprime_u"] < 1


def test_params_rejects_small_q(capsys):
    code, out, _ = run(capsys, "params", "--q", "3", "--t", "4", "--u", "1")
    doc = json.loads(out)
    assert code == EXIT_CONFIG
    assert not doc["accepted"] and "q*q'^u < 1" in doc["reason"]
    assert doc["q_prime"] == pytest.approx(1.5)


def test_sweep_sorted_and_flags_rejections(capsys):
    code, out, _ = run(capsys, "sweep", "--q", "3,18.3", "--t", "8", "--u", "4,5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 4
    values = [float(r["coefficient_value"]) for r in rows]
    assert values == sorted(values, reverse=True)
    triple = [r for r in rows if r["q"] == "18.3" and r["u"] == "4"][0]
    assert triple["coefficient"] == "1/12" and triple["accepted"] == "True"
    assert any(r["accepted"] == "False" and r["reason"] for r in rows)


def test_sweep_rejects_empty_grid(capsys):
    code, _, err = run(capsys, "sweep", "--q", ",", "--t", "8", "--u", "4")
    assert code == EXIT_CONFIG and "empty" in err


def test_csv_uses_fifteen_digits(capsys):
    _, out, _ = run(capsys, "params", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["q_prime"] == format(0.4691603270094587, ".15g")


def test_attack_zero_query_small_v(capsys):
    code, out, _ = run(capsys, "attack", "--n", "512", "--algorithm", "zero-query", "--v-override", "3")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["hybrid"]["verdict"]["distinguishable"] is False
    assert doc["invariant"]["violations"] == []


def test_attack_direct_lifted_pair(capsys):
    code, out, _ = run(capsys, "attack", "--n", "8", "--algorithm", "lifted-bs", "--pair", "5")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["verdict"]["distinguishable"] is True


def test_attack_regime_error(capsys):
    code, _, err = run(capsys, "attack", "--n", "4096", "--algorithm", "truncated-bs:2", "--v-override", "4")
    assert code == EXIT_REGIME and "regime" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["attack", "--n", "100"],
        ["attack", "--algorithm", "grover"],
        ["attack", "--v-override", "0"],
        ["params", "--q", "1,2"],
        ["attack", "--n", "8", "--algorithm", "lifted-bs", "--pair", "8"],
    ],
)
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_CONFIG


def test_verify_degenerate_suite(capsys):
    code, out, _ = run(capsys, "verify", "--n", "8", "--count", "3", "--algorithm", "random:T=2,w=0")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["ok"]
    assert doc["bv_max_ratio"] <= 4 and doc["traces_checked"] == 3


def test_attack_output_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["attack", "--n", "512", "--algorithm", "random:T=1,w=0,seed=4", "--v-override", "2",
                     "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert all(set(r) >= {"s", "parent", "child", "S_values", "chosen_r", "S_before", "S_after"} for r in doc["records"])
