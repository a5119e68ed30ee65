"""End-to-end runs of every CLI subcommand through main(argv)."""

import csv
import json

import numpy as np
import pytest

from qmoney.cli import main
from qmoney.harness import load_scheme


def test_gen_scheme_and_verify(tmp_path, capsys):
    scheme_path = str(tmp_path / "s.scheme")
    rc = main(
        [
            "gen-scheme", "--n", "8", "--m", "32", "--l", "16",
            "--epsilon", "0.5", "--seed", "3", "--include-secret",
            "--out", scheme_path,
        ]
    )
    assert rc == 0
    scheme, secret = load_scheme(scheme_path)
    assert scheme.params.m == 32
    assert secret is not None

    rc = main(["verify", "--scheme", scheme_path, "--money", "honest", "--trials", "10", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "pass_fraction" in out

    csv_path = str(tmp_path / "v.csv")
    rc = main(
        ["verify", "--scheme", scheme_path, "--money", "mixed",
         "--trials", "5", "--seed", "1", "--out", csv_path]
    )
    assert rc == 0
    rows = list(csv.reader(open(csv_path)))
    assert rows[0][0] == "experiment"
    assert len(rows) == 6


def test_verify_honest_needs_secret(tmp_path):
    scheme_path = str(tmp_path / "nosecret.scheme")
    assert main(["gen-scheme", "--n", "6", "--m", "16", "--l", "8",
                 "--epsilon", "0.5", "--out", scheme_path]) == 0
    assert main(["verify", "--scheme", scheme_path, "--money", "honest"]) == 2


def test_gen_scheme_requires_out():
    assert main(["gen-scheme", "--n", "4", "--m", "8", "--l", "4", "--epsilon", "0.5"]) == 2


def test_attack_clique_cli(tmp_path, capsys):
    scheme_path = str(tmp_path / "s.scheme")
    main(["gen-scheme", "--n", "10", "--m", "128", "--l", "8", "--epsilon", "0.6",
          "--seed", "5", "--include-secret", "--out", scheme_path])
    rc = main(["attack-clique", "--scheme", scheme_path, "--trials", "5", "--seed", "2"])
    assert rc == 0
    assert "q_value" in capsys.readouterr().out


def test_attack_low_eps_cli(tmp_path, capsys):
    scheme_path = str(tmp_path / "low.scheme")
    main(["gen-scheme", "--n", "5", "--m", "16", "--l", "64", "--epsilon", "0.015625",
          "--seed", "6", "--out", scheme_path])
    jsonl_path = str(tmp_path / "r.jsonl")
    rc = main(["attack-low-eps", "--scheme", scheme_path, "--trials", "2",
               "--seed", "3", "--out", jsonl_path, "--format", "jsonl"])
    assert rc == 0
    lines = open(jsonl_path).read().splitlines()
    assert len(lines) == 2
    rec = json.loads(lines[0])
    assert "q_value" in rec["metrics"]


def test_eig_check_cli(capsys):
    rc = main(["eig-check", "--n", "12", "--m", "64", "--trials", "2", "--seed", "0"])
    assert rc == 0
    assert "lambda_max" in capsys.readouterr().out


def test_mint_and_verify_note_cli(tmp_path, capsys):
    note_path = str(tmp_path / "n.note")
    rc = main(["mint", "--n", "10", "--s", "4", "--d", "2",
               "--label-seed", "1", "--seed", "4", "--out", note_path])
    assert rc == 0
    text = open(note_path).read()
    assert text.startswith("qmoney-note v1")
    rc = main(["verify-note", "--note", note_path, "--trials", "3", "--seed", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "accept_prob" in out


def test_beta_mix_cli(capsys):
    rc = main(["beta-mix", "--n", "8", "--s", "4", "--d", "2", "--beta", "0",
               "--trials", "2", "--seed", "0"])
    assert rc == 0
    assert "tv_distance" in capsys.readouterr().out


def test_bench_cli_runs(capsys):
    rc = main(["bench", "--seed", "0"])
    assert rc == 0
    assert "ms" in capsys.readouterr().out


def test_unknown_command_exits_nonzero():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_seed_determinism_across_invocations(tmp_path):
    scheme_path = str(tmp_path / "s.scheme")
    main(["gen-scheme", "--n", "6", "--m", "16", "--l", "8", "--epsilon", "0.5",
          "--seed", "9", "--include-secret", "--out", scheme_path])
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    main(["verify", "--scheme", scheme_path, "--trials", "6", "--seed", "11", "--out", a])
    main(["verify", "--scheme", scheme_path, "--trials", "6", "--seed", "11", "--out", b])
    assert open(a).read() == open(b).read()
