"""CLI surface: outputs, exit codes, determinism, error paths."""

from __future__ import annotations

import json

import pytest

from rankpoly.cli import main
from rankpoly.graphio import (
    format_fraction,
    load_graph,
    parse_edge_list,
    parse_fraction,
)


@pytest.fixture
def k2(tmp_path):
    p = tmp_path / "k2.txt"
    p.write_text("0 1\n")
    return str(p)


@pytest.fixture
def c4(tmp_path):
    p = tmp_path / "c4.txt"
    p.write_text("0 1\n1 2\n2 3\n3 0\n")
    return str(p)


@pytest.fixture
def path8(tmp_path):
    p = tmp_path / "path8.txt"
    p.write_text("".join(f"{i} {i+1}\n" for i in range(7)))
    return str(p)


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_r2p_k2(self, capsys, k2):
        code, out, _ = run_cli(capsys, "eval", "r2p", "--graph", k2, "--lambda", "1/2", "--mu", "1")
        assert code == 0
        assert out.splitlines()[0] == "3/2"

    def test_fraction_round_trips(self, capsys, c4):
        # negative fractions need the --flag=value spelling under argparse
        code, out, _ = run_cli(capsys, "eval", "r2p", "--graph", c4, "--lambda", "2/3", "--mu=-1/7")
        assert code == 0
        text = out.splitlines()[0]
        from rankpoly.exact import r2_prime
        from rankpoly.graphs import bipartition_of, cycle_graph
        from fractions import Fraction

        assert parse_fraction(text) == r2_prime(
            bipartition_of(cycle_graph(4)), Fraction(2, 3), Fraction(-1, 7)
        ).value

    def test_tutte(self, capsys, k2):
        code, out, _ = run_cli(capsys, "eval", "tutte", "--graph", k2, "--x", "5", "--y", "9")
        assert code == 0 and out.splitlines()[0] == "5"

    def test_zrc(self, capsys, k2):
        code, out, _ = run_cli(capsys, "eval", "zrc", "--graph", k2, "--q", "2", "--mu", "3")
        assert code == 0 and out.splitlines()[0] == "10"

    def test_missing_params_is_domain_error(self, capsys, k2):
        code, _, err = run_cli(capsys, "eval", "r2p", "--graph", k2)
        assert code == 1 and "r2p needs" in err

    def test_threads_do_not_change_output(self, capsys, c4):
        base = ("eval", "r2p", "--graph", c4, "--lambda", "1/2", "--mu", "1")
        _, out1, _ = run_cli(capsys, *base)
        _, out2, _ = run_cli(capsys, *base, "--threads", "3")
        assert out1 == out2


class TestCount:
    def test_bis_c4(self, capsys, c4):
        code, out, _ = run_cli(capsys, "count", "bis", "--graph", c4)
        assert code == 0 and out.splitlines()[0] == "7"

    def test_matchings(self, capsys, c4):
        code, out, _ = run_cli(capsys, "count", "matchings", "--graph", c4)
        assert code == 0 and out.splitlines()[0] == "7"

    def test_pbis_requires_eta(self, capsys, c4):
        code, _, err = run_cli(capsys, "count", "pbis", "--graph", c4)
        assert code == 1 and "eta" in err


class TestLw:
    def test_path8_natural(self, capsys, path8):
        code, out, _ = run_cli(capsys, "lw", "--graph", path8, "--ordering", "natural")
        assert code == 0 and out.strip() == "1"

    def test_optimal_c4(self, capsys, c4):
        code, out, _ = run_cli(capsys, "lw", "--graph", c4, "--optimal")
        assert code == 0 and out.strip() == "2"

    def test_ordering_file(self, capsys, c4, tmp_path):
        f = tmp_path / "ord.txt"
        f.write_text("3 2 1 0\n")
        code, out, _ = run_cli(capsys, "lw", "--graph", c4, "--ordering", f"file:{f}")
        assert code == 0 and out.strip() == "2"

    def test_treedec(self, capsys, c4, tmp_path):
        f = tmp_path / "td.json"
        f.write_text(json.dumps({"tree_edges": [[0, 1]], "bags": [[0, 1, 2], [0, 2, 3]]}))
        code, out, _ = run_cli(capsys, "lw", "--graph", c4, "--treedec", str(f))
        assert code == 0 and out.strip().isdigit()


class TestSample:
    def test_deterministic_output(self, capsys, c4):
        args = ("sample", "rws", "--graph", c4, "--lambda", "1/2", "--mu", "1",
                "--steps", "300", "--seed", "11", "--thin", "50")
        code, out1, _ = run_cli(capsys, *args)
        assert code == 0
        code, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_summary_line_is_json(self, capsys, c4):
        code, out, _ = run_cli(
            capsys, "sample", "rc", "--graph", c4, "--q", "2", "--mu", "1",
            "--steps", "100", "--seed", "3",
        )
        assert code == 0
        summary = json.loads(out.splitlines()[-1])
        assert set(summary) >= {"acceptance_rate", "final_subset", "final_statistic"}

    def test_sample_lines_are_hex_subsets(self, capsys, c4):
        code, out, _ = run_cli(
            capsys, "sample", "rws", "--graph", c4, "--lambda", "1", "--mu", "1",
            "--steps", "120", "--seed", "5", "--thin", "40",
        )
        lines = out.splitlines()
        assert code == 0 and len(lines) == 4  # 3 samples + summary
        for line in lines[:-1]:
            assert 0 <= int(line, 16) < 16


class TestMix:
    def test_exact_summary(self, capsys, tmp_path, c4):
        csv = tmp_path / "tv.csv"
        code, out, _ = run_cli(
            capsys, "mix", "--graph", c4, "--family", "rc", "--q", "2",
            "--mu", "1", "--eps", "0.25", "--csv-out", str(csv),
        )
        assert code == 0
        summary = json.loads(out.splitlines()[-1])
        assert summary["bound_satisfied"] is True
        assert summary["tau"] >= 1
        header = csv.read_text().splitlines()[0]
        assert header.startswith("step,tv_from_")

    def test_empirical_mode(self, capsys, c4):
        code, out, _ = run_cli(
            capsys, "mix", "--graph", c4, "--family", "rws", "--lambda", "1/2",
            "--mu", "1", "--empirical", "20000", "--seed", "1",
        )
        assert code == 0
        summary = json.loads(out.splitlines()[-1])
        assert summary["empirical_tv"] < 0.1


class TestReduce:
    def test_tutte_cert(self, capsys, k2):
        code, out, _ = run_cli(
            capsys, "reduce", "tutte", "--graph", k2, "--x", "-3", "--y", "2"
        )
        assert code == 0
        cert = json.loads(out.strip())
        assert cert["value"] == "-3/1"
        assert len(cert["primes"]) == len(cert["residues"]) == len(cert["ks"])

    def test_bis_cert(self, capsys, k2):
        code, out, _ = run_cli(
            capsys, "reduce", "bis", "--graph", k2, "--eta", "7/9"
        )
        assert code == 0
        cert = json.loads(out.strip())
        assert cert["reconstructed"] == 3


class TestErrors:
    def test_unreadable_graph(self, capsys):
        code, _, err = run_cli(capsys, "count", "bis", "--graph", "/nonexistent/x.txt")
        assert code == 1 and "cannot read graph file" in err

    def test_malformed_fraction_usage_error(self, capsys, k2):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "r2p", "--graph", k2, "--lambda", "x/y", "--mu", "1"])
        assert exc.value.code == 2

    def test_limit_exceeded(self, capsys, tmp_path):
        big = tmp_path / "big.txt"
        big.write_text("".join(f"0 {i}\n" for i in range(1, 30)))
        code, _, err = run_cli(capsys, "count", "bis", "--graph", str(big))
        assert code == 1 and "limit" in err

    def test_unknown_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_nonbipartite_r2p(self, capsys, tmp_path):
        tri = tmp_path / "k3.txt"
        tri.write_text("0 1\n1 2\n2 0\n")
        code, _, err = run_cli(
            capsys, "eval", "r2p", "--graph", str(tri), "--lambda", "1/2", "--mu", "1"
        )
        assert code == 1 and "bipartite" in err


class TestGraphIo:
    def test_edge_list_with_names(self):
        g = parse_edge_list("a b\nb c # comment\n\n")
        assert g.n == 3 and g.m == 2
        assert g.labels == ("a", "b", "c")

    def test_edge_list_whitespace_tolerant(self):
        g = parse_edge_list("  0\t 1 \n\n   1    2\r\n# full comment\n 2 3\n")
        assert g.n == 4 and g.m == 3

    def test_edge_list_integer_ids_preserve_gaps(self):
        g = parse_edge_list("0 2\n")
        assert g.n == 3 and g.isolated_count() == 1

    def test_json_with_sides(self, tmp_path):
        f = tmp_path / "g.json"
        f.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2]], "U": [0, 2], "W": [1]}))
        g, bip = load_graph(f)
        assert bip is not None and bip.side_w == (1,)

    def test_json_isolated_vertices(self, tmp_path):
        f = tmp_path / "g.json"
        f.write_text(json.dumps({"n": 5, "edges": [[0, 1]]}))
        g, _ = load_graph(f)
        assert g.isolated_count() == 3

    def test_format_fraction(self):
        from fractions import Fraction

        assert format_fraction(Fraction(3, 2)) == "3/2"
        assert format_fraction(Fraction(-7)) == "-7"
        assert parse_fraction(format_fraction(Fraction(-22, 7))) == Fraction(-22, 7)

    def test_selftest_quick(self, capsys):
        code, out, _ = run_cli(capsys, "selftest", "--quick")
        assert code == 0
        report = json.loads(out.splitlines()[-1])
        assert all(report.values())

    def test_selftest_detects_broken_flip(self, capsys, monkeypatch):
        from rankpoly.gf2 import RankProfile

        original = RankProfile.flip_entry

        def corrupted(self, i, j):
            original(self, i, j)
            return self.rank + (1 if (i + j) % 5 == 0 else 0)

        monkeypatch.setattr(RankProfile, "flip_entry", corrupted)
        code, out, _ = run_cli(capsys, "selftest", "--quick")
        assert code == 1
        report = json.loads(out.splitlines()[-1])
        assert report["rank-flip-consistency"] is False
