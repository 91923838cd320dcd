import io
import subprocess
import sys

import pytest

from qdag.cli import main

from .conftest import CHAIN3_DOC, FIG4_DOC, FIG6_DOC


@pytest.fixture
def fig4_file(tmp_path):
    path = tmp_path / "fig4.net"
    path.write_text(FIG4_DOC)
    return str(path)


@pytest.fixture
def fig6_file(tmp_path):
    path = tmp_path / "fig6.net"
    path.write_text(FIG6_DOC)
    return str(path)


@pytest.fixture
def fig4_dag(tmp_path, fig4_file):
    out = tmp_path / "fig4.qdag"
    assert main(["compile", fig4_file, "--query", "B", "--evidence", "C",
                 "-o", str(out)]) == 0
    return str(out)


@pytest.fixture
def fig6_dag(tmp_path, fig6_file):
    out = tmp_path / "fig6.qdag"
    assert main(["compile", fig6_file, "--query", "A,B", "--evidence", "B",
                 "-o", str(out)]) == 0
    return str(out)


def _run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _values(out: str) -> dict[str, float]:
    result = {}
    for line in out.strip().splitlines():
        key, value = line.rsplit(" ", 1)
        result[key] = float(value)
    return result


def test_eval_observed(fig4_dag, capsys):
    code, out, _ = _run(["eval", fig4_dag, "--set", "C=ON"], capsys)
    assert code == 0
    got = _values(out)
    assert got["B=ON"] == pytest.approx(0.3475)
    assert got["B=OFF"] == pytest.approx(0.2725)


def test_eval_unknown_token(fig4_dag, capsys):
    code, out, _ = _run(["eval", fig4_dag, "--set", "C=?"], capsys)
    assert code == 0
    got = _values(out)
    assert got["B=ON"] == pytest.approx(0.635)
    assert got["B=OFF"] == pytest.approx(0.365)


def test_eval_normalize(fig4_dag, capsys):
    code, out, _ = _run(["eval", fig4_dag, "--set", "C=ON", "--normalize", "B"], capsys)
    assert code == 0
    got = _values(out)
    assert got["B=ON|e"] == pytest.approx(0.3475 / 0.62)
    assert got["B=OFF|e"] == pytest.approx(0.2725 / 0.62)


def test_eval_watch_matches_fresh_runs(fig4_dag, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("C=OFF\nC=?\n"))
    code, out, _ = _run(["eval", fig4_dag, "--watch"], capsys)
    assert code == 0
    blocks = out.strip().splitlines()
    # initial output, then two blocks of {2 lines + recomputed line}
    assert len(blocks) == 2 + 3 + 3
    first = _values("\n".join(blocks[2:4]))
    assert first["B=ON"] == pytest.approx(0.2875)
    assert blocks[4].startswith("recomputed ")
    second = _values("\n".join(blocks[5:7]))
    assert second["B=ON"] == pytest.approx(0.635)


def test_eval_rejects_unknown_variable(fig4_dag, capsys):
    code, _, err = _run(["eval", fig4_dag, "--set", "Z=1"], capsys)
    assert code == 1
    assert "unknown evidence variable" in err


def test_eval_rejects_unknown_value(fig4_dag, capsys):
    code, _, err = _run(["eval", fig4_dag, "--set", "C=MAYBE"], capsys)
    assert code == 1


def test_compile_no_reduce_bigger(tmp_path, fig4_file, capsys):
    raw = tmp_path / "raw.qdag"
    red = tmp_path / "red.qdag"
    main(["compile", fig4_file, "--query", "B", "--evidence", "C",
          "--no-reduce", "-o", str(raw)])
    main(["compile", fig4_file, "--query", "B", "--evidence", "C", "-o", str(red)])
    n_raw = int(raw.read_text().splitlines()[3].split()[1])
    n_red = int(red.read_text().splitlines()[3].split()[1])
    assert (n_raw, n_red) == (27, 21)


def test_reduce_report(tmp_path, fig4_file, capsys):
    raw = tmp_path / "raw.qdag"
    main(["compile", fig4_file, "--query", "B", "--evidence", "C",
          "--no-reduce", "-o", str(raw)])
    capsys.readouterr()
    code, out, err = _run(["reduce", str(raw), "--report",
                           "-o", str(tmp_path / "out.qdag")], capsys)
    assert code == 0
    assert "nodes before 27 after 21" in err
    assert "rule numeric-reduction applied" in err


def test_reduce_single_rule(tmp_path, fig4_file, capsys):
    raw = tmp_path / "raw.qdag"
    main(["compile", fig4_file, "--query", "B", "--evidence", "C",
          "--no-reduce", "-o", str(raw)])
    capsys.readouterr()
    code, out, _ = _run(["reduce", str(raw), "--rule", "commutative-merging"], capsys)
    assert code == 0
    assert out.startswith("QDAG 1\n")


def test_oracle_cmd(tmp_path, fig4_file, capsys):
    code, out, _ = _run(["oracle", fig4_file, "--query", "B", "--set", "C=ON"], capsys)
    assert code == 0
    got = _values(out)
    assert got["B=ON"] == pytest.approx(0.3475)


def test_stats_cmd(fig4_file, capsys):
    code, out, _ = _run(["stats", fig4_file], capsys)
    assert code == 0
    lines = dict(line.split(" ") for line in out.strip().splitlines())
    assert lines["clusters"] == "2"
    assert lines["max_cluster_size"] == "2"
    assert lines["total_table_size"] == "8"


def test_voi_cmd(fig6_dag, capsys):
    code, out, _ = _run(["voi", fig6_dag, "B", "--utility", "2.5,-3"], capsys)
    assert code == 0
    # 2.5 * .59 - 3 * .41
    assert float(out.strip()) == pytest.approx(0.245)


def test_voi_requires_unobserved(fig6_dag, capsys):
    code, _, err = _run(["voi", fig6_dag, "B", "--utility", "2.5,-3",
                         "--set", "B=true"], capsys)
    assert code == 3
    assert "already observed" in err


def test_voi_rejects_non_query_variable(fig4_dag, capsys):
    code, _, err = _run(["voi", fig4_dag, "C", "--utility", "1,0"], capsys)
    assert code == 1
    assert "not a query variable" in err


def test_zero_probability_evidence_exit_code(tmp_path, capsys):
    # deterministic chain where observing contradictory values zeroes out
    doc = """{
      "variables": [
        {"name": "A", "values": ["a0", "a1"]},
        {"name": "B", "values": ["b0", "b1"]}
      ],
      "cpts": [
        {"child": "A", "parents": [], "table": [1.0, 0.0]},
        {"child": "B", "parents": ["A"], "table": [1.0, 0.0, 0.0, 1.0]}
      ]
    }"""
    net = tmp_path / "det.net"
    net.write_text(doc)
    dag = tmp_path / "det.qdag"
    main(["compile", str(net), "--query", "A", "--evidence", "A,B", "-o", str(dag)])
    capsys.readouterr()
    code, _, err = _run(["eval", str(dag), "--set", "B=b1", "--normalize", "A"], capsys)
    assert code == 3
    assert "zero probability" in err


def test_format_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.qdag"
    bad.write_text("QDAG 9\n")
    code, _, err = _run(["eval", str(bad)], capsys)
    assert code == 2
    assert "bad version" in err


def test_usage_error_exit_code(capsys):
    code, _, err = _run(["compile"], capsys)
    assert code == 1


def test_missing_file_reports_format_error(capsys):
    code, _, err = _run(["eval", "/nonexistent/path.qdag"], capsys)
    assert code == 2


def test_eval_evidence_file(tmp_path, fig4_dag, capsys):
    evfile = tmp_path / "ev.txt"
    evfile.write_text("C=ON\n")
    code, out, _ = _run(["eval", fig4_dag, "--evidence-file", str(evfile)], capsys)
    assert code == 0
    assert _values(out)["B=ON"] == pytest.approx(0.3475)
    # --set overrides the file
    evfile.write_text("C=OFF\n")
    code, out, _ = _run(["eval", fig4_dag, "--evidence-file", str(evfile),
                         "--set", "C=?"], capsys)
    assert _values(out)["B=ON"] == pytest.approx(0.635)


def test_end_to_end_pipeline_matches_oracle(tmp_path, capsys):
    """compile | reduce | eval with evidence files reproduces the oracle
    for every golden network and every evidence file."""
    docs = {"fig4": FIG4_DOC, "fig6": FIG6_DOC, "chain": CHAIN3_DOC}
    queries = {"fig4": ("B", "C"), "fig6": ("A,B", "B"), "chain": ("C", "B")}
    for name, doc in docs.items():
        netfile = tmp_path / f"{name}.net"
        netfile.write_text(doc)
        raw = tmp_path / f"{name}.raw.qdag"
        reduced = tmp_path / f"{name}.qdag"
        query, evidence = queries[name]
        assert main(["compile", str(netfile), "--query", query,
                     "--evidence", evidence, "--no-reduce", "-o", str(raw)]) == 0
        assert main(["reduce", str(raw), "-o", str(reduced)]) == 0
        evidence_cases = [""] + [f"{evidence}={v}\n" for v in
                                 ("ON", "OFF") if name != "fig6"] + \
                         ([f"B=true\n", f"B=false\n"] if name == "fig6" else [])
        for i, content in enumerate(evidence_cases):
            evfile = tmp_path / f"{name}.{i}.ev"
            evfile.write_text(content)
            capsys.readouterr()
            code = main(["eval", str(reduced), "--evidence-file", str(evfile)])
            out = capsys.readouterr().out
            got = _values(out)
            for qvar in query.split(","):
                capsys.readouterr()
                argv = ["oracle", str(netfile), "--query", qvar]
                for token in content.split():
                    argv += ["--set", token]
                assert main(argv) == 0
                want = _values(capsys.readouterr().out)
                for key, value in want.items():
                    assert got[key] == pytest.approx(value, rel=1e-9)
            assert code == 0


def test_console_script_entry_point(tmp_path, fig4_file):
    result = subprocess.run(
        [sys.executable, "-m", "qdag.cli", "stats", fig4_file],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert "clusters 2" in result.stdout
