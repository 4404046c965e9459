import csv
import io
import json

import pytest

from ckrg.cli import RunConfig, main
from ckrg.coeffs import EpsLaurent, series
from ckrg.errors import ConfigError

NONLOCAL = '[]: { "-1": 1 }\n[[]]: { "-2": 1 }\n'


def run(*argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err, environ=environ or {})
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# trees ---------------------------------------------------------------------------

def test_trees_pretty_listing():
    code, out, _ = run("trees", "--max-degree", "3")
    assert code == 0
    assert out.splitlines() == ["[]", "[[]]", "[[[]]]", "[[][]]", "1: 1", "2: 1", "3: 2"]


def test_trees_counts_up_to_six():
    code, out, _ = run("trees", "--max-degree", "6", "--output", "json")
    assert code == 0
    assert json.loads(out)["counts"] == {"1": 1, "2": 1, "3": 2, "4": 4, "5": 9, "6": 20}
    _, pretty, _ = run("trees", "--max-degree", "6")
    assert pretty.splitlines()[-1] == "6: 20"


def test_trees_single_degree_csv():
    code, out, _ = run("trees", "--max-degree", "1", "--output", "csv")
    assert code == 0
    assert rows(out) == [{"degree": "1", "encoding": "[]"}]


# decompose -------------------------------------------------------------------------

def test_decompose_degree_one_csv():
    code, out, _ = run("decompose", "--max-degree", "1", "--output", "csv")
    assert code == 0
    table = rows(out)
    assert [r["tree"] for r in table] == ["1", "[]"]
    dot = table[1]
    assert dot["phi_minus"] == str(series("-g/eps"))
    assert dot["phi_plus"] == str(series("g*(E-1)/eps"))
    assert (dot["reconstruct"], dot["pure_pole"], dot["local"]) == ("true", "true", "true")


def test_decompose_degree_zero_is_just_the_unit():
    code, out, _ = run("decompose", "--max-degree", "0", "--output", "csv")
    assert code == 0
    assert len(out.splitlines()) == 2
    assert rows(out)[0]["tree"] == "1"


def test_decompose_json_round_trips_the_series():
    code, out, _ = run("decompose", "--max-degree", "2")
    assert code == 0
    data = json.loads(out)
    assert data["config"]["max_degree"] == 2
    entry = next(e for e in data["entries"] if e["tree"] == "[[]]")
    assert EpsLaurent.from_json(entry["phi_minus"]) == series("g^2/(2*eps^2)")


# beta and verify -----------------------------------------------------------------------

def test_beta_csv():
    code, out, _ = run("beta", "--max-degree", "3", "--output", "csv")
    assert code == 0
    table = rows(out)
    assert table[0]["beta"] == "g"
    assert all(r["beta"] == "0" for r in table[1:])
    assert all(r["pole_free"] == "true" and r["eps_free"] == "true" for r in table)


def test_verify_ladder_passes():
    code, out, _ = run("verify", "--max-degree", "4")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True
    assert [s["suite"] for s in data["suites"]] == [
        "hopf", "birkhoff", "rg", "scattering", "recovery", "ode", "hierarchy"]


def test_verify_mellin_subset_pretty():
    code, out, _ = run("verify", "--rule", "mellin", "--max-degree", "3",
                       "--suite", "ode,birkhoff", "--output", "pretty")
    assert code == 0
    assert out.splitlines()[0] == "[PASS] suite ode"
    assert out.splitlines()[-1] == "all suites passed"


def test_verify_nonlocal_rule_fails_with_a_witness(tmp_path):
    path = tmp_path / "nonlocal.rule"
    path.write_text(NONLOCAL, encoding="utf-8")
    code, out, _ = run("verify", "--rule", str(path), "--max-degree", "2",
                       "--suite", "birkhoff", "--output", "csv")
    assert code == 1
    local = next(r for r in rows(out) if r["identity"] == "counterterm_t_independence")
    assert local["pass"] == "false"
    assert local["witnesses"] == "[[]]"


def test_verify_output_is_deterministic_across_threads():
    _, single, _ = run("verify", "--max-degree", "3")
    code, threaded, _ = run("verify", "--max-degree", "3", environ={"CKRG_THREADS": "4"})
    assert code == 0
    assert threaded == single


# report ---------------------------------------------------------------------------------

def test_report_writes_tables(tmp_path):
    code, out, _ = run("report", "--max-degree", "3", "--out", str(tmp_path))
    assert code == 0
    written = json.loads(out)["written"]
    assert sorted(p.rsplit("/", 1)[-1] for p in written) == ["M.csv", "beta.csv",
                                                               "scattering.csv"]
    beta = rows((tmp_path / "beta.csv").read_text(encoding="utf-8"))
    M = rows((tmp_path / "M.csv").read_text(encoding="utf-8"))
    assert [r["beta"] for r in beta] == ["g", "0", "0", "0"]
    assert [r["M"] for r in M] == ["g", "0", "0", "0"]
    scat = rows((tmp_path / "scattering.csv").read_text(encoding="utf-8"))
    dot = [(r["q_power"], r["coefficient"]) for r in scat if r["tree"] == "[]"]
    assert dot == [("0", str(series("-g/eps"))), ("1", str(series("g/eps")))]


def test_report_with_no_suites_writes_nothing(tmp_path):
    code, out, _ = run("report", "--suite", "", "--out", str(tmp_path / "none"))
    assert code == 0
    assert json.loads(out) == {"written": []}
    assert not (tmp_path / "none").exists()


def test_out_directory_for_other_commands(tmp_path):
    code, out, _ = run("trees", "--max-degree", "2", "--out", str(tmp_path))
    assert code == 0 and out == ""
    assert (tmp_path / "trees.txt").read_text(encoding="utf-8").endswith("2: 1\n")


# configuration errors ---------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "bogus"],
    ["decompose", "--eps-trunc", "2"],
    ["decompose", "--max-degree", "-1"],
    ["verify", "--hierarchy-depth", "0"],
    ["beta", "--output", "xml"],
    ["beta", "--rule", "/nonexistent/rule/file"],
    ["frobnicate"],
])
def test_configuration_errors_exit_two(argv):
    code, _, err = run(*argv)
    assert code == 2
    assert err


def test_invalid_rule_file_exits_two(tmp_path):
    path = tmp_path / "bad.rule"
    path.write_text('[]: { "-1": 1 }\n[]: { "0": 1 }\n', encoding="utf-8")
    code, _, err = run("beta", "--rule", str(path))
    assert code == 2
    assert "DuplicateTree" in err


@pytest.mark.parametrize("value", ["zero", "0", "-3"])
def test_invalid_thread_count_exits_two(value):
    code, _, _ = run("trees", environ={"CKRG_THREADS": value})
    assert code == 2


def test_truncation_exhaustion_exits_one(tmp_path):
    path = tmp_path / "deep.rule"
    path.write_text('[]: { "-9": 1 }\n', encoding="utf-8")
    code, _, err = run("decompose", "--rule", str(path), "--max-degree", "1")
    assert code == 1
    assert "TruncationExhausted" in err


def test_run_config_validation():
    assert RunConfig("verify").validate().max_degree == 5
    with pytest.raises(ConfigError):
        RunConfig("verify", threads=0).validate()
    assert RunConfig("verify").to_json()["eps_trunc"] == 8
