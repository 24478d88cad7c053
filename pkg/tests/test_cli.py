import json
import subprocess
import sys

import jsonschema
import pytest

from rainbowlab.cli import load_schema, main
from rainbowlab.constructions import c_counterexample, sequence_satisfying_check, sequence_c
from rainbowlab.spectral import pg_spectrum
from rainbowlab.matching import OrderedMatching, hall_report
from rainbowlab.tuple_space import SpaceParams, extremal_family


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    payload = json.loads(out)
    jsonschema.validate(payload, load_schema(argv[0]))
    return code, payload, err


def test_threshold_report(capsys):
    code, p, _ = run_json(capsys, "threshold", "--min-s", "2", "--max-s", "1000")
    assert code == 0
    assert p["passes_470"] is True and p["passes_471"] is True
    assert p["min_passing_s"] == 466 and p["failures_after_min"] == []
    assert p["at"]["470"]["x"] == 198
    assert p["log_base_variants_470"]["2"]["passes"] is False
    assert p["double_agrees"] is True


def test_threshold_none_in_range_exits_1(capsys):
    code, p, _ = run_json(capsys, "threshold", "--min-s", "2", "--max-s", "10", "--table")
    assert code == 1 and p["min_passing_s"] is None and len(p["table"]) == 9


def test_threshold_csv(capsys):
    code, out, _ = run(capsys, "threshold", "--min-s", "468", "--max-s", "472", "--table", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("s,log_base,x,z,")
    assert len(lines) == 6 and lines[3].startswith("470,e,198,")


def test_threshold_bad_range_exits_2(capsys):
    code, out, err = run(capsys, "threshold", "--min-s", "1", "--max-s", "10")
    assert code == 2 and out == "" and "range" in err


def test_concentration_random_family(capsys):
    argv = ["concentration", "--n", "60", "--k", "2", "--alpha", "0.1", "--trials", "20000", "--seed", "7"]
    code, p, _ = run_json(capsys, *argv, "--threads", "1", "--cond", "9,5")
    assert code == 0 and p["pass"]
    assert p["family_size"] == 360 and p["alpha_n"] == 6.0
    assert len(p["tails"]) == 2 and len(p["half_split"]) == 2 and len(p["conditional_tails"]) == 2


def test_concentration_bytes_independent_of_threads(capsys):
    argv = ["concentration", "--n", "20", "--k", "2", "--alpha", "0.2", "--trials", "6000", "--seed", "99"]
    outs = {run(capsys, *argv, "--threads", t)[1] for t in ("1", "3", "8")}
    assert len(outs) == 1


def test_concentration_odd_n_skips_half_split(capsys):
    code, p, _ = run_json(capsys, "concentration", "--n", "7", "--k", "2", "--extremal-s", "3", "--trials", "500")
    assert code == 0 and p["half_split"] is None and "odd" in p["half_split_note"]


def test_concentration_csv(capsys):
    code, out, _ = run(
        capsys, "concentration", "--n", "6", "--k", "2", "--trials", "500", "--lambdas", "1,2", "--format", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "delta,lambda,empirical,stderr,bound,pass" and len(lines) == 5


def test_concentration_bad_alpha_exits_2(capsys):
    code, _, err = run(capsys, "concentration", "--n", "6", "--k", "2", "--alpha", "1.5", "--trials", "10")
    assert code == 2 and "alpha" in err


def test_spectral(capsys):
    code, p, _ = run_json(capsys, "spectral", "--n", "3", "--k", "2", "--subsets", "50", "--seed", "1")
    assert code == 0 and p["spectrum"] == {"D": 4, "lambda2": 2, "spectrum": [[4, 1], [1, 4], [-2, 4]]}
    assert p["violations"] == {"alon_chung": 0, "pair_probabilities": 0, "conditional_expectation": 0}


def test_verify_exhaustive(capsys):
    code, p, err = run_json(capsys, "verify", "--n", "2", "--k", "2", "--s", "2", "--mode", "exhaustive")
    assert code == 0 and p["verified"] and p["message"] == "verified 25 pairs"
    assert "verified 25 pairs" in err


def test_verify_counterexample_exits_1(capsys):
    code, p, _ = run_json(capsys, "verify", "--n", "2", "--k", "2", "--s", "2", "--bounds", "2,2")
    assert code == 1 and p["status"] == "counterexample"
    assert p["counterexample"] == [extremal_family(SpaceParams(2, 2, 2)).to_dict()] * 2


def test_verify_over_budget_exits_2(capsys):
    code, _, err = run(capsys, "verify", "--n", "3", "--k", "2", "--s", "2", "--budget", "100")
    assert code == 2 and "145924" in err


def test_verify_random_mode(capsys):
    code, p, _ = run_json(capsys, "verify", "--n", "3", "--k", "2", "--s", "2", "--mode", "random", "--budget", "50")
    assert code == 0 and p["status"] == "inconclusive" and p["checked"] == 50


def test_counterexample(capsys):
    code, p, _ = run_json(capsys, "counterexample", "--n", "3", "--k", "2", "--s", "2")
    assert code == 0 and p["pass"]
    assert [r["F"] for r in p["results"]] == [[3, 1], [3, 2], [3, 3]]
    assert all(r["rainbow"] == "absent" and r["sizes"] == [1, 4] for r in p["results"])
    fams = c_counterexample(2, 3, 2, (3, 1))
    assert p["results"][0]["families"] == [f.to_dict() for f in fams]


def test_counterexample_invalid_F_exits_2(capsys):
    code, _, _ = run(capsys, "counterexample", "--n", "4", "--k", "2", "--s", "3", "--F", "2,1")
    assert code == 2


def test_hall(capsys):
    code, p, _ = run_json(capsys, "hall", "--n", "4", "--k", "2", "--s", "3", "--trials", "300")
    assert code == 0 and p["violations"] == 0 and len(p["reports"]) == 300
    code, p, _ = run_json(capsys, "hall", "--n", "4", "--k", "2", "--s", "3", "--trials", "30", "--summary-only")
    assert "reports" not in p


def test_shift(capsys):
    code, p, _ = run_json(capsys, "shift", "--n", "3", "--k", "2", "--instances", "200", "--seed", "5")
    assert code == 0 and p["pass"]
    assert p["violations"] == {"cardinality": 0, "down_set": 0, "rainbow_created": 0}


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["concentration", "--n", "4", "--k", "2", "--seed", "-3"])
    assert err.value.code == 2


def test_wire_format_schemas():
    p = SpaceParams(3, 2, 2)
    ext = extremal_family(p)
    jsonschema.validate(ext.to_dict(), load_schema("family"))
    jsonschema.validate(pg_spectrum(3, 2).to_dict(), load_schema("spectrum"))
    jsonschema.validate(hall_report([ext, ext], OrderedMatching.identity(p.space())).to_dict(), load_schema("hall_report"))
    verdict = sequence_satisfying_check(sequence_c(2, 3, 2))
    jsonschema.validate(verdict.to_dict(), load_schema("verdict"))


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rainbowlab.cli", "verify", "--n", "2", "--k", "2", "--s", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["message"] == "verified 25 pairs"
    assert proc.stderr.strip() == "verified 25 pairs"
