import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from thetablocks.cli import main
from thetablocks.qseries import FourierSeries

from oracles import eta_product, series_dict

GOLDEN = Path(__file__).parent / "golden"


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    flag = "--out" if argv[0] in ("expand", "hecke") else "--json"
    code = main([*argv, flag, str(out)])
    return code, out.read_text()


@pytest.mark.parametrize("argv, golden", [
    (["lattice-info", "L4"], "lattice_info_L4.json"),
    (["verify", "identity67", "--qprec", "4"], "verify_identity67_q4.json"),
    (["expand", "eta", "--qprec", "3"], "expand_eta_q3.json"),
    (["expand", "eta^-3 th(1)^4 th(2) th(3) th(4)^2 th(7)", "--qprec", "3"], "expand_wt3_q3.json"),
    (["hecke", str(GOLDEN / "expand_wt3_q3.json"), "--m", "2"], "hecke_wt3_m2.json"),
])
def test_golden_files(tmp_path, argv, golden):
    code, text = run(tmp_path, *argv)
    assert code == 0
    assert text == (GOLDEN / golden).read_text()


def test_golden_eta_matches_product_oracle():
    s = FourierSeries.from_json(json.loads((GOLDEN / "expand_eta_q3.json").read_text()))
    assert {(q, ()): c for (q, _), c in series_dict(s).items()} == eta_product(3)


def test_lattice_info_reports_published_data():
    doc = json.loads((GOLDEN / "lattice_info_L4.json").read_text())
    assert doc["determinant"] == 500 and doc["level"] == 10


def test_reports_are_byte_deterministic(tmp_path):
    texts = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "thetablocks.cli", "verify", "rtr", "--qprec", "3", "--json", str(path)],
                       check=True, capture_output=True)
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]


def test_exit_code_fail(capsys):
    assert main(["verify", "vectors-L4"]) == 1
    assert "[   fail]" in capsys.readouterr().out


def test_exit_code_precision(capsys):
    assert main(["verify", "identity49", "--qprec", "1/2"]) == 3


@pytest.mark.parametrize("argv", [
    ["verify", "no-such-campaign"],
    ["verify", "rtr", "--qprec", "abc"],
    ["verify", "rtr", "--qprec", "-2"],
    ["expand"],
    ["lattice-info"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_bad_input_exits_2(tmp_path, capsys):
    assert main(["expand", "th(x)"]) == 2
    assert main(["hecke", str(tmp_path / "missing.json"), "--m", "2"]) == 2
    assert main(["lattice-info", "[[1, 2], [3, 4]]"]) == 2


def test_qprec_accepts_fractions(tmp_path):
    code, text = run(tmp_path, "expand", "eta", "--qprec", "25/24")
    s = FourierSeries.from_json(json.loads(text))
    assert code == 0 and s.qprec == F(25, 24)


def test_lattice_option_form(capsys):
    assert main(["lattice-info", "--lattice", "L6"]) == 0
    assert "108" in capsys.readouterr().out
