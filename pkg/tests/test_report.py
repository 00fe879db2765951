import json

import numpy as np

from adaptest import __version__
from adaptest.core import RngSpec
from adaptest.families import get_family
from adaptest.report import (
    format_report,
    parse_report_text,
    report_to_dict,
    table_header,
    write_report,
    write_table,
)
from adaptest.sim import ScenarioSpec, generate
from adaptest.transform import TestOptions, wn_statistic


def _report():
    d = generate(ScenarioSpec("H12", n=80, p=3, a=0.5), RngSpec(2))
    return wn_statistic(d, get_family("linear", 3), TestOptions(spherical=True, grid_resolution=8))


def test_dict_is_json_serializable_and_complete():
    rep = _report()
    data = report_to_dict(rep, {"seed": 2})
    text = json.dumps(data)
    back = json.loads(text)
    assert back["adaptest_version"] == __version__ and back["config"] == {"seed": 2}
    assert back["w2"] == rep.w2 and back["q_hat"] == rep.q_hat
    np.testing.assert_array_equal(back["beta"], rep.beta)


def test_text_round_trip_is_exact():
    rep = _report()
    fields = parse_report_text(format_report(rep, {"seed": 2, "flag": True, "name": None}))
    assert float(fields["w2"]) == rep.w2 and float(fields["p_value"]) == rep.p_value
    np.testing.assert_array_equal([float(v) for v in fields["beta"].split()], rep.beta)
    assert fields["config.flag"] == "true" and fields["config.name"] == "none"
    assert fields["status"] == "ok"


def test_non_finite_values_survive_json():
    rep = _report()
    failed = type(rep)(**{**rep.__dict__, "w2": float("nan")})
    data = report_to_dict(failed)
    assert data["w2"] == "nan" and "NaN" not in json.dumps(data)


def test_write_report_and_table(tmp_path):
    rep = _report()
    text, side = write_report(rep, tmp_path / "r.txt", {"seed": 1})
    assert side.name == "r.txt.json"
    assert json.loads(side.read_text())["w2"] == float(parse_report_text(text.read_text())["w2"])
    path = write_table("a,b\n1,2\n", tmp_path / "t.csv", {"seed": 3, "probs": [0.5, 0.9]})
    lines = path.read_text().splitlines()
    assert lines[0] == f"# adaptest_version: {__version__}"
    assert "# seed: 3" in lines and "# probs: 0.5 0.9" in lines and lines[-1] == "1,2"
    assert table_header({}).count("\n") == 1
