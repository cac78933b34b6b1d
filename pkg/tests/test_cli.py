import json

import pytest

from conekit.cli import main

REQUIRED = [
    "rank(J)=15",
    "dim K^1=5",
    "dim K^2=3",
    "kappa=2",
    "delta_diff=5",
    "delta_loc=3",
    "shaky degree=2",
    "delta_top=2",
    "overconstrained degree=1",
]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_report_text(capsys):
    code, out, _ = run(capsys, "report", "fayet_wohlhart.json")
    assert code == 0
    for s in REQUIRED:
        assert s in out


def test_fourbar_cone(capsys):
    code, out, _ = run(capsys, "cone", "--order", "1", "fourbar.json")
    assert code == 0 and "dim K^1=1" in out


def test_triangle_rigid(capsys):
    code, out, _ = run(capsys, "report", "triangle_3r")
    assert code == 0 and "rigid structure (delta_loc=0)" in out


def test_json_matches_text_and_is_reproducible(capsys):
    _, first, _ = run(capsys, "report", "fayet_wohlhart", "--json", "--seed", "5")
    _, second, _ = run(capsys, "report", "fayet_wohlhart", "--json", "--seed", "5")
    assert first == second
    doc = json.loads(first)
    assert doc["static_rank"] == 15 and doc["delta_loc"] == 3 and doc["kappa"] == 2
    assert doc["kinematic_singular"]["value"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["cone", "fayet", "--order", "0"],
        ["lk", "fayet", "--k", "19"],
        ["lk", "fayet"],
        ["rank", "fayet", "--bogus"],
        ["trace", "fayet", "--direction", "1,2"],
        ["rank", "no_such_model"],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 2


def test_other_commands(capsys):
    assert run(capsys, "rank", "fayet")[1].count("rank(J)=15") == 1
    code, out, _ = run(capsys, "lk", "fayet", "--k", "16", "--order", "3", "--minors", "sampled")
    assert code == 0 and "all minor derivatives vanish" in out
    code, out, _ = run(capsys, "taylor", "fayet", "--order", "2")
    assert "V^2 vs K^2: equal" in out
    code, out, _ = run(capsys, "trace", "fayet", "--direction", "cone:2:1", "--steps", "5")
    assert code == 0 and "status=completed" in out


def test_internal_error_exit_code(capsys, monkeypatch):
    from conekit import cli
    from conekit.mobility import InternalError

    def broken(m, args):
        raise InternalError("cone larger than kernel")

    monkeypatch.setitem(cli.COMMANDS, "rank", broken)
    code, _, err = run(capsys, "rank", "fayet")
    assert code == 3 and "internal" in err
