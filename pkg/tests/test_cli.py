import subprocess
import sys
import time

import pytest

from velojump.cli import build_parser, main

W_TEXT = "kind=piecewise_linear\n0 1\n1 0\n2 1.5\n3 -1\n4 2\n"

SMOKE = {
    "kramers": ["--eps", "0.1,0.05", "--runs", "50", "--seed", "7"],
    "residual": ["--eps", "0.1", "--runs", "500", "--seed", "7", "--rate", "const:0.5"],
    "invariance": ["--eps", "0.3", "--horizon", "20000", "--seed", "7"],
    "anneal1d": ["--runs", "10", "--horizon", "5000", "--seed", "7", "--checkpoints", "100,1000"],
    "annealtorus": ["--runs", "4", "--horizon", "500", "--seed", "7", "--checkpoints", "50"],
}


def run(tmp_path, args, name="out.csv"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


@pytest.mark.parametrize("cmd", sorted(SMOKE))
def test_byte_identical_reruns_and_smoke_time(tmp_path, cmd):
    t = time.time()
    c1, a = run(tmp_path, [cmd] + SMOKE[cmd], "a.csv")
    assert time.time() - t < 60
    c2, b = run(tmp_path, [cmd] + SMOKE[cmd], "b.csv")
    assert c1 == c2 == 0
    assert a == b
    text = a.decode()
    meta = [l for l in text.splitlines() if l.startswith("# ")]
    assert f"# subcommand={cmd}" in meta and "# seed=7" in meta
    c3, c = run(tmp_path, [cmd] + [v if v != "7" else "8" for v in SMOKE[cmd]], "c.csv")
    assert c3 == 0 and c != a


def test_kramers_example(tmp_path):
    args = ["kramers", "--eps", "0.05", "--runs", "100", "--seed", "7"]
    _, a = run(tmp_path, args, "a.csv")
    _, b = run(tmp_path, args, "b.csv")
    assert a == b
    rows = [l for l in a.decode().splitlines() if not l.startswith("#")]
    assert rows[0] == "eps,run_id,tau,n_flips" and len(rows) == 101


def test_landscape_file(tmp_path, capsys):
    f = tmp_path / "w.txt"
    f.write_text(W_TEXT)
    assert main(["landscape", "--potential", str(f)]) == 0
    out = capsys.readouterr().out
    assert "# critical_depth=1.5" in out
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == "position,value,depth,z_l,z_r"
    assert rows[1].startswith("1.0,0.0,1.5,") and rows[2].startswith("3.0,-1.0,inf,")


def test_missing_seed_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["kramers", "--eps", "0.05"])
    assert e.value.code == 2
    assert "--seed" in capsys.readouterr().err


@pytest.mark.parametrize("args,field", [
    (["kramers", "--seed", "1", "--eps", "-0.1"], "--eps"),
    (["kramers", "--seed", "1", "--runs", "0"], "--runs"),
    (["kramers", "--seed", "1", "--potential", "nosuch"], "--potential"),
    (["kramers", "--seed", "1", "--potential", "cos"], "--potential"),
    (["annealtorus", "--seed", "1", "--potential", "w"], "--potential"),
    (["anneal1d", "--seed", "1", "--schedule", "exp:2"], "--schedule"),
    (["anneal1d", "--seed", "1", "--horizon", "10", "--checkpoints", "20"], "--checkpoints"),
    (["residual", "--seed", "1", "--rate", "const:-1"], "--rate"),
    (["invariance", "--seed", "1", "--eps", "0.1,0.2"], "--eps"),
])
def test_validation_exits_2(args, field, capsys):
    assert main(args) == 2
    assert field in capsys.readouterr().err


def test_numerical_failure_exits_3(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("kind=torus_trig\ndim: 2\ngrad_sup: 0.01\nterm: 1 0 1 0\nterm: 1 0 0 1\n")
    assert main(["annealtorus", "--seed", "1", "--potential", str(f), "--horizon", "50", "--runs", "1"]) == 3
    assert "numerical" in capsys.readouterr().err


def test_help_mentions_every_experiment():
    text = build_parser().format_help()
    for cmd in ("kramers", "invariance", "anneal1d", "annealtorus", "residual", "landscape"):
        assert cmd in text


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "velojump.cli", "landscape", "--potential", "three_well"],
                       capture_output=True, text=True, check=True)
    assert "# critical_depth=2.5" in r.stdout
