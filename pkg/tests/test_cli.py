import json
from pathlib import Path

import pytest

from ellstat import cli
from ellstat.cli import BUILTIN_CURVES, UsageError, main, parse_curve
from ellstat.ecfp import CertificationError, Curve

GOLDEN = Path(__file__).parent / "golden"


def run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


# --- curve parsing ---------------------------------------------------------

def test_parse_curve_examples():
    assert parse_curve("A") == Curve(0, 0, 0, -1, 0)
    assert parse_curve("0,0,1,-1,0") == Curve(*BUILTIN_CURVES["F"])
    assert parse_curve("E").coefficients == (0, 0, 0, 6, -2)
    with pytest.raises(UsageError, match="discriminant"):
        parse_curve("0,0,0,0,0")
    with pytest.raises(UsageError, match="a4"):
        parse_curve("0,0,0,x,1")
    with pytest.raises(UsageError, match="5 coefficients"):
        parse_curve("1,2,3")


# --- golden files --------------------------------------------------------------

GOLDEN_RUNS = [
    ("split_E.csv", ["split", "--curve", "E", "--xmax", "100000", "--serre-m", "3"], ["per_d"]),
    ("outside_F.csv", ["outside", "--curve", "F", "--xmax", "100000", "--serre-m", "37"], []),
    ("twins_F.csv", ["twins", "--curve", "F", "--xmax", "1000"], ["census", "moments"]),
    ("twin_n_E.csv", ["twin-n", "--curve", "E", "--n", "13269240"], []),
    ("census.csv", ["census", "--xmax", "1000"], ["primes"]),
    ("constants.csv", ["constants", "--serre-m", "37"], []),
]


@pytest.mark.parametrize("name,args,siblings", GOLDEN_RUNS, ids=[g[0] for g in GOLDEN_RUNS])
def test_golden_files(tmp_path, name, args, siblings):
    code, out = run(tmp_path, *args, name=name)
    assert code == 0
    assert out.read_text() == (GOLDEN / name).read_text()
    stem = Path(name).stem
    for s in siblings:
        assert (tmp_path / f"{stem}.{s}.csv").read_text() == (GOLDEN / f"{stem}.{s}.csv").read_text()


def test_split_row_and_header(capsys):
    assert main(["split", "--curve", "E", "--xmax", "100000", "--serre-m", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# ellstat ") and "threads" not in lines[0]
    assert lines[1:] == ["X,pi,S,ratio", "100000,9592,11945,1.24530"]


def test_twin_n_spot_check(capsys):
    assert main(["twin-n", "--curve", "A", "--n", "12818000"]) == 0
    row = capsys.readouterr().out.splitlines()[-1].split(",")
    assert row[:2] == ["12818000", "24"]


def test_census_oracle_ok():
    assert main(["census", "--xmax", "100", "--oracle"]) == 0


def test_oracle_subcommand(tmp_path):
    code, out = run(tmp_path, "oracle", "--xmax", "60")
    assert code == 0
    rows = out.read_text().splitlines()[2:]
    assert rows and all(r.endswith(",1") for r in rows)


def test_invariants_subcommand(tmp_path):
    code, out = run(tmp_path, "invariants", "--curve", "A", "--xmax", "20")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "p,status,a,n,d1,d2,supersingular"
    assert "2,bad,,,,," in lines
    assert "17,good,2,16,4,1,0" in lines
    assert "7,good,0,8,2,2,1" in lines


# --- exit codes ----------------------------------------------------------------

def test_usage_errors():
    assert main([]) == 1
    assert main(["split", "--curve", "E"]) == 1
    assert main(["split", "--curve", "0,0,0,0,0", "--xmax", "100"]) == 1
    assert main(["split", "--curve", "E", "--xmax", "4"]) == 1
    assert main(["split", "--curve", "E", "--xmax", "100", "--block-size", "1000"]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["--version"]) == 0


def test_io_error(tmp_path):
    bad = tmp_path / "missing" / "out.csv"
    assert main(["constants", "--out", str(bad)]) == 2


def test_invariant_violation_exit_code(monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise CertificationError("d1=7 at p=1009 violates the structure congruences")

    monkeypatch.setattr(cli, "census_averages", broken)
    assert main(["census", "--xmax", "2000"]) == 3
    assert "p=1009" in capsys.readouterr().err


# --- scheduling, checkpoints ------------------------------------------------------

SCAN = ["--curve", "F", "--xmax", "400000", "--block-size", "65536"]


@pytest.mark.parametrize("command", ["split", "outside"])
def test_thread_count_independence(tmp_path, command):
    outputs = []
    for t in (1, 2, 8):
        code, out = run(tmp_path, command, *SCAN, "--serre-m", "37", "--threads", str(t), name=f"{command}{t}.csv")
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_thread_count_independence_other_commands(tmp_path):
    for args in (["twins", "--curve", "E", "--xmax", "2000"], ["census", "--xmax", "2000"]):
        texts = {run(tmp_path, *args, "--threads", str(t), name=f"x{t}.csv")[1].read_bytes() for t in (1, 2, 8)}
        assert len(texts) == 1


def test_block_size_does_not_change_results(tmp_path):
    _, a = run(tmp_path, "split", "--curve", "F", "--xmax", "400000", "--block-size", "65536", name="a.csv")
    _, b = run(tmp_path, "split", "--curve", "F", "--xmax", "400000", name="b.csv")
    body = lambda p: p.read_text().splitlines()[1:]  # noqa: E731
    assert body(a) == body(b)


def test_checkpoint_resume_is_identical(tmp_path, capsys):
    _, ref = run(tmp_path, "split", *SCAN, name="ref.csv")
    ck = tmp_path / "ck.json"
    out = tmp_path / "resumed.csv"
    args = ["split", *SCAN, "--out", str(out), "--checkpoint", str(ck)]
    assert main(args + ["--max-blocks", "3"]) == 0
    assert ck.exists() and not out.exists()
    assert json.loads(ck.read_text())["last_completed_block"] == 2
    assert main(args) == 0
    assert out.read_bytes() == ref.read_bytes()
    assert (tmp_path / "resumed.per_d.csv").read_bytes() == (tmp_path / "ref.per_d.csv").read_bytes()


def test_checkpoint_roundtrip_identity(tmp_path):
    ck = tmp_path / "ck.json"
    assert main(["split", *SCAN, "--checkpoint", str(ck), "--max-blocks", "2"]) == 0
    cfg = cli.config_from_args(["split", *SCAN])
    before = ck.read_text()
    last, acc = cli.checkpoint_roundtrip(ck, cfg.fingerprint())
    assert last == 1 and ck.read_text() == before


def test_checkpoint_refusals(tmp_path, capsys):
    ck = tmp_path / "ck.json"
    out = tmp_path / "o.csv"
    assert main(["split", *SCAN, "--checkpoint", str(ck), "--max-blocks", "1"]) == 0

    # different configuration
    assert main(["split", "--curve", "E", "--xmax", "400000", "--block-size", "65536", "--checkpoint", str(ck)]) == 2
    assert "different configuration" in capsys.readouterr().err

    # version bump
    data = json.loads(ck.read_text())
    data["version"] = "99.0"
    ck.write_text(json.dumps(data))
    assert main(["split", *SCAN, "--checkpoint", str(ck), "--out", str(out)]) == 2
    assert "version" in capsys.readouterr().err
    assert not out.exists()

    # corrupt file
    ck.write_text("{not json")
    assert main(["split", *SCAN, "--checkpoint", str(ck), "--out", str(out)]) == 2
    assert "corrupt" in capsys.readouterr().err
    assert not out.exists()


def test_ratio_formatting_truncates():
    from fractions import Fraction

    assert cli.fmt_ratio(Fraction(11945, 9592)) == "1.24530"
    assert cli.fmt_ratio(Fraction(2, 3)) == "0.66666"


def test_small_prime_outside_rows_are_flagged_not_dropped(capsys):
    assert main(["outside", "--curve", "A", "--xmax", "1000"]) == 0
    rows = [r.split(",") for r in capsys.readouterr().out.splitlines()[2:]]
    small = [r for r in rows if int(r[0]) < 100]
    assert small and all(r[3].startswith("artifact-") for r in small)
    assert all(not r[3].startswith("artifact-") for r in rows if int(r[0]) >= 100)
