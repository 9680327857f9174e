import json

from app.main import main


def test_analyze(capsys):
    assert main(["analyze", "--phi", "4*x*(1-x)"]) == 0
    out = capsys.readouterr().out
    assert "pattern:  1+1=2=2" in out
    assert "hurwitz:  ok" in out


def test_analyze_records(capsys):
    assert main(["analyze", "--phi", "x^2+2*x", "--format", "records"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["pattern"]["fibers"] == [[1, 1], [1, 1], [2]]
    assert record["hurwitz_defect"] == 1


def test_bad_pattern_exits_with_usage_status(capsys):
    assert main(["solve", "--pattern", "2+x=3=3"]) == 2
    assert "position 2" in capsys.readouterr().err


def test_unknown_command():
    assert main(["frobnicate"]) == 2


def test_enumerate(capsys):
    assert main(["enumerate", "--restrict", "2,3", "--max-degree", "4"]) == 0
    out = capsys.readouterr().out
    assert "2+1=3=2+1" in out
    assert "covering-known" in out
    assert "no-covering" in out


def test_solve(capsys):
    assert main(["solve", "--pattern", "1+1=2=2"]) == 0
    assert "-x^2+2*x" in capsys.readouterr().out


def test_family_pade(capsys):
    assert main(["family", "pade", "--k", "2", "--l", "1", "--m", "1", "--n", "1"]) == 0
    out = capsys.readouterr().out
    assert "degree:   3" in out
    assert "pattern:  3=2+1=2+1" in out


def test_family_needs_degree(capsys):
    assert main(["family", "cyclic"]) == 2


def test_pullback_recognizes_quadratic(capsys):
    assert main(["pullback", "--params", "1/6,1/10,23/30", "--phi", "4*x*(1-x)"]) == 0
    out = capsys.readouterr().out
    assert "params:   1/3, 1/5, 23/30" in out or "params:   1/5, 1/3, 23/30" in out


def test_verify_small_catalog(catalog_file, capsys):
    assert main(["verify", str(catalog_file), "--order", "8"]) == 0
    assert "2 passed, 0 failed, 2 total" in capsys.readouterr().out


def test_verify_mutants(catalog_file, capsys):
    assert main(["verify", str(catalog_file), "--order", "8", "--mutate", "2"]) == 0
    assert "all 2 mutants rejected" in capsys.readouterr().out


def test_catalog_list(catalog_file, capsys):
    assert main(["catalog", "list", str(catalog_file), "--class", "cyclic"]) == 0
    out = capsys.readouterr().out
    assert "cyclic-3" in out
    assert "quad-symmetric" not in out
