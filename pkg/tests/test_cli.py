import subprocess
import sys

from gpverify import library
from gpverify.cli import main
from gpverify.frontend import parse_formula, parse_graph

TC = str(library.path("twocolouring.gpp"))
DUPDEL = str(library.path("dupdel.gpp"))
DEL = str(library.path("del.gpr"))
Q = str(library.path("q.fol"))
F_ = str(library.path("f.fol"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_two_colouring_on_a_path(tmp_path, capsys):
    host = tmp_path / "path.graph"
    host.write_text("node 1 0 none\nnode 2 0 none\nedge e 1 2 0 none\n")
    code, out, _ = run(capsys, "run", TC, str(host), "--all")
    assert code == 0
    parts = out.split("---\n")
    assert len(parts) == 2
    marks = sorted(tuple(sorted(n.mark for n in parse_graph(p).nodes.values())) for p in parts)
    assert marks == [("blue", "red"), ("blue", "red")]


def test_run_reports_failure(tmp_path, capsys):
    host = tmp_path / "empty.graph"
    host.write_text("")
    code, out, _ = run(capsys, "run", TC, str(host), "--expr", "init")
    assert code == 0 and out.strip() == "FAIL"


def test_slp_of_a_rule_file(capsys):
    code, out, _ = run(capsys, "slp", DEL, Q)
    assert code == 0
    from gpverify.slp import slp_rule
    assert parse_formula(out) == slp_rule(library.formula("q"), library.del_rule())


def test_wlp_of_a_loop_free_program(capsys):
    code, out, _ = run(capsys, "wlp", TC, F_, "--program", "--expr", "init; Colour")
    assert code == 0
    from gpverify.calculus import wlp_lf
    pf = library.two_colouring()
    expected = wlp_lf(pf.command("init; Colour"), library.formula("f"), pf.rules)
    assert parse_formula(out) == expected


def test_program_with_a_loop_has_no_slp(capsys):
    code, _, err = run(capsys, "slp", DUPDEL, Q, "--program")
    assert code == 1
    assert "NotLoopFree" in err


def test_classify_prints_the_flag_tree(capsys):
    code, out, _ = run(capsys, "classify", TC)
    assert code == 0
    first = out.splitlines()[0]
    assert "control" in first and "non-failing" in first
    assert any(line.strip().startswith("init  [loop-free") for line in out.splitlines())


def test_success_and_fail_subcommands(capsys):
    code, out, _ = run(capsys, "success", TC, "--expr", "skip")
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(capsys, "fail", TC, "--expr", "unmark!")
    assert code == 0 and out.strip() == "false"


def test_check_exit_codes(tmp_path, capsys):
    ok = tmp_path / "ok.gps"
    ok.write_text('(:program "twocolouring.gpp")\n(:let f "forallV x (~root(x))")\n'
                  '(:proof (ruleapp-slp :pre f :prog "skip" :post f))\n')
    code, out, _ = run(capsys, "check", str(ok), "--max-nodes", "2", "--max-edges", "1")
    assert code == 0 and "# verdict\tchecked" in out
    assert "1\truleapp-slp\tok" in out

    bad = tmp_path / "bad.gps"
    bad.write_text('(:program "twocolouring.gpp")\n(:let f "forallV x (~root(x))")\n'
                   '(:proof (ruleapp-slp :pre f :prog "skip" :post true))\n')
    code, out, _ = run(capsys, "check", str(bad), "--max-nodes", "2", "--max-edges", "1")
    assert code == 1 and "# verdict\trejected" in out

    weak = tmp_path / "weak.gps"
    weak.write_text('(:program "twocolouring.gpp")\n(:let f "forallV x (~root(x))")\n'
                    '(:proof (cons :pre f :prog "skip" :post true\n'
                    '  (ruleapp-slp :pre "forallV x (mV(x) = none /\\ ~root(x))" :prog "skip"\n'
                    '    :post "forallV x (mV(x) = none /\\ ~root(x))")))\n')
    code, out, _ = run(capsys, "check", str(weak), "--max-nodes", "2", "--max-edges", "1")
    assert code == 1 and "counterexample" in out


def test_bounded_check_exits_with_two(capsys, tmp_path):
    s = tmp_path / "b.gps"
    s.write_text('(:program "twocolouring.gpp")\n'
                 '(:let f "forallV x (~root(x) /\\ mV(x) != green)")\n'
                 '(:proof (cons :pre f :prog "unmark" :post f\n'
                 '  (ruleapp-slp :pre f :prog "unmark" :post (Slp f "unmark"))))\n')
    code, out, _ = run(capsys, "check", str(s), "--max-nodes", "2", "--max-edges", "1")
    assert code == 2 and "checked-with-bounded-obligations" in out


def test_missing_file_is_an_error(capsys):
    code, _, err = run(capsys, "classify", "/nonexistent.gpp")
    assert code == 1 and err.startswith("error:")


def test_installed_entry_point():
    p = subprocess.run([sys.executable, "-m", "gpverify.cli", "slp", "--program", DUPDEL, Q],
                       capture_output=True, text=True)
    assert p.returncode == 1 and "NotLoopFree" in p.stderr
