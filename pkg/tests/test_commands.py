import argparse

import pytest

import peekac
import peekac_commands as cmd
import peekac_config as cfg
from peekac_io import format_structure, parse_cnf, parse_setcon, parse_structure
from peekac_templates import graph_structure, satisfiable_point_network
from peekac_utils import make_rng
from strategies import cycle_graph, triangle


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "triangle.txt").write_text(format_structure(triangle()))
    (tmp_path / "square.txt").write_text(format_structure(cycle_graph(4)))
    (tmp_path / "unsat.cnf").write_text("p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n")
    (tmp_path / "gap.setcon").write_text("vars x y\ndis x x\ndis y y\nneq x y\n")
    (tmp_path / "broken.txt").write_text("universe a\nrelation E 2\na\n")
    return tmp_path


def solve_args(template, instance, *, method="pac", workers=1, budget=cfg.HOM_SEARCH_BUDGET, fmt="text", full_report=False):
    return argparse.Namespace(
        command="solve",
        template=template,
        instance=instance,
        method=method,
        workers=workers,
        seed=None,
        budget=budget,
        format=fmt,
        full_report=full_report,
    )


def gen_args(kind, size, *, seed=0, output=None, clauses=None):
    return argparse.Namespace(
        command="gen",
        kind=kind,
        size=size,
        seed=seed,
        output=output,
        edge_prob=cfg.DEFAULT_EDGE_PROB,
        clauses=clauses,
        le_density=cfg.DEFAULT_LE_DENSITY,
        ne_density=cfg.DEFAULT_NE_DENSITY,
        density=cfg.DEFAULT_SETCON_DENSITY,
    )


def bench_args(template="pointalg", sizes="4,8", workers_list="1", method="pac", output=None, timeout=60.0):
    return argparse.Namespace(
        command="bench",
        template=template,
        method=method,
        sizes=sizes,
        workers_list=workers_list,
        seed=0,
        timeout=timeout,
        output=output,
        edge_prob=0.3,
        clauses=None,
        le_density=cfg.DEFAULT_LE_DENSITY,
        ne_density=cfg.DEFAULT_NE_DENSITY,
        density=cfg.DEFAULT_SETCON_DENSITY,
    )


def characterize_args(template, *, nmax=2, cap_universe=cfg.MAX_POWER_UNIVERSE, fmt="lines", output=None):
    return argparse.Namespace(
        command="characterize",
        template=template,
        nmax=nmax,
        cap_universe=cap_universe,
        max_vars=2,
        max_tuples=2,
        no_shrink=False,
        format=fmt,
        output=output,
    )


def test_solve_pac_rejects_triangle(workspace, capsys):
    assert cmd.cmd_solve(solve_args("k2", "triangle.txt", fmt="lines")) == cfg.EXIT_REJECT
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "decision reject"
    assert "rejecting_variable v0" in out


def test_solve_pac_accepts_even_cycle(workspace, capsys):
    assert cmd.cmd_solve(solve_args("k2", "square.txt")) == cfg.EXIT_ACCEPT
    assert capsys.readouterr().out.startswith("PAC decision: ACCEPT (template k2)")


def test_full_report_lists_every_peek(workspace, capsys):
    cmd.cmd_solve(solve_args("k2", "triangle.txt", fmt="lines", full_report=True))
    out = capsys.readouterr().out
    assert "peeks pass 0 fail 3 skipped 0 unexplored 0" in out


def test_solve_ac_and_brute_disagree_on_triangle(workspace, capsys):
    assert cmd.cmd_solve(solve_args("k2", "triangle.txt", method="ac")) == cfg.EXIT_ACCEPT
    assert cmd.cmd_solve(solve_args("k2", "triangle.txt", method="brute", fmt="lines")) == cfg.EXIT_REJECT
    out = capsys.readouterr().out
    assert "AC decision: ACCEPT" in out
    assert "decision reject\nmethod brute" in out


def test_brute_force_budget_gives_unknown(workspace, capsys):
    code = cmd.cmd_solve(solve_args("k2", "triangle.txt", method="brute", budget=1, fmt="lines"))
    assert code == cfg.EXIT_UNKNOWN
    assert capsys.readouterr().out.startswith("decision unknown")


def test_solve_cnf_with_two_sat(workspace):
    assert cmd.cmd_solve(solve_args("2sat", "unsat.cnf")) == cfg.EXIT_REJECT


def test_cnf_needs_two_sat_template(workspace, capsys):
    with pytest.raises(SystemExit) as excinfo:
        cmd.cmd_solve(solve_args("k2", "unsat.cnf"))
    assert excinfo.value.code == cfg.EXIT_ERROR
    assert "2sat" in capsys.readouterr().err


def test_set_constraint_methods(workspace, capsys):
    assert cmd.cmd_solve(solve_args("setcon", "gap.setcon", fmt="lines")) == cfg.EXIT_ACCEPT
    assert cmd.cmd_solve(solve_args("setcon", "gap.setcon", method="brute")) == cfg.EXIT_REJECT
    with pytest.raises(SystemExit) as excinfo:
        cmd.cmd_solve(solve_args("setcon", "gap.setcon", method="ac"))
    assert excinfo.value.code == cfg.EXIT_ERROR


def test_unknown_template_is_an_error(workspace, capsys):
    with pytest.raises(SystemExit) as excinfo:
        cmd.cmd_solve(solve_args("k3", "triangle.txt"))
    assert excinfo.value.code == cfg.EXIT_ERROR
    assert capsys.readouterr().err.startswith("Error: unknown template")


def test_structure_file_as_template(workspace):
    (workspace / "hexagon.txt").write_text(format_structure(cycle_graph(6)))
    assert cmd.cmd_solve(solve_args("hexagon.txt", "square.txt")) == cfg.EXIT_ACCEPT
    assert cmd.cmd_solve(solve_args("hexagon.txt", "triangle.txt")) == cfg.EXIT_REJECT


def test_main_reports_library_errors(workspace, capsys):
    with pytest.raises(SystemExit) as excinfo:
        peekac.main(["solve", "--template", "k2", "--instance", "broken.txt"])
    assert excinfo.value.code == cfg.EXIT_ERROR
    assert "Error: line 3" in capsys.readouterr().err
    with pytest.raises(SystemExit) as excinfo:
        peekac.main(["solve", "--template", "k2", "--instance", "square.txt", "--workers", "0"])
    assert excinfo.value.code == cfg.EXIT_ERROR


def test_main_exit_codes(workspace, capsys):
    with pytest.raises(SystemExit) as excinfo:
        peekac.main(["solve", "--template", "k2", "--instance", "triangle.txt", "--workers", "1"])
    assert excinfo.value.code == cfg.EXIT_REJECT
    with pytest.raises(SystemExit) as excinfo:
        peekac.main(["-v", "solve", "--template", "k2", "--instance", "square.txt", "--workers", "1"])
    assert excinfo.value.code == cfg.EXIT_ACCEPT
    with pytest.raises(SystemExit) as excinfo:
        peekac.main([])
    assert excinfo.value.code == cfg.EXIT_ERROR


def test_gen_writes_parseable_instances(workspace, capsys):
    for kind, parse in (("graph", parse_structure), ("2cnf", parse_cnf), ("pointalg", parse_structure), ("setcon", parse_setcon)):
        assert cmd.cmd_gen(gen_args(kind, 6)) == cfg.EXIT_ACCEPT
        first = capsys.readouterr().out
        cmd.cmd_gen(gen_args(kind, 6))
        assert capsys.readouterr().out == first
        parse(first)


def test_gen_to_file(workspace, capsys):
    cmd.cmd_gen(gen_args("2cnf", 5, clauses=7, output="out/f.cnf"))
    assert "Wrote 2cnf instance with 5 variables" in capsys.readouterr().out
    num_vars, clauses = parse_cnf((workspace / "out" / "f.cnf").read_text())
    assert (num_vars, len(clauses)) == (5, 7)


def test_gen_rejects_empty_size(workspace):
    with pytest.raises(SystemExit) as excinfo:
        cmd.cmd_gen(gen_args("graph", 0))
    assert excinfo.value.code == cfg.EXIT_ERROR


def test_bench_rows(workspace, capsys):
    assert cmd.cmd_bench(bench_args()) == cfg.EXIT_ACCEPT
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("bench template pointalg method pac size 4 workers 1 seconds ")
    assert out[1].startswith("bench template pointalg method pac size 8 workers 1 seconds ")
    assert out[2].startswith("ratio size 8/4 workers 1 x")
    assert all(row.endswith("decision accept") for row in out[:2])


def test_bench_other_templates_and_timeout(workspace, capsys):
    cmd.cmd_bench(bench_args(template="k2", sizes="5,10", workers_list="1,2", method="ac"))
    out = capsys.readouterr().out
    assert "method ac size 10 workers 2" in out
    assert "speedup size 5 workers 2/1" in out
    cmd.cmd_bench(bench_args(template="setcon", sizes="5,10", timeout=0.0))
    out = capsys.readouterr().out.splitlines()
    assert out[0].endswith("timeout")
    assert out[1] == "bench template setcon method pac size 10 workers 1 timeout"


def test_bench_validates_lists(workspace):
    with pytest.raises(SystemExit):
        cmd.cmd_bench(bench_args(sizes="0"))
    with pytest.raises(SystemExit):
        cmd.cmd_bench(bench_args(workers_list=""))


def test_characterize_lines(workspace, capsys):
    assert cmd.cmd_characterize(characterize_args("k2")) == cfg.EXIT_ACCEPT
    assert capsys.readouterr().out.splitlines() == ["template k2 ac n pac_n 1:y 2:y empirical y"]


def test_characterize_parity_prints_counterexample(workspace, capsys):
    cmd.cmd_characterize(characterize_args("parity", output="report.txt"))
    lines = (workspace / "report.txt").read_text().splitlines()
    assert lines[0] == "template parity ac n pac_n 1:y 2:n empirical n"
    assert lines[1] == "counterexample"
    assert lines[2].startswith("universe ")


def test_characterize_needs_small_finite_template(workspace):
    with pytest.raises(SystemExit):
        cmd.cmd_characterize(characterize_args("pointalg"))
    with pytest.raises(SystemExit):
        cmd.cmd_characterize(characterize_args("k2", cap_universe=1))


def test_orbits(workspace, capsys):
    assert cmd.cmd_orbits(argparse.Namespace(template="k2", orbit_cap=cfg.ORBIT_CAP)) == cfg.EXIT_ACCEPT
    assert capsys.readouterr().out == "orbit 0 1\n"
    cmd.cmd_orbits(argparse.Namespace(template="2sat", orbit_cap=cfg.ORBIT_CAP))
    assert capsys.readouterr().out == "orbit 0\norbit 1\n"
    cmd.cmd_orbits(argparse.Namespace(template="pointalg", orbit_cap=cfg.ORBIT_CAP))
    assert capsys.readouterr().out == "representative 0\n"
    (workspace / "path.txt").write_text(format_structure(graph_structure(9, [(i, i + 1) for i in range(8)])))
    with pytest.raises(SystemExit):
        cmd.cmd_orbits(argparse.Namespace(template="path.txt", orbit_cap=cfg.ORBIT_CAP))


def test_solve_output_is_identical_across_worker_counts(workspace, capsys):
    (workspace / "net.txt").write_text(format_structure(satisfiable_point_network(12, 1.5, 0.5, make_rng(2))))
    for template, instance in (("k2", "triangle.txt"), ("k2", "square.txt"), ("2sat", "unsat.cnf"), ("pointalg", "net.txt")):
        outputs = set()
        for workers in (1, 2, 8):
            for fmt in ("text", "lines"):
                cmd.cmd_solve(solve_args(template, instance, workers=workers, fmt=fmt, full_report=True))
            outputs.add(capsys.readouterr().out)
        assert len(outputs) == 1, (template, instance)


def test_solve_seed_shuffles_the_worklist(workspace, capsys, monkeypatch):
    seen = []
    real_run_ac = cmd.run_ac

    def recording_run_ac(*args, **kwargs):
        seen.append(kwargs.get("order_seed"))
        return real_run_ac(*args, **kwargs)

    monkeypatch.setattr(cmd, "run_ac", recording_run_ac)
    outputs = set()
    for seed in (None, 3, 4):
        args = solve_args("k2", "square.txt", method="ac")
        args.seed = seed
        cmd.cmd_solve(args)
        args = solve_args("k2", "triangle.txt", fmt="lines", full_report=True)
        args.seed = seed
        cmd.cmd_solve(args)
        outputs.add(capsys.readouterr().out)
    assert seen == [None, 3, 4]
    assert len(outputs) == 1
