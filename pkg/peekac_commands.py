"""
Command handlers for the peekac CLI.

Handlers print to stdout and return the process exit code; invalid input is
reported as ``Error: ...`` and exits with EXIT_ERROR.
"""
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import peekac_config as cfg
from peekac_ac import Template, TemplateDescriptor, run_ac
from peekac_homs import automorphism_orbits
from peekac_io import (
    format_cnf,
    format_setcon,
    format_structure,
    load_cnf,
    load_setcon,
    load_structure,
    write_text,
)
from peekac_meta import characterize
from peekac_models import RunConfig
from peekac_pac import PeekOptions, pac_decide
from peekac_setcon import SetConstraintInstance, random_setcon, set_constraint_oracle, set_constraint_pac
from peekac_structures import Structure
from peekac_templates import (
    builtin_template,
    cnf2_to_instance,
    is_builtin,
    random_2cnf,
    random_graph,
    random_point_network,
    satisfiable_point_network,
    template_oracle,
    two_sat_template,
)
from peekac_utils import CapExceeded, SearchBudgetExceeded, make_rng, normalize_int_list

logger = logging.getLogger(__name__)

SETCON = "setcon"


def fail(message: str):
    print(f"Error: {message}", file=sys.stderr)
    sys.exit(cfg.EXIT_ERROR)


def emit(lines: List[str], output: Optional[str] = None):
    text = "\n".join(lines) + "\n"
    if output:
        write_text(Path(output), text)
    else:
        sys.stdout.write(text)


def resolve_template(selector: str) -> Template:
    """A built-in name or the path of a structure file."""
    if is_builtin(selector) and selector != SETCON:
        return builtin_template(selector)
    path = Path(selector)
    if not path.exists():
        fail(f"unknown template {selector!r}; use one of {cfg.BUILTIN_TEMPLATES} or a structure file")
    return load_structure(path)


def load_instance(path: str, template: Template) -> Structure:
    if path.endswith(".cnf"):
        num_vars, clauses = load_cnf(Path(path))
        if not (isinstance(template, Structure) and template.signature == two_sat_template().signature):
            fail("CNF instances need the 2sat template")
        return cnf2_to_instance(clauses, num_vars)
    return load_structure(Path(path))


def decision_code(accept: bool) -> int:
    return cfg.EXIT_ACCEPT if accept else cfg.EXIT_REJECT


def _solve_setcon(config: RunConfig, instance: SetConstraintInstance) -> int:
    lines_mode = config.output_format == "lines"
    if config.method == "ac":
        fail("method ac is not available for set constraints; use pac or brute")
    if config.method == "pac":
        decision = set_constraint_pac(instance)
        word = "accept" if decision.accept else "reject"
        if lines_mode:
            out = [f"decision {word}", "method pac", f"template {SETCON}"]
            if decision.witness:
                out.append("witness " + " ".join(decision.witness))
        else:
            out = [f"PAC decision: {word.upper()} (template {SETCON})"]
            if decision.reason:
                out.append(f"Pattern: {decision.reason}")
        emit(out)
        return decision_code(decision.accept)
    try:
        satisfiable = set_constraint_oracle(instance, max_vars=len(instance.variables), budget=config.budget)
    except SearchBudgetExceeded as exc:
        return _unknown(config, str(exc))
    return _brute_output(config, satisfiable)


def _unknown(config: RunConfig, reason: str) -> int:
    if config.output_format == "lines":
        emit(["decision unknown", f"method {config.method}"])
    else:
        emit([f"Decision unknown: {reason}"])
    return cfg.EXIT_UNKNOWN


def _brute_output(config: RunConfig, satisfiable: bool) -> int:
    if config.output_format == "lines":
        emit([f"decision {'accept' if satisfiable else 'reject'}", "method brute", f"template {config.template}"])
    else:
        emit([f"Brute force: {'SATISFIABLE' if satisfiable else 'UNSATISFIABLE'} (template {config.template})"])
    return decision_code(satisfiable)


def cmd_solve(args) -> int:
    config = RunConfig.from_args(args)
    if config.template == SETCON:
        return _solve_setcon(config, load_setcon(Path(config.instance)))
    template = resolve_template(config.template)
    instance = load_instance(config.instance, template)

    if config.method == "ac":
        outcome = run_ac(instance, template, order_seed=config.seed)
        word = "accept" if outcome.consistent else "reject"
        if config.output_format == "lines":
            emit([f"decision {word}", "method ac", f"template {config.template}", f"revisions {outcome.revisions}"])
        else:
            emit([f"AC decision: {word.upper()} ({outcome.status}, template {config.template})"])
        return decision_code(outcome.consistent)

    if config.method == "pac":
        options = PeekOptions.full() if config.full_report else PeekOptions()
        options = replace(options, order_seed=config.seed)
        report = pac_decide(instance, template, workers=config.workers, options=options, name=config.template)
        if config.output_format == "lines":
            emit(report.summary_lines())
        else:
            emit([report.render_text()])
        return decision_code(report.accepted)

    try:
        satisfiable = template_oracle(instance, template, config.budget)
    except SearchBudgetExceeded as exc:
        return _unknown(config, str(exc))
    if satisfiable is None:
        fail(f"no brute-force oracle for template {config.template}")
    return _brute_output(config, satisfiable)


def generate(kind: str, size: int, rng, args) -> str:
    """Text of one random instance of ``kind`` with ``size`` variables."""
    if kind == "graph":
        return format_structure(random_graph(size, args.edge_prob, rng))
    if kind == "2cnf":
        clauses = args.clauses if args.clauses is not None else size
        if clauses < 0:
            fail("--clauses must be non-negative")
        return format_cnf(size, random_2cnf(size, clauses, rng))
    if kind == "pointalg":
        return format_structure(random_point_network(size, args.le_density, args.ne_density, rng))
    if kind == "setcon":
        return format_setcon(random_setcon(size, args.density, rng))
    fail(f"unknown instance kind {kind!r}; use one of {cfg.GEN_KINDS}")


def cmd_gen(args) -> int:
    if args.size < 1:
        fail("size must be at least 1")
    text = generate(args.kind, args.size, make_rng(args.seed), args)
    if args.output:
        write_text(Path(args.output), text)
        print(f"Wrote {args.kind} instance with {args.size} variables to {args.output}")
    else:
        sys.stdout.write(text)
    return cfg.EXIT_ACCEPT


def bench_instance(selector: str, template: Optional[Template], size: int, rng, args):
    """Point-algebra networks are planted satisfiable, so PAC peeks every variable."""
    if selector == SETCON:
        return random_setcon(size, args.density, rng)
    if isinstance(template, TemplateDescriptor):
        return satisfiable_point_network(size, args.le_density, args.ne_density, rng)
    if selector == "2sat":
        return cnf2_to_instance(random_2cnf(size, args.clauses or size, rng), size)
    return random_graph(size, args.edge_prob, rng)


def _timed(selector: str, template, instance, method: str, workers: int):
    start = time.perf_counter()
    if selector == SETCON:
        accepted = set_constraint_pac(instance).accept
    elif method == "ac":
        accepted = run_ac(instance, template).consistent
    else:
        accepted = pac_decide(instance, template, workers=workers).accepted
    return time.perf_counter() - start, accepted


def cmd_bench(args) -> int:
    """Wall-clock per (size, workers) with doubling ratios and speedups."""
    sizes = normalize_int_list(args.sizes)
    workers_list = normalize_int_list(args.workers_list)
    if not sizes or any(s < 1 for s in sizes):
        fail("--sizes needs positive integers")
    if not workers_list or any(w < 1 for w in workers_list):
        fail("--workers-list needs positive integers")
    template = None if args.template == SETCON else resolve_template(args.template)
    rng = make_rng(args.seed)
    instances = {size: bench_instance(args.template, template, size, rng, args) for size in sizes}

    timings = {}
    timed_out = set()
    rows = []
    for workers in workers_list:
        for size in sizes:
            if workers in timed_out:
                rows.append(f"bench template {args.template} method {args.method} size {size} workers {workers} timeout")
                continue
            seconds, accepted = _timed(args.template, template, instances[size], args.method, workers)
            timings[(size, workers)] = seconds
            status = "accept" if accepted else "reject"
            if seconds > args.timeout:
                timed_out.add(workers)
                status += " timeout"
            rows.append(
                f"bench template {args.template} method {args.method} size {size} workers {workers} "
                f"seconds {seconds:.4f} decision {status}"
            )
    for workers in workers_list:
        for small, large in zip(sizes, sizes[1:]):
            if (small, workers) in timings and (large, workers) in timings and timings[(small, workers)] > 0:
                ratio = timings[(large, workers)] / timings[(small, workers)]
                rows.append(f"ratio size {large}/{small} workers {workers} x{ratio:.2f}")
    base = workers_list[0]
    for size in sizes:
        for workers in workers_list[1:]:
            if (size, base) in timings and (size, workers) in timings and timings[(size, workers)] > 0:
                speedup = timings[(size, base)] / timings[(size, workers)]
                rows.append(f"speedup size {size} workers {workers}/{base} x{speedup:.2f}")
    emit(rows, args.output)
    return cfg.EXIT_ACCEPT


def cmd_characterize(args) -> int:
    template = resolve_template(args.template)
    if not isinstance(template, Structure):
        fail("characterization needs a finite template")
    if template.size > args.cap_universe:
        fail(f"template has {template.size} elements, above --cap-universe {args.cap_universe}")
    report = characterize(
        template, args.template, n_max=args.nmax, max_vars=args.max_vars, max_tuples=args.max_tuples,
        shrink=not args.no_shrink, max_universe=args.cap_universe,
    )
    if args.format == "lines":
        lines = [report.to_line()]
        if report.empirical is not None and report.empirical.counterexample is not None:
            lines.append("counterexample")
            lines.extend(format_structure(report.empirical.counterexample).splitlines())
    else:
        lines = [report.render_text()]
    emit(lines, args.output)
    return cfg.EXIT_ACCEPT


def cmd_orbits(args) -> int:
    template = resolve_template(args.template)
    if isinstance(template, TemplateDescriptor):
        emit([f"representative {rep}" for rep in template.representatives()])
        return cfg.EXIT_ACCEPT
    try:
        orbits = automorphism_orbits(template, cap=args.orbit_cap)
    except CapExceeded as exc:
        fail(str(exc))
    emit(["orbit " + " ".join(str(template.label_of(e)) for e in orbit) for orbit in orbits])
    return cfg.EXIT_ACCEPT
