"""
Result types shared by the engines, the meta checks and the CLI.
"""
from dataclasses import dataclass, field
from typing import Hashable, List, Optional, Tuple

import peekac_config as cfg
from peekac_structures import Structure
from peekac_utils import PeekacError, yn

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
UNEXPLORED = "unexplored"

ACCEPT = "accept"
REJECT = "reject"


@dataclass(frozen=True)
class ShrinkEvent:
    constraint: int
    position: int
    old: int
    new: int


@dataclass(frozen=True)
class PropagationOutcome:
    status: str
    domains: Tuple[int, ...]
    trace: Optional[Tuple[ShrinkEvent, ...]] = None
    revisions: int = 0

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT


@dataclass(frozen=True)
class PeekResult:
    representative: Hashable
    outcome: str
    trace: Optional[Tuple[ShrinkEvent, ...]] = None


@dataclass(frozen=True)
class VariablePeeks:
    variable: Hashable
    results: Tuple[PeekResult, ...]

    @property
    def passed(self) -> bool:
        return any(r.outcome == PASS for r in self.results)

    @property
    def failed_all(self) -> bool:
        """Vacuously true for a template without representatives."""
        return all(r.outcome == FAIL for r in self.results)

    @property
    def explored(self) -> bool:
        return any(r.outcome in (PASS, FAIL) for r in self.results)


@dataclass(frozen=True)
class PeekReport:
    template: str
    variables: Tuple[VariablePeeks, ...]
    decision: str
    rejecting_variable: Optional[Hashable] = None

    @property
    def accepted(self) -> bool:
        return self.decision == ACCEPT

    def counts(self) -> dict:
        counts = {PASS: 0, FAIL: 0, SKIPPED: 0, UNEXPLORED: 0}
        for peeks in self.variables:
            for r in peeks.results:
                counts[r.outcome] += 1
        return counts

    def summary_lines(self) -> List[str]:
        counts = self.counts()
        lines = [
            f"decision {self.decision}",
            f"template {self.template}",
            f"peeks pass {counts[PASS]} fail {counts[FAIL]} skipped {counts[SKIPPED]} unexplored {counts[UNEXPLORED]}",
        ]
        if self.rejecting_variable is not None:
            lines.append(f"rejecting_variable {self.rejecting_variable}")
        for peeks in self.variables:
            cells = " ".join(f"{r.representative}:{r.outcome}" for r in peeks.results)
            lines.append(f"variable {peeks.variable} {cells}".rstrip())
        return lines

    def render_text(self) -> str:
        counts = self.counts()
        out = [f"PAC decision: {self.decision.upper()} (template {self.template})"]
        if self.rejecting_variable is not None:
            out.append(f"Variable {self.rejecting_variable} fails for every representative.")
        out.append(
            f"Peeks: {counts[PASS]} passed, {counts[FAIL]} failed, "
            f"{counts[SKIPPED]} skipped, {counts[UNEXPLORED]} unexplored"
        )
        return "\n".join(out)


@dataclass(frozen=True)
class EmpiricalResult:
    max_vars: int
    max_tuples: int
    checked: int
    agreements: int
    counterexample: Optional[Structure] = None

    @property
    def decides(self) -> bool:
        return self.counterexample is None


@dataclass
class CharacterizationReport:
    template: str
    ac_solvable: bool
    pac_bounded: List[Tuple[int, bool]] = field(default_factory=list)
    empirical: Optional[EmpiricalResult] = None

    def to_line(self) -> str:
        parts = [f"template {self.template}", f"ac {yn(self.ac_solvable)}"]
        if self.pac_bounded:
            parts.append("pac_n " + " ".join(f"{n}:{yn(ok)}" for n, ok in self.pac_bounded))
        if self.empirical is not None:
            parts.append(f"empirical {yn(self.empirical.decides)}")
        return " ".join(parts)

    def render_text(self) -> str:
        out = [f"Template {self.template}"]
        out.append(f"  AC decides CSP: {'yes' if self.ac_solvable else 'no'} (homomorphism from the power structure)")
        for n, ok in self.pac_bounded:
            out.append(f"  Ind power n={n} maps to template: {'yes' if ok else 'no'}")
        if self.pac_bounded and all(ok for _, ok in self.pac_bounded):
            out.append(f"  PAC characterization holds up to n={self.pac_bounded[-1][0]} (bounded evidence)")
        elif self.pac_bounded:
            out.append("  PAC does not decide CSP (characterization fails)")
        if self.empirical is not None:
            e = self.empirical
            out.append(
                f"  Empirical: {e.agreements}/{e.checked} instances agree "
                f"(<= {e.max_vars} variables, <= {e.max_tuples} tuples)"
            )
            if e.counterexample is not None:
                out.append(
                    f"  Counterexample: {e.counterexample.size} elements, "
                    f"{e.counterexample.tuple_count()} tuples, PAC accepts but no homomorphism exists"
                )
        return "\n".join(out)


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation; ``workers=None`` means available parallelism."""

    command: str
    template: str
    instance: Optional[str] = None
    method: str = "pac"
    workers: Optional[int] = None
    seed: Optional[int] = None
    budget: int = cfg.HOM_SEARCH_BUDGET
    output_format: str = "text"
    full_report: bool = False

    def __post_init__(self):
        if self.workers is not None and self.workers < 1:
            raise PeekacError(f"--workers must be at least 1, got {self.workers}")
        if self.method not in cfg.METHODS:
            raise PeekacError(f"unknown method {self.method!r}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            command=args.command,
            template=args.template,
            instance=getattr(args, "instance", None),
            method=getattr(args, "method", "pac"),
            workers=getattr(args, "workers", None),
            seed=getattr(args, "seed", None),
            budget=getattr(args, "budget", cfg.HOM_SEARCH_BUDGET),
            output_format=getattr(args, "format", "text"),
            full_report=getattr(args, "full_report", False),
        )
