"""
Text formats: relational structures, DIMACS-like 2-CNF and set-constraint files.
"""
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from peekac_setcon import SetConstraintInstance
from peekac_structures import Signature, Structure
from peekac_utils import ParseError, PeekacError

TOKEN = re.compile(r"^[A-Za-z0-9_]+$")

Clause = Tuple[int, int]


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _check_token(token: str, lineno: int) -> str:
    if not TOKEN.match(token):
        raise ParseError(f"invalid element id {token!r}", lineno)
    return token


def parse_structure(text: str) -> Structure:
    """Parse ``universe``/``relation`` blocks; element order is file order."""
    universe: Optional[List[str]] = None
    symbols: List[Tuple[str, int]] = []
    rows: Dict[str, List[Tuple[str, ...]]] = {}
    current: Optional[Tuple[str, int]] = None
    known = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "universe":
            if universe is not None:
                raise ParseError("universe declared twice", lineno)
            universe = [_check_token(t, lineno) for t in parts[1:]]
            if len(set(universe)) != len(universe):
                raise ParseError("duplicate element in universe", lineno)
            known = set(universe)
        elif head == "relation":
            if universe is None:
                raise ParseError("relation before universe", lineno)
            if len(parts) != 3:
                raise ParseError("expected 'relation <name> <arity>'", lineno)
            name = _check_token(parts[1], lineno)
            try:
                arity = int(parts[2])
            except ValueError:
                raise ParseError(f"arity {parts[2]!r} is not an integer", lineno)
            if arity < 1:
                raise ParseError("arity must be at least 1", lineno)
            if name in rows:
                raise ParseError(f"relation {name} declared twice", lineno)
            current = (name, arity)
            symbols.append(current)
            rows[name] = []
        else:
            if current is None:
                raise ParseError("tuple outside of a relation block", lineno)
            name, arity = current
            if len(parts) != arity:
                raise ParseError(f"{name} expects {arity} entries, got {len(parts)}", lineno)
            for token in parts:
                if token not in known:
                    raise ParseError(f"unknown element {token!r}", lineno)
            rows[name].append(tuple(parts))
    if universe is None:
        raise ParseError("missing universe line")
    return Structure.from_labels(Signature.of(symbols), universe, rows)


def format_structure(structure: Structure) -> str:
    lines = ["universe " + " ".join(str(label) for label in structure.universe)]
    for name, arity in structure.signature.symbols:
        lines.append(f"relation {name} {arity}")
        for t in structure.labelled_tuples(name):
            lines.append(" ".join(str(label) for label in t))
    return "\n".join(lines) + "\n"


def parse_cnf(text: str) -> Tuple[int, List[Clause]]:
    """Parse ``l1 l2 0`` clause lines with an optional ``p cnf <vars> <clauses>`` header."""
    declared: Optional[int] = None
    clauses: List[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                declared = int(parts[2])
            except ValueError:
                raise ParseError("variable count is not an integer", lineno)
            continue
        try:
            literals = [int(p) for p in parts]
        except ValueError:
            raise ParseError("literals must be integers", lineno)
        if literals[-1] != 0:
            raise ParseError("clause must end with 0", lineno)
        literals = literals[:-1]
        if len(literals) != 2 or 0 in literals:
            raise ParseError("every clause needs exactly two nonzero literals", lineno)
        if declared is not None and any(abs(l) > declared for l in literals):
            raise ParseError("literal exceeds the declared variable count", lineno)
        clauses.append((literals[0], literals[1]))
    count = declared if declared is not None else max((abs(l) for c in clauses for l in c), default=0)
    return count, clauses


def format_cnf(num_vars: int, clauses: Sequence[Clause]) -> str:
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines.extend(f"{a} {b} 0" for a, b in clauses)
    return "\n".join(lines) + "\n"


SETCON_KINDS = {"sub": "subset", "dis": "disjoint", "neq": "distinct"}


def parse_setcon(text: str) -> SetConstraintInstance:
    variables: Optional[List[str]] = None
    pairs: Dict[str, List[Tuple[str, str]]] = {kind: [] for kind in SETCON_KINDS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vars":
            if variables is not None:
                raise ParseError("vars declared twice", lineno)
            variables = [_check_token(t, lineno) for t in parts[1:]]
            continue
        if variables is None:
            raise ParseError("constraint before the vars header", lineno)
        if parts[0] not in SETCON_KINDS:
            raise ParseError(f"unknown constraint {parts[0]!r}", lineno)
        if len(parts) != 3:
            raise ParseError(f"'{parts[0]}' takes two variables", lineno)
        for v in parts[1:]:
            if v not in variables:
                raise ParseError(f"undeclared variable {v!r}", lineno)
        pairs[parts[0]].append((parts[1], parts[2]))
    if variables is None:
        raise ParseError("missing vars header")
    return SetConstraintInstance(
        tuple(variables), tuple(pairs["sub"]), tuple(pairs["dis"]), tuple(pairs["neq"])
    )


def format_setcon(instance: SetConstraintInstance) -> str:
    lines = ["vars " + " ".join(instance.variables)]
    for kind, attr in SETCON_KINDS.items():
        lines.extend(f"{kind} {x} {y}" for x, y in getattr(instance, attr))
    return "\n".join(lines) + "\n"


def read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PeekacError(f"cannot read {path}: {exc.strerror}")


def load_structure(path: Path) -> Structure:
    return parse_structure(read_text(path))


def load_cnf(path: Path) -> Tuple[int, List[Clause]]:
    return parse_cnf(read_text(path))


def load_setcon(path: Path) -> SetConstraintInstance:
    return parse_setcon(read_text(path))


def write_text(path: Path, content: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
