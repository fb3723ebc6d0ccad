"""Mixed-integer model container and LP-format I/O.

A :class:`MilpModel` is a plain ordered container: variables with bounds
and a kind, named linear constraints, a minimization objective, and a
metadata dictionary (formulation tag, instance fingerprint, big-M).  The
LP writer emits CPLEX LP format with the metadata as a leading comment
line, and :func:`read_lp` parses that format back so a written model
round-trips to identical rows.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO, Union

import numpy as np

Number = Union[int, float]

CONTINUOUS = "continuous"
BINARY = "binary"
INTEGER = "integer"

_INF = float("inf")


class ModelError(ValueError):
    """Raised for malformed models or unparsable LP files."""


@dataclass
class Variable:
    name: str
    lo: Number = 0
    hi: Number = _INF
    kind: str = CONTINUOUS

    def __post_init__(self) -> None:
        if self.kind not in (CONTINUOUS, BINARY, INTEGER):
            raise ModelError(f"unknown variable kind {self.kind!r}")
        if self.lo > self.hi:
            raise ModelError(f"variable {self.name}: lo {self.lo} > hi {self.hi}")


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, Number]
    sense: str  # "<=", ">=", "="
    rhs: Number

    def __post_init__(self) -> None:
        if self.sense not in ("<=", ">=", "="):
            raise ModelError(f"constraint {self.name}: bad sense {self.sense!r}")
        if not self.coeffs:
            raise ModelError(f"constraint {self.name} has no terms")


@dataclass
class MilpModel:
    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, Number] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    # -- construction ------------------------------------------------------

    def add_var(self, name: str, lo: Number = 0, hi: Number = _INF,
                kind: str = CONTINUOUS) -> str:
        if name in self._index():
            raise ModelError(f"duplicate variable {name}")
        if kind == BINARY:
            lo, hi = max(lo, 0), min(hi, 1)
        self.variables.append(Variable(name, lo, hi, kind))
        self._by_name[name] = len(self.variables) - 1
        return name

    def add_constr(self, name: str, coeffs: dict[str, Number], sense: str,
                   rhs: Number) -> None:
        index = self._index()
        for var in coeffs:
            if var not in index:
                raise ModelError(f"constraint {name} uses undeclared variable {var}")
        live = {v: c for v, c in coeffs.items() if c != 0}
        if not live:
            raise ModelError(f"constraint {name} has no nonzero terms")
        self.constraints.append(Constraint(name, live, sense, rhs))

    def set_objective(self, coeffs: dict[str, Number]) -> None:
        index = self._index()
        for var in coeffs:
            if var not in index:
                raise ModelError(f"objective uses undeclared variable {var}")
        self.objective = dict(coeffs)

    def _index(self) -> dict[str, int]:
        by_name = getattr(self, "_by_name", None)
        if by_name is None or len(by_name) != len(self.variables):
            by_name = {v.name: i for i, v in enumerate(self.variables)}
            self._by_name = by_name
        return by_name

    def var_index(self, name: str) -> int:
        try:
            return self._index()[name]
        except KeyError:
            raise ModelError(f"unknown variable {name}") from None

    def integer_names(self) -> list[str]:
        return [v.name for v in self.variables if v.kind in (BINARY, INTEGER)]

    # -- engine interface --------------------------------------------------

    def relaxation_arrays(self):
        """Equality-form arrays for the LP engine.

        Returns (c, A, b, lo, hi, int_cols, col_names): inequality rows get
        one slack column each, appended after the structural variables.
        """
        ns = len(self.variables)
        nr = len(self.constraints)
        slacks = [i for i, con in enumerate(self.constraints) if con.sense != "="]
        n = ns + len(slacks)
        A = np.zeros((nr, n))
        b = np.zeros(nr)
        c = np.zeros(n)
        lo = np.zeros(n)
        hi = np.full(n, _INF)
        index = self._index()
        for i, v in enumerate(self.variables):
            lo[i], hi[i] = float(v.lo), float(v.hi)
        for name, coef in self.objective.items():
            c[index[name]] = float(coef)
        for s, i in enumerate(slacks):
            A[i, ns + s] = 1.0 if self.constraints[i].sense == "<=" else -1.0
        for i, con in enumerate(self.constraints):
            b[i] = float(con.rhs)
            for name, coef in con.coeffs.items():
                A[i, index[name]] = float(coef)
        int_cols = [index[nm] for nm in self.integer_names()]
        names = [v.name for v in self.variables] + [
            f"_slack{i}" for i in slacks
        ]
        return c, A, b, lo, hi, int_cols, names

    def constraint_violation(self, assignment: dict[str, Number]) -> float:
        """Largest absolute violation of rows and bounds at ``assignment``."""
        worst = 0.0
        for v in self.variables:
            x = float(assignment.get(v.name, 0))
            worst = max(worst, v.lo - x, x - v.hi)
        for con in self.constraints:
            lhs = sum(float(c) * float(assignment.get(nm, 0))
                      for nm, c in con.coeffs.items())
            gap = lhs - float(con.rhs)
            if con.sense == "<=":
                worst = max(worst, gap)
            elif con.sense == ">=":
                worst = max(worst, -gap)
            else:
                worst = max(worst, abs(gap))
        return worst


# ---------------------------------------------------------------------------
# LP format
# ---------------------------------------------------------------------------

def _fmt(value: Number) -> str:
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _terms(coeffs: dict[str, Number]) -> str:
    parts: list[str] = []
    for i, (name, coef) in enumerate(coeffs.items()):
        mag = _fmt(abs(coef))
        sign = "-" if coef < 0 else ("+" if i else "")
        parts.append(f"{sign} {mag} {name}".strip())
    return " ".join(parts)


def _wrap(text: str, width: int = 78, indent: str = "   ") -> Iterable[str]:
    line = ""
    for tok in text.split(" "):
        if line and len(line) + 1 + len(tok) > width:
            yield line
            line = indent + tok
        else:
            line = tok if not line else line + " " + tok
    if line:
        yield line


def write_lp(model: MilpModel, out: Union[str, TextIO]) -> None:
    """Write ``model`` in CPLEX LP format, metadata as a comment header."""
    close = False
    if isinstance(out, str):
        fh = open(out, "w")
        close = True
    else:
        fh = out
    try:
        meta = dict(model.metadata)
        meta.setdefault("v", 1)
        fh.write("\\ " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write(f"\\ model: {model.name}\n")
        fh.write("Minimize\n")
        for line in _wrap(" obj: " + _terms(model.objective), indent="     "):
            fh.write(line + "\n")
        fh.write("Subject To\n")
        for con in model.constraints:
            body = f" {con.name}: {_terms(con.coeffs)} {con.sense} {_fmt(con.rhs)}"
            for line in _wrap(body, indent="     "):
                fh.write(line + "\n")
        fh.write("Bounds\n")
        for v in model.variables:
            if v.lo == v.hi:
                fh.write(f" {v.name} = {_fmt(v.lo)}\n")
            elif v.hi == _INF:
                fh.write(f" {v.name} >= {_fmt(v.lo)}\n")
            else:
                fh.write(f" {_fmt(v.lo)} <= {v.name} <= {_fmt(v.hi)}\n")
        binaries = [v.name for v in model.variables if v.kind == BINARY]
        if binaries:
            fh.write("Binaries\n")
            for line in _wrap(" " + " ".join(binaries), indent="   "):
                fh.write(line + "\n")
        generals = [v.name for v in model.variables if v.kind == INTEGER]
        if generals:
            fh.write("Generals\n")
            for line in _wrap(" " + " ".join(generals), indent="   "):
                fh.write(line + "\n")
        fh.write("End\n")
    finally:
        if close:
            fh.close()


_NUM_RE = r"\d+(?:\.\d+)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?"
_TOKEN_RE = re.compile(
    rf"(?P<num>{_NUM_RE})|(?P<name>[A-Za-z_][A-Za-z0-9_\.\(\)\[\]]*)"
    r"|(?P<sense><=|>=|=<|=>|=)|(?P<op>[-+:])"
)

_SECTION_STARTS = {
    "minimize": "objective", "minimise": "objective", "min": "objective",
    "maximize": "max", "maximise": "max", "max": "max",
    "subject": "constraints", "st": "constraints", "s.t.": "constraints",
    "such": "constraints",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "binaries", "binary": "binaries", "bin": "binaries",
    "generals": "generals", "general": "generals", "gen": "generals",
    "end": "end",
}


def _parse_number(text: str) -> Number:
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_lp(path: Union[str, TextIO]) -> MilpModel:
    """Parse a CPLEX LP file produced by :func:`write_lp`."""
    close = False
    if isinstance(path, str):
        fh = open(path)
        close = True
    else:
        fh = path
    try:
        raw = fh.read()
    finally:
        if close:
            fh.close()

    metadata: dict = {}
    name = "model"
    lines = []
    seen_meta = False
    for ln in raw.splitlines():
        stripped = ln.strip()
        if stripped.startswith("\\"):
            body = stripped.lstrip("\\").strip()
            if not seen_meta and body.startswith("{"):
                try:
                    metadata = json.loads(body)
                    seen_meta = True
                except json.JSONDecodeError:
                    pass
            elif body.startswith("model:"):
                name = body.split(":", 1)[1].strip()
            continue
        lines.append(ln)

    # split into sections on keyword lines
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    i = 0
    while i < len(lines):
        ln = lines[i].strip()
        i += 1
        if not ln:
            continue
        head = ln.split()[0].rstrip(":").lower()
        sec = _SECTION_STARTS.get(head)
        if sec == "max":
            raise ModelError("only minimization models are supported")
        if sec is not None:
            current = sec
            rest = ln.split(None, 1)
            if head == "subject" and len(rest) > 1:
                rest = rest[1].split(None, 1)  # swallow the "To"
            if len(rest) > 1 and rest[1].strip():
                sections.setdefault(current, []).append(rest[1])
            continue
        if current is None:
            raise ModelError(f"unexpected text before first section: {ln!r}")
        sections.setdefault(current, []).append(ln)

    if "objective" not in sections or "constraints" not in sections:
        raise ModelError("LP file must contain objective and constraint sections")

    def tokens(text: str):
        for match in _TOKEN_RE.finditer(text):
            kind = match.lastgroup
            yield kind, match.group()

    def parse_expr(text: str):
        """name-prefixed linear expression -> (label, coeffs, sense, rhs)."""
        toks = list(tokens(text))
        label = None
        pos = 0
        if (len(toks) >= 2 and toks[0][0] == "name" and toks[1] == ("op", ":")):
            label = toks[0][1]
            pos = 2
        coeffs: dict[str, Number] = {}
        sense = None
        rhs: Number = 0
        sign = 1
        pending: Optional[Number] = None
        while pos < len(toks):
            kind, tok = toks[pos]
            pos += 1
            if kind == "op" and tok in "+-":
                sign = -1 if tok == "-" else 1
                continue
            if kind == "sense":
                sense = {"=<": "<=", "=>": ">="}.get(tok, tok)
                sign = 1
                continue
            if kind == "num":
                value = _parse_number(tok)
                if sense is not None:
                    rhs = sign * value
                    sign = 1
                elif pending is None:
                    pending = sign * value
                    sign = 1
                else:
                    raise ModelError(f"two consecutive numbers in {text!r}")
                continue
            if kind == "name":
                coef = pending if pending is not None else sign
                pending = None
                sign = 1
                coeffs[tok] = coeffs.get(tok, 0) + coef
                continue
            raise ModelError(f"unexpected token {tok!r} in {text!r}")
        if pending is not None and sense is None:
            raise ModelError(f"dangling number in {text!r}")
        return label, coeffs, sense, rhs

    # objective and constraints: statements end where the next label begins,
    # so just join each section and split on "name :" boundaries
    def statements(body_lines: list[str]):
        text = " ".join(body_lines)
        marks = [m.start() for m in re.finditer(
            r"[A-Za-z_][A-Za-z0-9_\.\(\)\[\]]*\s*:", text)]
        if not marks:
            yield text
            return
        if marks[0] > 0 and text[: marks[0]].strip():
            yield text[: marks[0]]
        for a, z in zip(marks, marks[1:] + [len(text)]):
            yield text[a:z]

    model = MilpModel(name=name, metadata=metadata)

    bound_specs: list[tuple] = []
    for ln in sections.get("bounds", []):
        if ln.strip().lower().endswith("free"):
            var = ln.split()[0]
            bound_specs.append((var, -_INF, _INF))
            continue
        toks = list(tokens(ln))
        nums = []
        for i, (k, t) in enumerate(toks):
            if k == "num":
                neg = i > 0 and toks[i - 1] == ("op", "-")
                nums.append((-_parse_number(t) if neg else _parse_number(t), i))
        names = [(t, i) for i, (k, t) in enumerate(toks) if k == "name"]
        senses = [i for i, (k, t) in enumerate(toks) if k == "sense"]
        if len(names) != 1:
            raise ModelError(f"cannot parse bound line {ln!r}")
        var = names[0][0]
        if len(nums) == 2 and len(senses) == 2:  # lo <= x <= hi
            bound_specs.append((var, float(nums[0][0]), float(nums[1][0])))
        elif len(nums) == 1 and len(senses) == 1:
            sense_tok = toks[senses[0]][1]
            sense_tok = {"=<": "<=", "=>": ">="}.get(sense_tok, sense_tok)
            value = float(nums[0][0])
            before = nums[0][1] < names[0][1]
            if sense_tok == "=":
                bound_specs.append((var, value, value))
            elif (sense_tok == ">=") != before:
                bound_specs.append((var, value, _INF))  # x >= lo / lo <= x
            else:
                bound_specs.append((var, 0.0, value))  # x <= hi / hi >= x
        else:
            raise ModelError(f"cannot parse bound line {ln!r}")

    bounds = {var: (lo, hi) for var, lo, hi in bound_specs}
    binaries = {t for k, t in tokens(" ".join(sections.get("binaries", [])))
                if k == "name"}
    generals = {t for k, t in tokens(" ".join(sections.get("generals", [])))
                if k == "name"}

    obj_stmts = list(statements(sections["objective"]))
    if len(obj_stmts) != 1:
        raise ModelError("objective must be a single expression")
    _, obj_coeffs, sense, _ = parse_expr(obj_stmts[0])
    if sense is not None:
        raise ModelError("objective cannot carry a relation")

    parsed_cons = []
    referenced: dict[str, None] = {}
    for stmt in statements(sections["constraints"]):
        if not stmt.strip():
            continue
        label, coeffs, sense, rhs = parse_expr(stmt)
        if sense is None:
            raise ModelError(f"constraint without relation: {stmt!r}")
        parsed_cons.append((label or f"c{len(parsed_cons)}", coeffs, sense, rhs))
        for nm in coeffs:
            referenced.setdefault(nm)
    for nm in obj_coeffs:
        referenced.setdefault(nm)

    # declaration order: bounds section order first (the writer lists every
    # variable there), then anything else in order of appearance
    declared: dict[str, None] = {}
    for var, _, _ in bound_specs:
        declared.setdefault(var)
    for nm in referenced:
        declared.setdefault(nm)
    for nm in sorted(binaries | generals):
        declared.setdefault(nm)

    for nm in declared:
        lo, hi = bounds.get(nm, (0.0, _INF))
        if nm in binaries:
            kind = BINARY
        elif nm in generals:
            kind = INTEGER
        else:
            kind = CONTINUOUS
        if kind == BINARY and nm not in bounds:
            lo, hi = 0, 1
        model.add_var(nm, lo, hi, kind)
    for label, coeffs, sense, rhs in parsed_cons:
        model.add_constr(label, coeffs, sense, rhs)
    model.set_objective(obj_coeffs)
    return model
