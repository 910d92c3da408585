"""Mamdani fuzzy inference on triangular membership functions.

The engine is deliberately small: triangular MFs only, min implication,
max aggregation, centroid defuzzification.  Rule bases are parsed from a
line-oriented text format (see :func:`parse_rules`) so the shipped rule
files stay inspectable and editable without touching code.

All constructed objects are immutable; evaluation is a pure function and
safe to call concurrently from multiple threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TriangularMF",
    "LinguisticVariable",
    "FuzzyRule",
    "RuleBase",
    "FuzzySet",
    "InferenceResult",
    "RuleParseError",
    "DegenerateSetError",
    "eval_trimf",
    "defuzzify_centroid",
    "evaluate",
    "parse_rules",
    "format_rules",
]

DEFAULT_RESOLUTION = 1001


class RuleParseError(ValueError):
    """Raised for any problem in a rule document, with source location."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DegenerateSetError(ValueError):
    """Raised when a fuzzy set carries no mass (all samples zero)."""


@dataclass(frozen=True)
class TriangularMF:
    """Triangular membership function with support [left, right] and apex at peak.

    A degenerate side (left == peak or peak == right) makes a shoulder:
    the membership is 1.0 exactly at that point and falls off linearly on
    the non-degenerate side.
    """

    left: float
    peak: float
    right: float

    def __post_init__(self):
        if not (self.left <= self.peak <= self.right):
            raise ValueError(
                f"triangle breakpoints must be ordered: {self.left}, {self.peak}, {self.right}"
            )

    def __call__(self, x: float) -> float:
        return eval_trimf(self, x)

    def sample(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised membership over an array of points."""
        out = np.zeros_like(xs, dtype=float)
        if self.peak > self.left:
            rising = (xs > self.left) & (xs <= self.peak)
            out[rising] = (xs[rising] - self.left) / (self.peak - self.left)
        if self.right > self.peak:
            falling = (xs > self.peak) & (xs < self.right)
            out[falling] = (self.right - xs[falling]) / (self.right - self.peak)
        out[xs == self.peak] = 1.0
        return out


def eval_trimf(mf: TriangularMF, x: float) -> float:
    """Membership degree of ``x`` under ``mf``; total on all reals."""
    if x == mf.peak:
        return 1.0
    if x <= mf.left or x >= mf.right:
        return 0.0
    if x < mf.peak:
        return (x - mf.left) / (mf.peak - mf.left)
    return (mf.right - x) / (mf.right - mf.peak)


@dataclass(frozen=True)
class LinguisticVariable:
    """A named variable over a closed real domain with ordered fuzzy terms."""

    name: str
    domain: tuple[float, float]
    terms: tuple[tuple[str, TriangularMF], ...]

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"{self.name}: empty domain [{lo}, {hi}]")
        tokens = [t for t, _ in self.terms]
        if len(set(tokens)) != len(tokens):
            raise ValueError(f"{self.name}: duplicate term tokens")
        peaks = [mf.peak for _, mf in self.terms]
        if peaks != sorted(peaks):
            raise ValueError(f"{self.name}: terms must be ordered by peak")
        for token, mf in self.terms:
            if mf.left < lo or mf.right > hi:
                raise ValueError(f"{self.name}.{token}: support exceeds domain")

    def term(self, token: str) -> TriangularMF:
        for t, mf in self.terms:
            if t == token:
                return mf
        raise KeyError(f"{self.name}: unknown term {token!r}")

    def has_term(self, token: str) -> bool:
        return any(t == token for t, _ in self.terms)

    def term_index(self, token: str) -> int:
        for i, (t, _) in enumerate(self.terms):
            if t == token:
                return i
        raise KeyError(f"{self.name}: unknown term {token!r}")

    def fuzzify(self, x: float) -> dict[str, float]:
        """Membership degree of a crisp value under every term."""
        return {token: eval_trimf(mf, x) for token, mf in self.terms}

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        return lo <= x <= hi


@dataclass(frozen=True)
class FuzzyRule:
    """IF <var> IS <term> [AND ...] THEN <var> IS <term>."""

    antecedents: tuple[tuple[str, str], ...]
    consequent: tuple[str, str]

    def antecedent_key(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.antecedents))


class FuzzySet:
    """A membership function sampled on a uniform grid over some domain."""

    def __init__(self, lo: float, hi: float, samples: np.ndarray):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("fuzzy set needs at least two samples")
        if samples.min() < 0.0 or samples.max() > 1.0:
            raise ValueError("membership degrees must lie in [0, 1]")
        self.lo = float(lo)
        self.hi = float(hi)
        self.samples = samples
        self.grid = np.linspace(self.lo, self.hi, samples.size)

    @property
    def resolution(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class InferenceResult:
    value: float
    degenerate: bool
    aggregate: FuzzySet | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RuleBase:
    """An immutable Mamdani system: input variables, one output, AND-rules."""

    name: str
    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rules: tuple[FuzzyRule, ...]
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        registry = {v.name: v for v in self.inputs}
        if self.output.name in registry:
            raise ValueError(f"output variable {self.output.name!r} shadows an input")
        seen: dict[tuple, int] = {}
        for i, rule in enumerate(self.rules):
            for var, term in rule.antecedents:
                if var not in registry:
                    raise ValueError(f"rule {i + 1}: unknown input variable {var!r}")
                if not registry[var].has_term(term):
                    raise ValueError(f"rule {i + 1}: unknown term {var}.{term}")
            cvar, cterm = rule.consequent
            if cvar != self.output.name:
                raise ValueError(f"rule {i + 1}: consequent variable must be {self.output.name!r}")
            if not self.output.has_term(cterm):
                raise ValueError(f"rule {i + 1}: unknown output term {cterm!r}")
            key = rule.antecedent_key()
            if key in seen:
                raise ValueError(f"rule {i + 1}: duplicate antecedent set (same as rule {seen[key]})")
            seen[key] = i + 1
        # Sampling grid and per-term output samples are pure functions of the
        # immutable fields; precompute once so evaluation stays cheap.
        lo, hi = self.output.domain
        grid = np.linspace(lo, hi, self.resolution)
        term_rows = np.vstack([mf.sample(grid) for _, mf in self.output.terms])
        centroids = (term_rows * grid).sum(axis=1) / term_rows.sum(axis=1)
        object.__setattr__(self, "_grid", grid)
        object.__setattr__(self, "_term_rows", term_rows)
        object.__setattr__(self, "_term_centroid", centroids)

    def evaluate_detailed(self, inputs: dict[str, float]) -> InferenceResult:
        """Run fuzzify / min-implication / max-aggregation / centroid.

        ``inputs`` must carry exactly one crisp value per input variable,
        inside that variable's domain.  When no rule fires the result is
        the midpoint of the output domain, flagged degenerate.
        """
        unknown = set(inputs) - {v.name for v in self.inputs}
        if unknown:
            raise ValueError(f"unexpected input variables: {sorted(unknown)}")
        memberships: dict[str, dict[str, float]] = {}
        for var in self.inputs:
            if var.name not in inputs:
                raise ValueError(f"missing input variable {var.name!r}")
            x = float(inputs[var.name])
            if not var.contains(x):
                lo, hi = var.domain
                raise ValueError(f"{var.name}={x} outside domain [{lo}, {hi}]")
            memberships[var.name] = var.fuzzify(x)

        # Strongest firing strength per consequent term; max-aggregation of
        # clipped identical terms collapses to a single clip at the max.
        strongest: dict[str, float] = {}
        for rule in self.rules:
            strength = min(memberships[var][term] for var, term in rule.antecedents)
            if strength <= 0.0:
                continue
            term = rule.consequent[1]
            if strength > strongest.get(term, 0.0):
                strongest[term] = strength

        lo, hi = self.output.domain
        if not strongest:
            return InferenceResult(value=(lo + hi) / 2.0, degenerate=True)

        aggregate = np.zeros(self.resolution)
        for term, strength in strongest.items():
            row = self._term_rows[self.output.term_index(term)]
            np.maximum(aggregate, np.minimum(row, strength), out=aggregate)
        fs = FuzzySet(lo, hi, aggregate)
        return InferenceResult(value=defuzzify_centroid(fs), degenerate=False, aggregate=fs)

    def evaluate(self, inputs: dict[str, float]) -> float:
        return self.evaluate_detailed(inputs).value


def evaluate(rulebase: RuleBase, inputs: dict[str, float]) -> float:
    """Crisp output of ``rulebase`` for one crisp value per input variable."""
    return rulebase.evaluate(inputs)


def evaluate_additive(rulebase: RuleBase, inputs: dict[str, float]) -> float:
    """Additive variant: product t-norm with center-average defuzzification.

    Each rule contributes its consequent term's centroid, weighted by the
    product of its antecedent memberships.  With strong input partitions
    this is an exact multilinear interpolation of the consequent table,
    so it is monotone whenever the rule table is monotone; clip/max
    inference is not (a middle consequent can fade against the strength
    cap without handing its mass to a neighbour).  The fear combination
    stage evaluates through this path.
    """
    unknown = set(inputs) - {v.name for v in rulebase.inputs}
    if unknown:
        raise ValueError(f"unexpected input variables: {sorted(unknown)}")
    memberships: dict[str, dict[str, float]] = {}
    for var in rulebase.inputs:
        if var.name not in inputs:
            raise ValueError(f"missing input variable {var.name!r}")
        x = float(inputs[var.name])
        if not var.contains(x):
            lo, hi = var.domain
            raise ValueError(f"{var.name}={x} outside domain [{lo}, {hi}]")
        memberships[var.name] = var.fuzzify(x)

    total_weight = 0.0
    total_moment = 0.0
    for rule in rulebase.rules:
        w = 1.0
        for var, term in rule.antecedents:
            w *= memberships[var][term]
            if w == 0.0:
                break
        if w == 0.0:
            continue
        idx = rulebase.output.term_index(rule.consequent[1])
        total_weight += w
        total_moment += w * float(rulebase._term_centroid[idx])
    lo, hi = rulebase.output.domain
    if total_weight == 0.0:
        return (lo + hi) / 2.0
    return total_moment / total_weight


def defuzzify_centroid(fs: FuzzySet) -> float:
    """Centroid sum(x*mu)/sum(mu) over the sample grid."""
    total = float(fs.samples.sum())
    if total == 0.0:
        raise DegenerateSetError("cannot defuzzify an all-zero set")
    return float((fs.grid * fs.samples).sum() / total)


# ---------------------------------------------------------------------------
# Rule document format
#
#   rulebase <name>
#   input <var> <lo> <hi>
#   output <var> <lo> <hi>
#   term <var> <token> <left> <peak> <right>
#   IF <var> IS <term> [AND <var> IS <term>]* THEN <var> IS <term>
#
# One statement per line.  '#' starts a comment.  Directive keywords are
# lowercase, rule keywords uppercase.  Declarations may appear in any order
# but must all precede the first rule line.
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\S+")


def _tokenize(line: str) -> list[tuple[str, int]]:
    """Tokens with 1-based column positions; comments stripped."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(line)]


def _parse_float(text: str, lineno: int, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise RuleParseError(f"expected a number, got {text!r}", lineno, col) from None


def parse_rules(text: str, resolution: int = DEFAULT_RESOLUTION) -> RuleBase:
    """Parse a self-contained rule document into a RuleBase.

    Raises :class:`RuleParseError` with line/column on syntax errors,
    references to unknown variables or terms, and duplicate antecedent sets.
    """
    name = "rulebase"
    var_kind: dict[str, str] = {}
    var_domain: dict[str, tuple[float, float]] = {}
    var_terms: dict[str, list[tuple[str, TriangularMF]]] = {}
    var_order: list[str] = []
    rules: list[FuzzyRule] = []
    seen_antecedents: dict[tuple, int] = {}
    rules_started = False

    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = _tokenize(raw)
        if not tokens:
            continue
        head, head_col = tokens[0]

        if head == "rulebase":
            if len(tokens) != 2:
                raise RuleParseError("expected: rulebase <name>", lineno, head_col)
            name = tokens[1][0]

        elif head in ("input", "output"):
            if rules_started:
                raise RuleParseError("declarations must precede rules", lineno, head_col)
            if len(tokens) != 4:
                raise RuleParseError(f"expected: {head} <var> <lo> <hi>", lineno, head_col)
            vname = tokens[1][0]
            if vname in var_kind:
                raise RuleParseError(f"variable {vname!r} already declared", lineno, tokens[1][1])
            lo = _parse_float(tokens[2][0], lineno, tokens[2][1])
            hi = _parse_float(tokens[3][0], lineno, tokens[3][1])
            var_kind[vname] = head
            var_domain[vname] = (lo, hi)
            var_terms[vname] = []
            var_order.append(vname)

        elif head == "term":
            if rules_started:
                raise RuleParseError("declarations must precede rules", lineno, head_col)
            if len(tokens) != 6:
                raise RuleParseError("expected: term <var> <token> <left> <peak> <right>", lineno, head_col)
            vname, vcol = tokens[1]
            if vname not in var_kind:
                raise RuleParseError(f"term for undeclared variable {vname!r}", lineno, vcol)
            token = tokens[2][0]
            if any(t == token for t, _ in var_terms[vname]):
                raise RuleParseError(f"duplicate term {vname}.{token}", lineno, tokens[2][1])
            a = _parse_float(tokens[3][0], lineno, tokens[3][1])
            b = _parse_float(tokens[4][0], lineno, tokens[4][1])
            c = _parse_float(tokens[5][0], lineno, tokens[5][1])
            try:
                mf = TriangularMF(a, b, c)
            except ValueError as exc:
                raise RuleParseError(str(exc), lineno, tokens[3][1]) from None
            var_terms[vname].append((token, mf))

        elif head == "IF":
            rules_started = True
            rule = _parse_rule_line(tokens, lineno, var_kind, var_terms)
            key = rule.antecedent_key()
            if key in seen_antecedents:
                raise RuleParseError(
                    f"duplicate antecedent set (same as rule on line {seen_antecedents[key]})",
                    lineno, head_col,
                )
            seen_antecedents[key] = lineno
            rules.append(rule)

        else:
            raise RuleParseError(f"unknown statement {head!r}", lineno, head_col)

    inputs = tuple(
        LinguisticVariable(v, var_domain[v], tuple(var_terms[v]))
        for v in var_order if var_kind[v] == "input"
    )
    outputs = [v for v in var_order if var_kind[v] == "output"]
    if not inputs or len(outputs) != 1:
        raise RuleParseError(
            f"need at least one input and exactly one output, got {len(inputs)} inputs / {len(outputs)} outputs",
            lineno if text else 1,
        )
    output = LinguisticVariable(outputs[0], var_domain[outputs[0]], tuple(var_terms[outputs[0]]))
    if not rules:
        raise RuleParseError("document contains no rules", lineno if text else 1)
    return RuleBase(name=name, inputs=inputs, output=output, rules=tuple(rules), resolution=resolution)


def _parse_rule_line(tokens, lineno, var_kind, var_terms) -> FuzzyRule:
    def expect(pos: int, keyword: str):
        if pos >= len(tokens) or tokens[pos][0] != keyword:
            got = tokens[pos][0] if pos < len(tokens) else "end of line"
            col = tokens[pos][1] if pos < len(tokens) else tokens[-1][1]
            raise RuleParseError(f"expected {keyword!r}, got {got!r}", lineno, col)

    def clause(pos: int, want_kind: str) -> tuple[tuple[str, str], int]:
        if pos + 2 >= len(tokens):
            raise RuleParseError("truncated rule", lineno, tokens[-1][1])
        vname, vcol = tokens[pos]
        if vname not in var_kind:
            raise RuleParseError(f"unknown variable {vname!r}", lineno, vcol)
        if var_kind[vname] != want_kind:
            raise RuleParseError(f"{vname!r} is not an {want_kind} variable", lineno, vcol)
        expect(pos + 1, "IS")
        term, tcol = tokens[pos + 2]
        if not any(t == term for t, _ in var_terms[vname]):
            raise RuleParseError(f"unknown term {vname}.{term}", lineno, tcol)
        return (vname, term), pos + 3

    antecedents = []
    first, pos = clause(1, "input")
    antecedents.append(first)
    while pos < len(tokens) and tokens[pos][0] == "AND":
        nxt, pos = clause(pos + 1, "input")
        antecedents.append(nxt)
    expect(pos, "THEN")
    consequent, pos = clause(pos + 1, "output")
    if pos != len(tokens):
        raise RuleParseError(f"trailing tokens after rule: {tokens[pos][0]!r}", lineno, tokens[pos][1])
    return FuzzyRule(antecedents=tuple(antecedents), consequent=consequent)


def format_rules(rulebase: RuleBase) -> str:
    """Serialize a RuleBase to the rule document format.

    ``parse_rules(format_rules(rb))`` reconstructs an equal rule base.
    """
    lines = [f"rulebase {rulebase.name}"]
    for var in rulebase.inputs:
        lines.append(f"input {var.name} {var.domain[0]:g} {var.domain[1]:g}")
    lines.append(f"output {rulebase.output.name} {rulebase.output.domain[0]:g} {rulebase.output.domain[1]:g}")
    for var in (*rulebase.inputs, rulebase.output):
        for token, mf in var.terms:
            lines.append(f"term {var.name} {token} {mf.left:g} {mf.peak:g} {mf.right:g}")
    for rule in rulebase.rules:
        parts = " AND ".join(f"{v} IS {t}" for v, t in rule.antecedents)
        cvar, cterm = rule.consequent
        lines.append(f"IF {parts} THEN {cvar} IS {cterm}")
    return "\n".join(lines) + "\n"
