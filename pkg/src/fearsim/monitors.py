"""Overlay invariant monitors.

Monitors are pure functions over completed traces and comparison tables:
they never mutate what they observe, so attaching them cannot perturb a
run.  Each invariant is a precondition/postcondition pair; a report says
whether the postcondition held everywhere the precondition armed, and a
``vacuous`` verdict records that the precondition never armed at all.

Built-in invariants:

* Inv1A  - whenever the gap is very small, fear is High or VeryHigh.
* Inv1B  - while the gap strictly shrinks (bullet not slowing), the fear
           display never drops.
* Inv2   - on successful rear-end rows, the agent's stopping distance is
           smaller than the human's.
* Inv3   - same dominance for overtaking distances.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .emotion import FearLevel
from .sim import Trace

__all__ = [
    "Verdict",
    "InvariantSpec",
    "InvariantReport",
    "TRACE_INVARIANT_IDS",
    "COMPARISON_INVARIANT_IDS",
    "default_trace_specs",
    "default_comparison_specs",
    "check_trace_invariants",
    "check_comparison_invariants",
    "reports_to_csv",
    "summarize_reports",
]

TRACE_INVARIANT_IDS = ("Inv1A", "Inv1B")
COMPARISON_INVARIANT_IDS = ("Inv2", "Inv3")

DEFAULT_VERY_SMALL_GAP = 3.0  # sim units


class Verdict(enum.Enum):
    PASS = "pass"
    VIOLATED = "violated"
    VACUOUS = "vacuous"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class InvariantSpec:
    id: str
    description: str
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InvariantReport:
    invariant_id: str
    verdict: Verdict
    evidence: tuple[tuple[int, str], ...]   # (tick or row index, observation)
    parameters: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.VIOLATED


def default_trace_specs(very_small_gap: float = DEFAULT_VERY_SMALL_GAP) -> list[InvariantSpec]:
    return [
        InvariantSpec(
            id="Inv1A",
            description="gap below the very-small threshold implies High or VeryHigh fear",
            parameters={"very_small_gap": very_small_gap},
        ),
        InvariantSpec(
            id="Inv1B",
            description="fear display non-decreasing over strictly-closing windows",
            parameters={},
        ),
    ]


def default_comparison_specs() -> list[InvariantSpec]:
    return [
        InvariantSpec(id="Inv2", description="agent stopping distance below human, per successful rear-end row"),
        InvariantSpec(id="Inv3", description="agent overtaking distance below human, per successful overtaking row"),
    ]


def check_trace_invariants(trace: Trace, specs: list[InvariantSpec] | None = None) -> list[InvariantReport]:
    """Evaluate trace invariants; unknown invariant ids raise ValueError."""
    if specs is None:
        specs = default_trace_specs()
    reports = []
    for spec in specs:
        if spec.id == "Inv1A":
            reports.append(_check_inv1a(trace, spec))
        elif spec.id == "Inv1B":
            reports.append(_check_inv1b(trace, spec))
        else:
            raise ValueError(f"unknown trace invariant {spec.id!r}")
    return reports


def _check_inv1a(trace: Trace, spec: InvariantSpec) -> InvariantReport:
    threshold = float(spec.parameters.get("very_small_gap", DEFAULT_VERY_SMALL_GAP))
    armed = False
    evidence = []
    for r in trace.records:
        if r.distance < threshold:
            armed = True
            if r.fear_level not in (FearLevel.HIGH, FearLevel.VERY_HIGH):
                evidence.append((r.tick, f"gap={r.distance:.4f} fear={r.fear_level}({r.fear_display})"))
    verdict = Verdict.VIOLATED if evidence else (Verdict.PASS if armed else Verdict.VACUOUS)
    return InvariantReport("Inv1A", verdict, tuple(evidence), {"very_small_gap": threshold})


def _closing_windows(trace: Trace) -> list[tuple[int, int]]:
    """Maximal index windows with strictly decreasing gap and non-decreasing bullet speed."""
    rs = trace.records
    windows = []
    start = None
    for i in range(1, len(rs)):
        closing = rs[i].distance < rs[i - 1].distance and rs[i].bullet_speed >= rs[i - 1].bullet_speed
        if closing and start is None:
            start = i - 1
        elif not closing and start is not None:
            windows.append((start, i - 1))
            start = None
    if start is not None:
        windows.append((start, len(rs) - 1))
    return windows


def _check_inv1b(trace: Trace, spec: InvariantSpec) -> InvariantReport:
    windows = _closing_windows(trace)
    evidence = []
    for lo, hi in windows:
        for i in range(lo + 1, hi + 1):
            prev, cur = trace.records[i - 1], trace.records[i]
            if cur.fear_display < prev.fear_display:
                evidence.append((cur.tick, f"display {prev.fear_display}->{cur.fear_display} while gap "
                                           f"{prev.distance:.4f}->{cur.distance:.4f}"))
    verdict = Verdict.VIOLATED if evidence else (Verdict.PASS if windows else Verdict.VACUOUS)
    return InvariantReport("Inv1B", verdict, tuple(evidence), {"windows": len(windows)})


def check_comparison_invariants(table, specs: list[InvariantSpec] | None = None) -> list[InvariantReport]:
    """Evaluate row-wise dominance invariants on a comparison table.

    Inv2 covers rear_end rows, Inv3 overtaking rows; rows whose success
    flag is false are outside the precondition.
    """
    if specs is None:
        specs = default_comparison_specs()
    kind_of = {"Inv2": "rear_end", "Inv3": "overtaking"}
    reports = []
    for spec in specs:
        if spec.id not in kind_of:
            raise ValueError(f"unknown comparison invariant {spec.id!r}")
        kind = kind_of[spec.id]
        armed = False
        evidence = []
        for idx, row in enumerate(table.rows):
            if row.kind != kind or not row.success:
                continue
            armed = True
            if not row.agent_ft < row.human_ft:
                evidence.append((idx, f"speed={row.speed_mph} agent={row.agent_ft:.3f} human={row.human_ft:.3f}"))
        verdict = Verdict.VIOLATED if evidence else (Verdict.PASS if armed else Verdict.VACUOUS)
        reports.append(InvariantReport(spec.id, verdict, tuple(evidence)))
    return reports


def reports_to_csv(reports: list[InvariantReport]) -> str:
    lines = ["invariant,verdict,evidence_count,first_evidence"]
    for rep in reports:
        first = rep.evidence[0] if rep.evidence else ""
        first_text = f"tick {first[0]}: {first[1]}" if first else ""
        lines.append(f'{rep.invariant_id},{rep.verdict},{len(rep.evidence)},"{first_text}"')
    return "\n".join(lines) + "\n"


def summarize_reports(reports: list[InvariantReport]) -> str:
    lines = []
    for rep in reports:
        lines.append(f"{rep.invariant_id}: {rep.verdict}")
        for idx, obs in rep.evidence[:5]:
            lines.append(f"  at {idx}: {obs}")
        if len(rep.evidence) > 5:
            lines.append(f"  ... {len(rep.evidence) - 5} more")
    return "\n".join(lines)
