"""Invariant monitors: verdicts, evidence, and non-interference."""

import pytest

from fearsim.emotion import FearLevel
from fearsim.experiments import ComparisonRow, ComparisonTable
from fearsim.monitors import (
    Verdict,
    check_comparison_invariants,
    check_trace_invariants,
    default_trace_specs,
    reports_to_csv,
    summarize_reports,
)
from fearsim.sim import ScenarioConfig, TickRecord, Trace, run_scenario, trace_to_csv

LEVEL_DISPLAY = {
    FearLevel.VERY_LOW: 6,
    FearLevel.LOW: 26,
    FearLevel.MEDIUM: 49,
    FearLevel.HIGH: 66,
    FearLevel.VERY_HIGH: 76,
}


def synthetic_trace(rows):
    """rows: (gap, level) or (gap, level, bullet_speed) tuples."""
    records = []
    for tick, row in enumerate(rows):
        gap, level, *rest = row
        speed = rest[0] if rest else 10.0
        records.append(TickRecord(
            tick=tick, ssd=0.16, distance=gap,
            fear_display=LEVEL_DISPLAY[level], fear_level=level,
            bullet_speed=speed, target_speed=10.0,
        ))
    return Trace(config=ScenarioConfig(), records=tuple(records))


# ---------------------------------------------------------------------------
# Inv1A
# ---------------------------------------------------------------------------

def test_inv1a_passes_when_close_gap_is_feared():
    trace = synthetic_trace([(2.9, FearLevel.HIGH), (2.5, FearLevel.VERY_HIGH)])
    report = check_trace_invariants(trace)[0]
    assert report.invariant_id == "Inv1A"
    assert report.verdict is Verdict.PASS
    assert report.evidence == ()


def test_inv1a_flags_low_fear_at_tiny_gap():
    trace = synthetic_trace([
        (5.0, FearLevel.MEDIUM),
        (0.5, FearLevel.VERY_LOW),   # violating tick 1
        (2.0, FearLevel.HIGH),
    ])
    report = check_trace_invariants(trace)[0]
    assert report.verdict is Verdict.VIOLATED
    assert [tick for tick, _ in report.evidence] == [1]


def test_inv1a_vacuous_when_gap_never_small():
    trace = synthetic_trace([(5.0, FearLevel.LOW), (9.0, FearLevel.VERY_LOW)])
    report = check_trace_invariants(trace)[0]
    assert report.verdict is Verdict.VACUOUS


def test_inv1a_threshold_is_configurable_and_recorded():
    trace = synthetic_trace([(5.0, FearLevel.LOW)])
    report = check_trace_invariants(trace, default_trace_specs(very_small_gap=6.0))[0]
    assert report.verdict is Verdict.VIOLATED
    assert report.parameters["very_small_gap"] == 6.0


# ---------------------------------------------------------------------------
# Inv1B
# ---------------------------------------------------------------------------

def test_inv1b_passes_on_monotone_closing_witness():
    trace = synthetic_trace([
        (10.0, FearLevel.LOW),
        (9.0, FearLevel.LOW),
        (8.0, FearLevel.MEDIUM),
        (7.0, FearLevel.HIGH),
        (6.0, FearLevel.VERY_HIGH),
    ])
    report = check_trace_invariants(trace)[1]
    assert report.invariant_id == "Inv1B"
    assert report.verdict is Verdict.PASS


def test_inv1b_flags_display_drop_while_closing():
    trace = synthetic_trace([
        (10.0, FearLevel.MEDIUM),
        (9.0, FearLevel.HIGH),
        (8.0, FearLevel.LOW),     # drop at tick 2 inside a closing window
        (7.0, FearLevel.HIGH),
    ])
    report = check_trace_invariants(trace)[1]
    assert report.verdict is Verdict.VIOLATED
    assert [tick for tick, _ in report.evidence] == [2]


def test_inv1b_ignores_drops_while_gap_opens():
    trace = synthetic_trace([
        (5.0, FearLevel.HIGH),
        (6.0, FearLevel.MEDIUM),
        (7.0, FearLevel.LOW),
    ])
    report = check_trace_invariants(trace)[1]
    assert report.verdict is Verdict.VACUOUS


def test_inv1b_window_requires_non_decreasing_speed():
    # gap closes but the bullet is braking; the precondition never arms
    trace = synthetic_trace([
        (10.0, FearLevel.HIGH, 20.0),
        (9.0, FearLevel.MEDIUM, 19.0),
        (8.0, FearLevel.LOW, 18.0),
    ])
    report = check_trace_invariants(trace)[1]
    assert report.verdict is Verdict.VACUOUS


def test_unknown_invariant_id_rejected():
    from fearsim.monitors import InvariantSpec

    trace = synthetic_trace([(5.0, FearLevel.LOW)])
    with pytest.raises(ValueError, match="unknown trace invariant"):
        check_trace_invariants(trace, [InvariantSpec(id="Inv9", description="")])


# ---------------------------------------------------------------------------
# comparison invariants
# ---------------------------------------------------------------------------

def comparison_table(rows):
    return ComparisonTable(tuple(
        ComparisonRow(speed, agent, human, kind, success, agent, human)
        for speed, agent, human, kind, success in rows
    ))


def test_inv2_passes_on_dominant_agent():
    table = comparison_table([(15.0, 31.73, 105.57, "rear_end", True)])
    reports = check_comparison_invariants(table)
    assert reports[0].invariant_id == "Inv2"
    assert reports[0].verdict is Verdict.PASS
    assert reports[1].verdict is Verdict.VACUOUS


def test_inv3_passes_on_dominant_agent():
    table = comparison_table([(25.0, 63.408, 85.0, "overtaking", True)])
    reports = check_comparison_invariants(table)
    assert reports[1].invariant_id == "Inv3"
    assert reports[1].verdict is Verdict.PASS


def test_inv2_flags_row_where_agent_needs_more():
    table = comparison_table([
        (15.0, 31.73, 105.57, "rear_end", True),
        (20.0, 120.0, 119.0, "rear_end", True),
    ])
    report = check_comparison_invariants(table)[0]
    assert report.verdict is Verdict.VIOLATED
    assert [idx for idx, _ in report.evidence] == [1]


def test_unsuccessful_rows_do_not_arm_the_invariant():
    table = comparison_table([(15.0, 200.0, 100.0, "rear_end", False)])
    report = check_comparison_invariants(table)[0]
    assert report.verdict is Verdict.VACUOUS


def test_empty_table_is_vacuous():
    reports = check_comparison_invariants(ComparisonTable(()))
    assert all(rep.verdict is Verdict.VACUOUS for rep in reports)


# ---------------------------------------------------------------------------
# overlay non-interference and reporting
# ---------------------------------------------------------------------------

def test_monitors_do_not_perturb_the_run():
    config = ScenarioConfig(ticks=150, separation=2.0)
    bare = trace_to_csv(run_scenario(config))
    monitored = run_scenario(config)
    check_trace_invariants(monitored)
    assert trace_to_csv(monitored) == bare


def test_report_csv_shape():
    trace = synthetic_trace([(0.5, FearLevel.VERY_LOW)])
    text = reports_to_csv(check_trace_invariants(trace))
    lines = text.splitlines()
    assert lines[0] == "invariant,verdict,evidence_count,first_evidence"
    assert lines[1].startswith("Inv1A,violated,1,")


def test_summary_mentions_each_invariant():
    trace = synthetic_trace([(0.5, FearLevel.VERY_LOW)])
    summary = summarize_reports(check_trace_invariants(trace))
    assert "Inv1A: violated" in summary
    assert "Inv1B:" in summary
