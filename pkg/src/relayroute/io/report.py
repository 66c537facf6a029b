"""Module to turn run reports into tables and write them as CSV or Excel."""

from __future__ import annotations

import sys

import pandas as pd

from relayroute.state import ComparisonReport, RunReport
from relayroute.sweep import SweepResult

FRAME_COLUMNS: tuple[str, ...] = (
    "frame_index",
    "total_energy_mj",
    "e_mr_mj",
    "e_rr_mj",
    "e_rb_mj",
    "slots_used",
    "slots_demanded",
    "carried_over_bits",
    "power_capped_links",
    "bits_sampled",
    "bits_served",
)

RUN_COLUMNS: tuple[str, ...] = (
    "algorithm",
    "mean_energy_per_frame_mj",
    "total_energy_mj",
    "frames",
    "power_capped_links",
    "unreachable",
    "capped_candidate_ms",
    "bits_sampled",
    "bits_served",
    "bits_queued",
    "demand_digest",
    "savings_percent",
)


def frames_table(report: RunReport) -> pd.DataFrame:
    """One row per frame; the per-frame series behind the mean."""
    return pd.DataFrame(
        [
            {
                "frame_index": f.frame_index,
                "total_energy_mj": f.total_energy_mj,
                "e_mr_mj": f.per_class_energy.e_mr_mj,
                "e_rr_mj": f.per_class_energy.e_rr_mj,
                "e_rb_mj": f.per_class_energy.e_rb_mj,
                "slots_used": f.slots_used,
                "slots_demanded": f.slots_demanded,
                "carried_over_bits": f.carried_over_bits,
                "power_capped_links": f.power_capped_links,
                "bits_sampled": f.bits_sampled,
                "bits_served": f.bits_served,
            }
            for f in report.frames
        ],
        columns=list(FRAME_COLUMNS),
    )


def _run_record(report: RunReport, savings: float | None) -> dict[str, object]:
    return {
        "algorithm": report.algorithm.value,
        "mean_energy_per_frame_mj": report.mean_energy_per_frame_mj,
        "total_energy_mj": report.total_energy_mj,
        "frames": len(report.frames),
        "power_capped_links": report.power_capped_links,
        "unreachable": report.unreachable_count,
        "capped_candidate_ms": report.capped_candidate_ms,
        "bits_sampled": report.bits_sampled,
        "bits_served": report.bits_served,
        "bits_queued": report.bits_queued,
        "demand_digest": report.demand_digest,
        "savings_percent": savings,
    }


def run_table(report: RunReport) -> pd.DataFrame:
    return pd.DataFrame([_run_record(report, None)], columns=list(RUN_COLUMNS))


def comparison_table(cmp: ComparisonReport) -> pd.DataFrame:
    """EBCD row (with the savings against the baseline) then the baseline row.

    Wall-clock timings are left out so equal inputs give byte-identical files.
    """
    return pd.DataFrame(
        [_run_record(cmp.ebcd, cmp.savings_percent), _run_record(cmp.baseline, 0.0)],
        columns=list(RUN_COLUMNS),
    )


def sweep_table(result: SweepResult) -> pd.DataFrame:
    return result.to_frame()


def to_csv_text(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, lineterminator="\n")


def write_table(df: pd.DataFrame, path: str | None) -> None:
    """CSV to `path` (stdout when None); a `.xlsx` path is written with openpyxl."""
    if path is None:
        sys.stdout.write(to_csv_text(df))
        return
    if path.lower().endswith(".xlsx"):
        df.to_excel(path, index=False, engine="openpyxl")
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        stream.write(to_csv_text(df))


def summary_text(rows: list[dict[str, object]]) -> str:
    """Percentage table: one line per scenario or axis value."""
    df = pd.DataFrame(rows)
    if "savings_percent" in df:
        df["savings_percent"] = df["savings_percent"].map(
            lambda v: "n/a" if pd.isna(v) else f"{v:.2f}%"
        )
    return df.to_string(index=False)
