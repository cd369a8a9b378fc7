"""Deterministic CSV/JSON serialization of experiment reports.

Floats are written with ``repr`` (shortest round-trip form), so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .bestx import AuditReport
from .harness import HEURISTICS, BanditReport, OfflineReport


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_offline_csv(report: OfflineReport, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(["instance_id", "clairvoyant", *[f"ratio_{h}" for h in HEURISTICS]])
        for row in report.rows:
            w.writerow(
                [row.instance_id, _fmt(row.clairvoyant)]
                + [_fmt(row.ratios[h]) for h in HEURISTICS]
            )


def write_offline_summary(report: OfflineReport, path: Union[str, Path]) -> None:
    edges = np.round(np.linspace(0.0, 1.0, 51), 4)
    payload = {
        "heuristics": report.summary(),
        "histogram_edges": [float(e) for e in edges],
        "histograms": {
            h: [int(c) for c in report.histogram(h, edges)] for h in HEURISTICS
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_bandit_csv(report: BanditReport, path: Union[str, Path]) -> None:
    """Per-round columns: round, mean, ub, lb, then h{k}_est / h{k}_optm errors."""
    ks = report.config.track_k
    mean = report.ratio_mean
    se = report.ratio_se
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        header = ["round", "mean", "ub", "lb"]
        for k in ks:
            header += [f"h{k}_est", f"h{k}_optm"]
        w.writerow(header)
        for t in range(report.config.T):
            row = [str(t + 1), _fmt(mean[t]), _fmt(mean[t] + se[t]), _fmt(mean[t] - se[t])]
            for k in ks:
                row += [
                    _fmt(report.h_est_err[k][:, t].mean()),
                    _fmt(report.h_opt_err[k][:, t].mean()),
                ]
            w.writerow(row)


def write_bandit_regret_csv(report: BanditReport, path: Union[str, Path]) -> None:
    regret_mean = report.regret.mean(axis=0)
    cum = report.cum_regret_mean
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(["round", "regret_mean", "cum_regret_mean"])
        for t in range(report.config.T):
            w.writerow([str(t + 1), _fmt(regret_mean[t]), _fmt(cum[t])])


def write_bandit_summary(report: BanditReport, path: Union[str, Path]) -> None:
    T = report.config.T
    payload = {
        "terminal_ratio_mean": float(report.ratio_mean[T - 1]),
        "coverage_min_after_100": float(report.coverage[:, 99:].mean(axis=0).min())
        if T >= 100
        else None,
        "cum_regret_over_T": float(report.cum_regret_mean[T - 1] / T),
        "h_star": [float(v) for v in report.h_star],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_audit_csv(report: AuditReport, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(["instance_id", "ratio_bestx", "ratio_filled", "clairvoyant"])
        for row in report.rows:
            w.writerow(
                [row.instance_id, _fmt(row.ratio_bestx), _fmt(row.ratio_filled), _fmt(row.clairvoyant)]
            )


def ranking_to_str(ranking: Sequence) -> str:
    return " ".join(str(pid) for pid in ranking)
