"""Shared fixtures over the synthetic artifact builders.

The whole directory skips when matplotlib or mmx_plots is not installed,
so the solver package's suite stays runnable without the plotting
component built.
"""

from __future__ import annotations

import json
import math

import pytest

pytest.importorskip("matplotlib")
pytest.importorskip("mmx_plots")

from _fixtures import TRACE_HEADER, make_report, make_spectral, trace_csv


@pytest.fixture
def trace_file(tmp_path):
    """Trace with audited rows every 2 steps and a monotone potential."""
    rows = []
    for t in range(0, 20, 2):
        gs = 0.5 * math.exp(-0.3 * t)
        rows.append((t, 0.1, 0.0, 1e-3, 1e-3, gs, gs / 2, 2 * gs, gs**2))
        rows.append((t + 1, 0.1, 0.0, 1e-3, 1e-3, None, None, None, None))
    path = tmp_path / "alpha.csv"
    path.write_text(trace_csv(rows), encoding="utf-8")
    return path


@pytest.fixture
def empty_trace_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(TRACE_HEADER + "\n", encoding="utf-8")
    return path


@pytest.fixture
def report_file(tmp_path):
    path = tmp_path / "report.json"
    path.write_text(json.dumps(make_report()), encoding="utf-8")
    return path


@pytest.fixture
def spectral_file(tmp_path):
    path = tmp_path / "spectral.json"
    path.write_text(json.dumps(make_spectral()), encoding="utf-8")
    return path
