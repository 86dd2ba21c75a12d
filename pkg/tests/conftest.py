"""Shared fixtures and the per-criterion PASS/FAIL summary."""

from __future__ import annotations

from collections import defaultdict

import pytest

# criterion number -> list of (part, passed, detail)
_RESULTS: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)

CRITERIA = {
    1: "finite-range exact locality (Thm 3.1)",
    2: "Remark 3.4 closed form (cnot_pair)",
    3: "Section 3.5.1 sharpness (zz_sets)",
    4: "Lemma 3.5 oracle equivalence",
    5: "inequality soundness sweeps",
    6: "conditional-expectation localization",
    7: "decay of correlations (Thm 4.1) + toric code",
    8: "LPPL (Thm 4.2)",
    9: "Section 4.3 stability",
    10: "Section 3.5.2 tail-sum lower bound",
    11: "determinism across thread counts",
}


class Recorder:
    def __init__(self, number: int):
        self.number = number

    def __call__(self, part: str, passed: bool, detail: str = "") -> bool:
        _RESULTS[self.number].append((part, bool(passed), detail))
        return bool(passed)


@pytest.fixture
def criterion(request):
    """``criterion(n)`` returns a recorder ``rec(part, passed, detail)``."""
    return Recorder


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        parts = _RESULTS.get(n)
        if not parts:
            tr.write_line(f"criterion {n:2d} NOT RUN  {title}")
            continue
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")
        for part, passed, detail in parts:
            tr.write_line(f"    [{'PASS' if passed else 'FAIL'}] {part}" + (f" - {detail}" if detail else ""))
