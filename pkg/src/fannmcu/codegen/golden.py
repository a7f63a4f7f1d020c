"""Golden-file freezing of emitter output."""

from __future__ import annotations

import difflib
import os

from ..errors import GoldenMismatch
from .emitter import GeneratedSource


def write_golden(src: GeneratedSource, golden_dir) -> None:
    src.write(golden_dir)


def golden_check(src: GeneratedSource, golden_dir) -> dict:
    """Compare every generated file byte for byte with ``golden_dir``.

    Returns ``{file name: "ok"}``; raises :class:`GoldenMismatch` carrying a
    unified diff over all differing files otherwise.
    """
    report, diffs = {}, []
    for fname in sorted(src.files):
        path = os.path.join(golden_dir, fname)
        new = src.files[fname]
        if os.path.exists(path):
            with open(path, encoding="utf-8", newline="") as f:
                old = f.read()
        else:
            old = ""
        if old == new and os.path.exists(path):
            report[fname] = "ok"
            continue
        report[fname] = "missing" if not os.path.exists(path) else "differs"
        diffs.extend(difflib.unified_diff(old.splitlines(keepends=True), new.splitlines(keepends=True),
                                          fromfile=f"golden/{fname}", tofile=f"generated/{fname}"))
    if diffs:
        bad = [f for f, state in report.items() if state != "ok"]
        raise GoldenMismatch(f"generated output differs from golden files: {', '.join(bad)}",
                             "".join(diffs))
    return report
