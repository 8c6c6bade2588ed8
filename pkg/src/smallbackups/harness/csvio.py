from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

HEADER = ("x", "mean", "stderr", "runs")


@dataclass(frozen=True)
class CurvePoint:
    x: float
    mean: float
    stderr: float
    runs: int

    @classmethod
    def from_samples(cls, x: float, samples: Sequence[float]) -> "CurvePoint":
        n = len(samples)
        mean = math.fsum(samples) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in samples) / (n - 1)
            se = math.sqrt(var / n)
        else:
            se = 0.0
        return cls(float(x), mean, se, n)


def _fmt(v: float) -> str:
    return format(v, ".12g")


def format_csv(points: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for p in points:
        writer.writerow((_fmt(p.x), _fmt(p.mean), _fmt(p.stderr), str(p.runs)))
    return buf.getvalue()


def emit_csv(points: Iterable[CurvePoint], path) -> Path:
    path = Path(path)
    path.write_text(format_csv(points), encoding="utf-8")
    return path


def read_csv(path) -> list[CurvePoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        return [CurvePoint(float(x), float(m), float(se), int(n)) for x, m, se, n in reader]
