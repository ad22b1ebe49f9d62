"""Normalised residual reports shared by every secant checker."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ResidualReport", "Accumulator"]


@dataclass
class ResidualReport:
    """Worst normalised residual over a sample set.

    ``max_residual`` and ``scale`` belong to the worst sample, i.e. the one that
    maximises ``residual / scale``.  A report passes when
    ``max_residual <= tol * scale``.
    """

    name: str
    max_residual: float
    scale: float
    tol: float
    samples: int
    worst: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    per_sample: list = field(default_factory=list, repr=False)

    @property
    def normalized(self) -> float:
        if self.scale == 0:
            return 0.0 if self.max_residual == 0 else math.inf
        return self.max_residual / self.scale

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol * self.scale

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "scale": self.scale,
            "normalized": self.normalized,
            "tolerance": self.tol,
            "samples": self.samples,
            "pass": self.passed,
            "worst": self.worst,
            "extra": self.extra,
        }

    def to_csv(self, header: bool = True) -> str:
        """One row per sample: ``name, index, residual, scale, normalized``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["name", "sample", "residual", "scale", "normalized"])
        for i, (r, s) in enumerate(self.per_sample):
            w.writerow([self.name, i, repr(r), repr(s), repr(_ratio(r, s))])
        return buf.getvalue()

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {flag} residual/scale = {self.normalized:.3e} (tol {self.tol:.1e}, n={self.samples})"


class Accumulator:
    """Collects ``(residual, scale, where)`` triples and keeps the worst."""

    def __init__(self, name: str, tol: float):
        self.name = name
        self.tol = tol
        self.n = 0
        self.best = None
        self.rows = []

    def add(self, residual: complex, terms, **where):
        """``terms`` are the monomials whose largest modulus sets the scale."""
        r = float(abs(residual))
        s = float(max(abs(complex(t)) for t in terms))
        self.add_scaled(r, s, **where)

    def add_scaled(self, r: float, s: float, **where):
        self.n += 1
        self.rows.append((r, s))
        ratio = _ratio(r, s)
        if self.best is None or ratio > self.best[0]:
            self.best = (ratio, r, s, where)

    def report(self, **extra) -> ResidualReport:
        if self.best is None:
            return ResidualReport(self.name, 0.0, 0.0, self.tol, 0, {}, extra)
        _, r, s, where = self.best
        return ResidualReport(self.name, r, s, self.tol, self.n, _jsonable(where), _jsonable(extra),
                              list(self.rows))


def _ratio(r: float, s: float) -> float:
    if s == 0:
        return math.inf if r > 0 else 0.0
    return r / s


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in np.asarray(obj, dtype=object).ravel().tolist()] \
            if isinstance(obj, np.ndarray) else [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
