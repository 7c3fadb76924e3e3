"""Identity verification results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .scalar import Backend, format_scalar

# float pass threshold on the relative residual
FLOAT_TOL = 1e-9


@dataclass
class IdentityReport:
    name: str
    grid: int
    max_residual: Any
    passed: bool
    witness: Optional[Dict[str, Any]] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        d = {
            "name": self.name,
            "grid": self.grid,
            "max_residual": format_scalar(self.max_residual),
            "pass": self.passed,
            "witness": _jsonable(self.witness),
        }
        if self.notes:
            d["notes"] = _jsonable(self.notes)
        return d


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return format_scalar(v)


class Checker:
    """Accumulates one-sided residuals of an identity over a grid.

    Exact backend: a point passes iff its residual is exactly zero. Float
    backend: iff ``|residual| / scale <= tol``, where ``scale`` is supplied by
    the caller (typically the sum of absolute term magnitudes).
    """

    def __init__(self, name: str, backend: Backend, tol: float = FLOAT_TOL):
        self.name = name
        self.backend = backend
        self.tol = tol
        self.grid = 0
        self.skipped = 0
        self.worst = backend.zero()
        self.witness: Optional[Dict[str, Any]] = None
        self.notes: Dict[str, Any] = {}

    def add(self, residual, scale=None, **where) -> bool:
        self.grid += 1
        if self.backend.exact:
            err = abs(residual)
            ok = residual == 0
        else:
            r = abs(float(residual))
            s = float(scale) if scale is not None else 1.0
            err = r / s if s > 0 else r
            ok = err <= self.tol
        if err > self.worst:
            self.worst = err
        if not ok and self.witness is None:
            self.witness = {**{k: _jsonable(v) for k, v in where.items()},
                            "residual": format_scalar(residual)}
        return ok

    def add_terms(self, terms, **where) -> bool:
        """Residual is the plain sum of ``terms``; scale is the sum of magnitudes."""
        r = 0
        s = 0
        for t in terms:
            r = r + t
            s = s + abs(t)
        return self.add(r, s, **where)

    def skip(self) -> None:
        self.skipped += 1

    def report(self) -> IdentityReport:
        passed = self.witness is None
        notes = dict(self.notes)
        if self.skipped:
            notes["skipped"] = self.skipped
        return IdentityReport(self.name, self.grid, self.worst, passed, self.witness,
                              {k: _jsonable(v) for k, v in notes.items()})


def merge(name: str, reports) -> IdentityReport:
    """Combine several reports into one (all must pass)."""
    reports = list(reports)
    worst = max((r.max_residual for r in reports), default=0)
    witness = None
    for r in reports:
        if not r.passed:
            witness = {"part": r.name, **(r.witness or {})}
            break
    notes = {}
    for r in reports:
        for k, v in r.notes.items():
            notes[f"{r.name}.{k}"] = v
    return IdentityReport(name, sum(r.grid for r in reports), worst,
                          all(r.passed for r in reports), witness, notes)
