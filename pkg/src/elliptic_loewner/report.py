"""Machine-readable residual reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field


def _finite(obj):
    # NaN and inf are not valid JSON; write them as null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


@dataclass
class IdentityResult:
    name: str
    attempted: int
    rejected: int
    max_residual: float
    mean_residual: float
    tol: float
    informational: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.informational or self.max_residual < self.tol

    def to_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        if not out["extra"]:
            del out["extra"]
        return out


@dataclass
class ResidualReport:
    """Collection of per-identity residual summaries."""

    results: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, name, residuals, tol, *, attempted=None, rejected=0, informational=False, **extra):
        residuals = [float(r) for r in residuals]
        if residuals:
            mx = max(residuals)
            mean = math.fsum(residuals) / len(residuals)
        else:
            mx = mean = math.nan
        result = IdentityResult(
            name=name,
            attempted=len(residuals) + rejected if attempted is None else attempted,
            rejected=rejected,
            max_residual=mx,
            mean_residual=mean,
            tol=float(tol),
            informational=informational,
            extra=extra,
        )
        self.results.append(result)
        return result

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self):
        return [r.name for r in self.results]

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def merge(self, other):
        self.results.extend(other.results)
        return self

    def to_dict(self):
        return {
            "passed": self.passed,
            "meta": self.meta,
            "identities": [r.to_dict() for r in self.results],
        }

    def to_json(self, **kwargs):
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        kwargs.setdefault("allow_nan", False)
        return json.dumps(_finite(self.to_dict()), **kwargs)

    def summary_lines(self):
        for r in self.results:
            status = "info" if r.informational else ("PASS" if r.passed else "FAIL")
            yield (
                f"{status:4s} {r.name:<24s} max={r.max_residual:.3e} "
                f"mean={r.mean_residual:.3e} tol={r.tol:.1e} "
                f"n={r.attempted} rejected={r.rejected}"
            )
