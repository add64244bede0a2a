"""Verification reports and their JSON form."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .fields import Field

SCHEMA = 1


class Status(str, enum.Enum):
    VERIFIED_EXACT = "verified-exact"
    VERIFIED_PROBABILISTIC = "verified-probabilistic"
    REFUTED = "refuted"
    SKIPPED = "skipped"


def degree_bound(dim: int) -> int:
    """Declared total-degree bound for the tested rational identities."""
    return 4 * (dim + 1) ** 2


def failure_bound(field: Field, dim: int, trials: int) -> dict | None:
    """Schwartz-Zippel bound (D/|F|)^trials, or None over infinite fields."""
    if field.order is None:
        return None
    per_trial = Fraction(degree_bound(dim), field.order)
    total = per_trial**trials
    return {
        "field_order": field.order,
        "degree_bound": degree_bound(dim),
        "trials": trials,
        "per_trial": float(per_trial),
        "total": float(total),
    }


@dataclass
class VerificationReport:
    claim: str
    polytope: str
    status: Status
    backend: str = ""
    seeds: list[int] = field(default_factory=list)
    trials: int = 0
    degrees: list[int] = field(default_factory=list)
    ranks: list[dict] = field(default_factory=list)
    bound: dict | None = None
    witness: dict | None = None
    reason: str | None = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is not Status.REFUTED

    def to_json(self) -> dict:
        out = {
            "claim": self.claim,
            "polytope": self.polytope,
            "status": self.status.value,
            "backend": self.backend,
            "seeds": list(self.seeds),
            "trials": self.trials,
            "degrees": list(self.degrees),
            "ranks": self.ranks,
        }
        for key in ("bound", "witness", "reason"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.details:
            out["details"] = self.details
        return out

    def summary(self) -> str:
        tail = ""
        if self.status is Status.VERIFIED_PROBABILISTIC and self.bound:
            tail = f" (failure bound {self.bound['total']:.3g})"
        elif self.reason:
            tail = f" ({self.reason})"
        return f"{self.claim:<20} {self.polytope:<20} {self.status.value}{tail}"


def skipped(claim: str, polytope: str, reason: str, **extra) -> VerificationReport:
    return VerificationReport(claim, polytope, Status.SKIPPED, reason=reason, **extra)


def dumps(payload: dict) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def envelope(kind: str, body) -> dict:
    return {"schema": SCHEMA, "kind": kind, "result": body}
