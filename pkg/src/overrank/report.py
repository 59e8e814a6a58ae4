"""Structured pass/fail records for identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    """Outcome of one series-identity check.

    `status` is "pass" iff the difference of the two sides is identically zero
    on the compared window; "pole_skipped" marks parameter choices that violate
    a genericity hypothesis, so no comparison was possible.
    """

    identity_id: str
    parameters: dict = field(default_factory=dict)
    status: str = "pass"  # "pass" | "fail" | "pole_skipped"
    order: int = 0
    first_discrepancy: tuple | None = None  # (exponent, lhs, rhs) rendered exactly
    elapsed: float = 0.0  # seconds

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        disc = None
        if self.first_discrepancy is not None:
            e, lhs, rhs = self.first_discrepancy
            disc = {"exponent": e, "lhs": str(lhs), "rhs": str(rhs)}
        return {
            "identity_id": self.identity_id,
            "parameters": {k: str(v) for k, v in self.parameters.items()},
            "status": self.status,
            "first_discrepancy": disc,
            "elapsed_ms": round(self.elapsed * 1000.0, 3),
            "order": self.order,
        }

    def __str__(self):
        head = f"[{self.status.upper():>12}] {self.identity_id}"
        if self.parameters:
            head += " (" + ", ".join(f"{k}={v}" for k, v in self.parameters.items()) + ")"
        head += f" order={self.order}"
        if self.first_discrepancy is not None:
            e, lhs, rhs = self.first_discrepancy
            head += f" first mismatch at q^{e}: {lhs} != {rhs}"
        return head


def compare_series(identity_id: str, lhs, rhs, parameters=None, order=None, elapsed=0.0) -> VerificationReport:
    """Build a report from two series, comparing on the shared exact window."""
    compared = min(lhs.prec, rhs.prec)
    diff = lhs.first_difference(rhs)
    return VerificationReport(
        identity_id=identity_id,
        parameters=dict(parameters or {}),
        status="pass" if diff is None else "fail",
        order=compared if order is None else order,
        first_discrepancy=diff if diff is None else (diff[0], str(diff[1]), str(diff[2])),
        elapsed=elapsed,
    )
