"""Residual reports shared by every verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Residual:
    key: str
    value: object  # EpsLaurent, or LinComb for Hopf identities
    n: int | None = None

    def is_zero(self):
        return self.value.is_zero()

    def to_json(self):
        out = {"tree": self.key, "residual": self.value.to_json()}
        if self.n is not None:
            out["n"] = self.n
        return out


@dataclass
class FlowReport:
    """Outcome of one identity: passes iff every residual vanishes identically."""

    identity: str
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    error: str | None = None

    def add(self, key, value, n=None):
        self.residuals.append(Residual(str(key), value, n))

    @property
    def passed(self):
        return self.error is None and all(r.is_zero() for r in self.residuals)

    @property
    def witnesses(self):
        return [r for r in self.residuals if not r.is_zero()]

    def to_json(self):
        out = {
            "identity": self.identity,
            "pass": self.passed,
            "checked": len(self.residuals),
            "witnesses": [r.to_json() for r in self.witnesses],
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if self.error:
            out["error"] = self.error
        return out

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        line = f"{status}  {self.identity}  ({len(self.residuals)} checked"
        if self.witnesses:
            line += f", {len(self.witnesses)} failing: " + ", ".join(
                r.key + (f"@n={r.n}" if r.n is not None else "") for r in self.witnesses[:5])
        line += ")"
        if self.error:
            line += f"  error: {self.error}"
        return line


class LinComb(dict):
    """Integer linear combination used as a residual for Hopf-algebra identities."""

    def is_zero(self):
        return not any(self.values())

    def to_json(self):
        def enc(k):
            if isinstance(k, tuple):
                return " (x) ".join(x.encoding for x in k)

            return k.encoding

        return {"terms": [{"basis": enc(k), "coeff": str(c)}
                          for k, c in sorted(self.items(), key=lambda kc: enc(kc[0])) if c]}
