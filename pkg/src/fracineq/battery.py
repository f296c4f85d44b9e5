"""Fixture functions shipped with the package."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .expr import Expr, parse


@dataclass(frozen=True)
class BatteryFunction:
    name: str
    text: str
    a: float
    b: float
    smooth: bool = True
    # lower end of the region the fixture is meant for (e.g. x^3 on x >= 0)
    domain_lo: Optional[float] = None
    note: str = ""

    @property
    def expr(self) -> Expr:
        return parse(self.text)

    def admits(self, lo: float, hi: float) -> bool:
        return self.domain_lo is None or lo >= self.domain_lo


BATTERY: tuple[BatteryFunction, ...] = (
    BatteryFunction("linear", "x", 0.0, 1.0),
    BatteryFunction("square", "x^2", 0.0, 1.0),
    BatteryFunction("cube", "x^3", 0.0, 1.0, domain_lo=0.0),
    BatteryFunction("exp", "exp(x)", 0.0, 1.0),
    BatteryFunction("exp_neg", "exp(-x)", 0.0, 1.0),
    BatteryFunction("abs", "abs(x)", -1.0, 2.0, smooth=False, note="quasi-convex with a kink at 0"),
    BatteryFunction("quartic", "x^4 - x^2", -1.0, 1.0, note="not quasi-convex on [-1, 1]"),
    BatteryFunction("concave", "x*(1-x)", 0.0, 1.0, note="negative test: concave"),
    BatteryFunction("constant", "2", 0.0, 1.0),
)


def smooth_battery() -> tuple[BatteryFunction, ...]:
    return tuple(b for b in BATTERY if b.smooth)


def get(name: str) -> BatteryFunction:
    for b in BATTERY:
        if b.name == name:
            return b
    raise KeyError(f"no battery function named {name!r}")
