"""First-order dual numbers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class DualValue:
    """``value + deriv * eps`` with ``eps**2 == 0``.

    ``kink`` marks a point where the derivative is a one-sided or subgradient
    choice (``abs`` at 0, a piecewise breakpoint, a ``min``/``max`` tie) rather
    than a true derivative. Fields hold floats, or numpy arrays when evaluated
    in vectorised form.
    """

    value: Any
    deriv: Any
    kink: bool = False

    def __iter__(self):
        # allows ``v, d = evaluate_dual(...)``
        yield self.value
        yield self.deriv
