"""Canonical decimal rendering for 64-bit floats.

Shortest round-trip digits, formatted with the same decimal/exponent
switchover rules ECMAScript uses for ``Number.prototype.toString``, so
output lines are byte-comparable across evaluator implementations.
"""

from __future__ import annotations

import math


def render_float(x: float) -> str:
    """Render a finite float as the canonical shortest round-trip decimal."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot render non-finite value {x!r}")
    if x == 0.0:
        return "0"
    if x < 0.0:
        return "-" + render_float(-x)

    digits, point = _shortest_digits(x)
    k = len(digits)
    if k <= point <= 21:
        return digits + "0" * (point - k)
    if 0 < point <= 21:
        return digits[:point] + "." + digits[point:]
    if -6 < point <= 0:
        return "0." + "0" * (-point) + digits
    exponent = point - 1
    mantissa = digits[0] + ("." + digits[1:] if k > 1 else "")
    sign = "+" if exponent >= 0 else "-"
    return f"{mantissa}e{sign}{abs(exponent)}"


def _shortest_digits(x: float) -> tuple[str, int]:
    """Decompose positive x as 0.DIGITS * 10**point with minimal digits."""
    text = repr(x)
    if "e" in text:
        mantissa, exp_text = text.split("e")
        exp10 = int(exp_text)
    else:
        mantissa, exp10 = text, 0
    if "." in mantissa:
        int_part, frac_part = mantissa.split(".")
    else:
        int_part, frac_part = mantissa, ""
    if int_part != "0":
        point = len(int_part) + exp10
    else:
        leading_zeros = len(frac_part) - len(frac_part.lstrip("0"))
        point = exp10 - leading_zeros
    digits = (int_part + frac_part).lstrip("0").rstrip("0")
    return digits, point
