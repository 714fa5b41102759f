"""Finite trigonometric sums used as perturbations.

A perturbation f(x, y, t) is represented as a finite sum of terms

    c * cos(a*x + b*y + m*t + phi)

with integer wave numbers (a, b, m) and real (c, phi).  This family is
closed under partial differentiation, exactly 2*pi-periodic in x, y and
t, and covers the default forcing cos(x + 2y + t).  sin-terms are folded
into the phase (sin(u) = cos(u - pi/2)).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrigTerm:
    c: float
    a: int
    b: int
    m: int
    phi: float = 0.0

    def phase(self, x, y, t):
        return self.a * x + self.b * y + self.m * t + self.phi


@dataclass(frozen=True)
class TrigSum:
    """Finite sum of cosine terms with exact partial derivatives."""

    terms: tuple[TrigTerm, ...] = ()

    @staticmethod
    def zero() -> "TrigSum":
        return TrigSum(())

    @staticmethod
    def default() -> "TrigSum":
        """The reference forcing cos(x + 2y + t)."""
        return TrigSum((TrigTerm(1.0, 1, 2, 1, 0.0),))

    def __call__(self, x, y, t):
        return self.value(x, y, t)

    def value(self, x, y, t):
        out = np.zeros(np.broadcast(x, y, t).shape)
        for term in self.terms:
            out = out + term.c * np.cos(term.phase(x, y, t))
        return out if out.shape else float(out)

    def _dsum(self, x, y, t, pick):
        out = np.zeros(np.broadcast(x, y, t).shape)
        for term in self.terms:
            k = pick(term)
            if k:
                out = out - term.c * k * np.sin(term.phase(x, y, t))
        return out if out.shape else float(out)

    def dx(self, x, y, t):
        return self._dsum(x, y, t, lambda tm: tm.a)

    def dy(self, x, y, t):
        return self._dsum(x, y, t, lambda tm: tm.b)

    def dt(self, x, y, t):
        return self._dsum(x, y, t, lambda tm: tm.m)

    def _d2sum(self, x, y, t, pick):
        out = np.zeros(np.broadcast(x, y, t).shape)
        for term in self.terms:
            k = pick(term)
            if k:
                out = out - term.c * k * np.cos(term.phase(x, y, t))
        return out if out.shape else float(out)

    def dxx(self, x, y, t):
        return self._d2sum(x, y, t, lambda tm: tm.a * tm.a)

    def dxy(self, x, y, t):
        return self._d2sum(x, y, t, lambda tm: tm.a * tm.b)

    def dyy(self, x, y, t):
        return self._d2sum(x, y, t, lambda tm: tm.b * tm.b)

    def scaled(self, factor: float) -> "TrigSum":
        return TrigSum(tuple(
            TrigTerm(factor * tm.c, tm.a, tm.b, tm.m, tm.phi) for tm in self.terms
        ))

    def plus(self, other: "TrigSum") -> "TrigSum":
        return TrigSum(self.terms + other.terms)

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        """One term per line: ``c a b m phi``."""
        lines = [
            "%.17g %d %d %d %.17g" % (tm.c, tm.a, tm.b, tm.m, tm.phi)
            for tm in self.terms
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @staticmethod
    def from_text(text: str) -> "TrigSum":
        terms = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 5:
                raise ValueError(
                    f"term line {lineno}: expected 'c a b m phi', got {line!r}")
            c, phi = float(fields[0]), float(fields[4])
            a, b, m = (int(fields[k]) for k in (1, 2, 3))
            terms.append(TrigTerm(c, a, b, m, phi))
        return TrigSum(tuple(terms))


# -- tiny inline parser: sums of c*cos(...)/c*sin(...) -----------------

_TOKEN = re.compile(r"\s*([+-]|\d+\.?\d*(?:[eE][+-]?\d+)?|pi|[*/()xyt]|cos|sin)")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


def _parse_number(tokens: list[str], i: int) -> tuple[float, int]:
    """Number literal, 'pi', or products/quotients thereof (e.g. pi/2)."""
    value, seen = 1.0, False
    while i < len(tokens):
        tok = tokens[i]
        if tok == "pi":
            value *= math.pi
            i, seen = i + 1, True
        elif re.fullmatch(r"\d+\.?\d*(?:[eE][+-]?\d+)?", tok):
            value *= float(tok)
            i, seen = i + 1, True
        elif tok == "/" and seen and i + 1 < len(tokens):
            den, i2 = _parse_number(tokens, i + 1)
            return value / den, i2
        elif tok == "*" and seen and i + 1 < len(tokens) and tokens[i + 1] in ("pi",):
            i += 1
        else:
            break
    if not seen:
        raise ValueError("expected a number")
    return value, i


def _parse_argument(tokens: list[str], i: int) -> tuple[dict, float, int]:
    """Linear combination a*x + b*y + m*t + phase inside cos(...)/sin(...)."""
    coeffs = {"x": 0, "y": 0, "t": 0}
    phase = 0.0
    sign = 1
    expect_operand = True
    while i < len(tokens) and tokens[i] != ")":
        tok = tokens[i]
        if tok in "+-":
            if not expect_operand:
                sign = 1 if tok == "+" else -1
                expect_operand = True
                i += 1
            else:
                sign *= 1 if tok == "+" else -1
                i += 1
            continue
        if tok in ("x", "y", "t"):
            coeffs[tok] += sign
            i += 1
        elif tok == "pi" or re.fullmatch(r"\d+\.?\d*(?:[eE][+-]?\d+)?", tok):
            value, i = _parse_number(tokens, i)
            if i < len(tokens) and tokens[i] == "*":
                i += 1
            if i < len(tokens) and tokens[i] in ("x", "y", "t"):
                intval = int(round(value))
                if abs(value - intval) > 1e-12:
                    raise ValueError(f"wave numbers must be integers, got {value}")
                coeffs[tokens[i]] += sign * intval
                i += 1
            else:
                phase += sign * value
        else:
            raise ValueError(f"unexpected token {tok!r} in argument")
        sign = 1
        expect_operand = False
    return coeffs, phase, i


def parse_trig_sum(text: str) -> TrigSum:
    """Parse expressions like ``1.0*cos(x+2y+t) - 0.5*sin(3x-t+pi/2)``."""
    tokens = _tokenize(text)
    terms: list[TrigTerm] = []
    i, sign = 0, 1.0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            i += 1
            continue
        if tok == "-":
            sign = -sign
            i += 1
            continue
        coeff = 1.0
        if tok == "pi" or re.fullmatch(r"\d+\.?\d*(?:[eE][+-]?\d+)?", tok):
            coeff, i = _parse_number(tokens, i)
            if i < len(tokens) and tokens[i] == "*":
                i += 1
        if i >= len(tokens) or tokens[i] not in ("cos", "sin"):
            raise ValueError(f"expected cos(...) or sin(...) in {text!r}")
        kind = tokens[i]
        i += 1
        if i >= len(tokens) or tokens[i] != "(":
            raise ValueError(f"missing '(' after {kind}")
        coeffs, phase, i = _parse_argument(tokens, i + 1)
        if i >= len(tokens) or tokens[i] != ")":
            raise ValueError("missing ')'")
        i += 1
        if kind == "sin":
            phase -= math.pi / 2.0
        terms.append(TrigTerm(sign * coeff, coeffs["x"], coeffs["y"], coeffs["t"],
                              float(phase)))
        sign = 1.0
    return TrigSum(tuple(terms))
