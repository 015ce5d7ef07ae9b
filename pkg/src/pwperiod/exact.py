"""Exact scalars for period constants.

Period constants mix rational numbers, square roots coming from the
energy/crossing reparametrization and the harmonic block ``pi/(sqrt(2) omega)``.
An :class:`ExactNumber` is a finite Q-linear combination of the basis

    sqrt(d)                     ("sqrt", d)
    pi / (sqrt(2) * sqrt(d))    ("pi", d)

with ``d`` a squarefree positive integer. Square roots of distinct squarefree
integers are linearly independent over Q, and pi is transcendental, so the
whole basis is Q-linearly independent: a number is zero iff every coefficient
is zero. That makes :meth:`ExactNumber.is_zero` a decision procedure rather
than a tolerance test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

ZERO_TEST_REASON = (
    "exact: coefficients are compared in the basis {sqrt(d), pi/(sqrt(2) sqrt(d))} "
    "for squarefree d, which is linearly independent over Q because pi is "
    "transcendental and square roots of distinct squarefree integers are "
    "Q-linearly independent"
)


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return (m, d) with n = m^2 * d and d squarefree."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    m, d = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e:
            m *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    d *= rest
    return m, d


def sqrt_rational(q: Fraction) -> tuple[Fraction, int]:
    """sqrt(q) = k * sqrt(d) with k rational and d squarefree (q > 0)."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("sqrt_rational needs q > 0")
    m, d = squarefree_split(q.numerator * q.denominator)
    return Fraction(m, q.denominator), d


def _key_value(key: tuple[str, int]) -> float:
    kind, d = key
    if kind == "sqrt":
        return math.sqrt(d)
    return math.pi / (math.sqrt(2.0) * math.sqrt(d))


@dataclass(frozen=True)
class ExactNumber:
    terms: tuple[tuple[tuple[str, int], Fraction], ...] = field(default=())

    # -- constructors ---------------------------------------------------

    @staticmethod
    def _from_dict(acc: dict) -> "ExactNumber":
        items = tuple(sorted(((k, v) for k, v in acc.items() if v != 0), key=lambda kv: (kv[0][0] != "sqrt", kv[0][1])))
        return ExactNumber(items)

    @classmethod
    def rational(cls, q) -> "ExactNumber":
        return cls._from_dict({("sqrt", 1): Fraction(q)})

    @classmethod
    def sqrt(cls, q, coeff=1) -> "ExactNumber":
        """coeff * sqrt(q) for rational q >= 0."""
        q = Fraction(q)
        if q == 0:
            return cls()
        k, d = sqrt_rational(q)
        return cls._from_dict({("sqrt", d): Fraction(coeff) * k})

    @classmethod
    def pi_over_sqrt2_omega(cls, omega_sq, coeff=1) -> "ExactNumber":
        """coeff * pi / (sqrt(2) * omega) where omega^2 = omega_sq > 0."""
        # omega = k sqrt(d) -> pi/(sqrt2 k sqrt d)
        k, d = sqrt_rational(Fraction(omega_sq))
        return cls._from_dict({("pi", d): Fraction(coeff) / k})

    # -- protocol -------------------------------------------------------

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(k == ("sqrt", 1) for k, _ in self.terms)

    @property
    def rational_part(self) -> Fraction:
        return self.as_dict().get(("sqrt", 1), Fraction(0))

    def __add__(self, other) -> "ExactNumber":
        other = _coerce(other)
        acc = self.as_dict()
        for k, v in other.terms:
            acc[k] = acc.get(k, Fraction(0)) + v
        return ExactNumber._from_dict(acc)

    __radd__ = __add__

    def __neg__(self) -> "ExactNumber":
        return ExactNumber(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other) -> "ExactNumber":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "ExactNumber":
        return _coerce(other) - self

    def __mul__(self, q) -> "ExactNumber":
        if isinstance(q, ExactNumber):
            if not q.is_rational():
                raise TypeError("only products with rationals stay inside the basis")
            q = q.rational_part
        q = Fraction(q)
        return ExactNumber._from_dict({k: v * q for k, v in self.terms})

    __rmul__ = __mul__

    def __truediv__(self, q) -> "ExactNumber":
        return self * (1 / Fraction(q))

    def mul_sqrt(self, q) -> "ExactNumber":
        """Multiply by sqrt(q) for rational q > 0."""
        k, e = sqrt_rational(Fraction(q))
        acc: dict = {}
        for (kind, d), v in self.terms:
            # sqrt(d) * sqrt(e) = m sqrt(d2); 1/sqrt(d) * sqrt(e) = sqrt(d e)/d
            m, d2 = squarefree_split(d * e)
            if kind == "sqrt":
                key, coef = ("sqrt", d2), v * k * m
            else:
                # pi/(sqrt2 sqrt d) * sqrt e = pi/sqrt2 * m sqrt(d2) / d = pi/(sqrt2 sqrt d2) * m d2 / d
                key, coef = ("pi", d2), v * k * Fraction(m * d2, d)
            acc[key] = acc.get(key, Fraction(0)) + coef
        return ExactNumber._from_dict(acc)

    def __float__(self) -> float:
        return math.fsum(float(v) * _key_value(k) for k, v in self.terms)

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (kind, d), v in self.terms:
            if kind == "sqrt":
                parts.append(str(v) if d == 1 else "%s*sqrt(%d)" % (v, d))
            else:
                parts.append("%s*pi/sqrt(2)" % v if d == 1 else "%s*pi/(sqrt(2)*sqrt(%d))" % (v, d))
        return " + ".join(parts)

    # -- serialization --------------------------------------------------

    def to_json(self):
        """Plain "p/q" string when rational, otherwise a term object."""
        if self.is_rational():
            return str(self.rational_part)
        return self.to_json_object()

    def to_json_object(self) -> dict:
        out = {"rational": str(self.rational_part), "sqrt_terms": [], "pi_terms": []}
        for (kind, d), v in self.terms:
            if kind == "sqrt" and d != 1:
                out["sqrt_terms"].append({"coeff": str(v), "radicand": str(d)})
            elif kind == "pi":
                out["pi_terms"].append({"pi_over_sqrt2_coeff": str(v), "omega": _omega_str(d), "omega_sq": str(d)})
        out["approx"] = float(self)
        return out

    @classmethod
    def from_json(cls, data) -> "ExactNumber":
        if isinstance(data, str):
            return cls.rational(Fraction(data))
        acc = {("sqrt", 1): Fraction(data.get("rational", "0"))}
        for t in data.get("sqrt_terms", []):
            key = ("sqrt", int(t["radicand"]))
            acc[key] = acc.get(key, Fraction(0)) + Fraction(t["coeff"])
        out = cls._from_dict(acc)
        for t in data.get("pi_terms", []):
            out = out + cls.pi_over_sqrt2_omega(Fraction(t["omega_sq"]), Fraction(t["pi_over_sqrt2_coeff"]))
        return out


def _omega_str(d: int) -> str:
    return "1" if d == 1 else "sqrt(%d)" % d


def _coerce(x) -> ExactNumber:
    if isinstance(x, ExactNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactNumber.rational(x)
    raise TypeError("cannot mix ExactNumber with %s" % type(x).__name__)


ZERO = ExactNumber()
