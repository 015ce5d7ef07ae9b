"""Exact truncated power series over the rationals.

A :class:`TruncatedSeries` of order ``N`` stores ``c_0 .. c_N`` as
:class:`fractions.Fraction` and represents ``c_0 + c_1 t + ... + c_N t^N +
O(t^{N+1})``. Coefficients beyond the order are unknown, not zero, so binary
operations between series of different orders truncate to the smaller one.

All arithmetic is exact; floats only appear through :meth:`TruncatedSeries.
to_floats` and :meth:`TruncatedSeries.__call__`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NonzeroConstantInner, NotInvertible

DEFAULT_ORDER = 12

Rational = Fraction | int


def _q(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("series coefficients must be exact; got float %r" % value)
    return Fraction(value)


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: tuple[Fraction, ...]
    var: str = "t"

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(_q(c) for c in self.coeffs))

    # -- construction ---------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, order: int | None = None, var: str = "t") -> "TruncatedSeries":
        """Build from a coefficient list, padding with zeros or truncating to `order`."""
        cs = [_q(c) for c in coeffs]
        if order is None:
            order = max(len(cs) - 1, 0)
        cs = (cs + [Fraction(0)] * (order + 1))[: order + 1]
        return cls(tuple(cs), var)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER, var: str = "t") -> "TruncatedSeries":
        return cls.from_coeffs([], order, var)

    @classmethod
    def one(cls, order: int = DEFAULT_ORDER, var: str = "t") -> "TruncatedSeries":
        return cls.from_coeffs([1], order, var)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER, var: str = "t") -> "TruncatedSeries":
        return cls.from_coeffs([0, 1], order, var)

    # -- basic protocol -------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append("(%s)*%s" % (c, self.var))
            else:
                terms.append("(%s)*%s^%d" % (c, self.var, k))
        body = " + ".join(terms) if terms else "0"
        return "%s + O(%s^%d)" % (body, self.var, self.order + 1)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot raise the order of a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1], self.var)

    def padded(self, order: int) -> "TruncatedSeries":
        """Zero-extend to `order`. Only meaningful for exact polynomials."""
        return TruncatedSeries.from_coeffs(self.coeffs, order, self.var)

    def with_var(self, var: str) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, var)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None if all vanish."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return None

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.from_coeffs([_q(other)], self.order, self.var)

    def __add__(self, other) -> "TruncatedSeries":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1)), self.var)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        s = _q(other)
        return TruncatedSeries(tuple(s * c for c in self.coeffs), self.var)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return series_mul(self, series_reciprocal(other))
        s = _q(other)
        return TruncatedSeries(tuple(c / s for c in self.coeffs), self.var)

    def __pow__(self, n: int) -> "TruncatedSeries":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = TruncatedSeries.one(self.order, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        """Evaluate the truncated polynomial at `x` (Horner)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (float(c) if isinstance(x, float) else c)
        return acc

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        return series_compose(self, inner)

    def derivative(self) -> "TruncatedSeries":
        if self.order == 0:
            return TruncatedSeries((Fraction(0),), self.var)
        return TruncatedSeries(tuple(k * self.coeffs[k] for k in range(1, self.order + 1)), self.var)

    def integral(self) -> "TruncatedSeries":
        """Antiderivative vanishing at 0; the order grows by one."""
        return TruncatedSeries(
            (Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)), self.var
        )

    def shift_down(self, k: int = 1) -> "TruncatedSeries":
        """Divide by t^k; the first k coefficients must vanish."""
        if any(c != 0 for c in self.coeffs[:k]):
            raise ValueError("series is not divisible by %s^%d" % (self.var, k))
        return TruncatedSeries(self.coeffs[k:], self.var)

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs], "var": self.var}

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        coeffs = [Fraction(c) for c in data["coeffs"]]
        if "order" in data and data["order"] != len(coeffs) - 1:
            raise ValueError("order %s does not match %d coefficients" % (data["order"], len(coeffs)))
        return cls(tuple(coeffs), data.get("var", "t"))


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(a.order, b.order)``."""
    n = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(n + 1):
        s = Fraction(0)
        for i in range(k + 1):
            if ac[i] and bc[k - i]:
                s += ac[i] * bc[k - i]
        out.append(s)
    return TruncatedSeries(tuple(out), a.var)


def series_reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """1/a for a series with nonzero constant term."""
    c0 = a.coeffs[0]
    if c0 == 0:
        raise NotInvertible("reciprocal needs a nonzero constant term")
    out = [1 / c0]
    for k in range(1, a.order + 1):
        s = sum((a.coeffs[i] * out[k - i] for i in range(1, k + 1)), Fraction(0))
        out.append(-s / c0)
    return TruncatedSeries(tuple(out), a.var)


def series_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """``outer(inner(t))`` truncated at the common order.

    Raises NonzeroConstantInner unless ``inner`` vanishes at 0.
    """
    if inner.coeffs[0] != 0:
        raise NonzeroConstantInner("inner series must have zero constant term")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    acc = TruncatedSeries.from_coeffs([outer.coeffs[n]], n, inner.var)
    for k in range(n - 1, -1, -1):
        acc = series_mul(acc, inner) + outer.coeffs[k]
    return acc


def series_reversion(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse g with f(g(t)) = t + O(t^{N+1}).

    Newton iteration ``g <- g - (f(g) - t) / f'(g)`` doubling the number of
    correct coefficients per pass.
    """
    if f.order < 1 or f.coeffs[0] != 0 or f.coeffs[1] == 0:
        raise NotInvertible("reversion needs c0 = 0 and c1 != 0")
    n = f.order
    fprime = f.derivative()
    g = TruncatedSeries.from_coeffs([0, 1 / f.coeffs[1]], 1, f.var)
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        gp = g.padded(prec)
        residual = series_compose(f.truncate(prec), gp) - TruncatedSeries.identity(prec, f.var)
        slope = series_compose(fprime.padded(prec), gp)
        g = gp - residual / slope
    return g.with_var(f.var)


def binomial_series(alpha: Rational, order: int, var: str = "t") -> TruncatedSeries:
    """Coefficients of (1 + t)^alpha for rational alpha."""
    alpha = _q(alpha)
    out = [Fraction(1)]
    for k in range(1, order + 1):
        out.append(out[-1] * (alpha - k + 1) / k)
    return TruncatedSeries(tuple(out), var)


def series_pow1p(u: TruncatedSeries, alpha: Rational) -> TruncatedSeries:
    """(1 + u)^alpha for a series u with zero constant term."""
    if u.coeffs[0] != 0:
        raise NonzeroConstantInner("(1+u)^alpha needs u(0) = 0")
    return series_compose(binomial_series(alpha, u.order, u.var), u)


def series_powhalf_reciprocal(u: TruncatedSeries) -> TruncatedSeries:
    """(1 + u)^(-1/2)."""
    return series_pow1p(u, Fraction(-1, 2))


def series_sqrt1p(u: TruncatedSeries) -> TruncatedSeries:
    """(1 + u)^(1/2)."""
    return series_pow1p(u, Fraction(1, 2))


def as_series(coeffs: Sequence, order: int, var: str = "t") -> TruncatedSeries:
    return TruncatedSeries.from_coeffs(coeffs, order, var)
