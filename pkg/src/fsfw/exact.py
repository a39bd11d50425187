"""Exact spanning-tree counts for perfect trees and balls times a weighted edge.

With ``w = p/q`` every count is an integer polynomial in ``w`` whose degree is
at most the number of bags, so the table keeps integers scaled by
``q**bags`` and never touches a rational until a value is requested.
Counts grow doubly exponentially in ``n``; gmpy2 integers keep large ``d``
affordable.
"""

from __future__ import annotations

import csv
import io
import math
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq, mpz

from .graphs import K2, build_ball, product
from .kirchhoff import classify_spanning_trees


def as_rational(x) -> Fraction:
    """Exact positive rational from an int, Fraction, decimal/fraction string or mpq."""
    if isinstance(x, bool):
        raise TypeError("boolean is not a weight")
    if isinstance(x, float):
        raise TypeError("exact counting needs a rational w; pass a Fraction or a string")
    if isinstance(x, str):
        val = Fraction(x.strip())
    elif isinstance(x, Rational):
        val = Fraction(x)
    elif type(x) is type(mpq()):
        val = Fraction(int(x.numerator), int(x.denominator))
    else:
        raise TypeError(f"cannot read {type(x).__name__} as an exact rational")
    if val <= 0:
        raise ValueError(f"w must be positive, got {val}")
    return val


def _check_d(d):
    if isinstance(d, bool) or not isinstance(d, int):
        raise TypeError("d must be an integer")
    if d < 3:
        raise ValueError(f"d must be at least 3, got {d}")


def _check_n(n, low=0):
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError("n must be an integer")
    if n < low:
        raise ValueError(f"n must be at least {low}, got {n}")


class CountTable:
    """Rows ``(a_n, a'_n)`` for the perfect tree times a weighted edge, extended on demand.

    ``a_n`` counts all spanning trees of the product of A_n with K2, ``a'_n``
    those containing the root-bag edge.
    """

    def __init__(self, d: int, w):
        _check_d(d)
        self.d = d
        self.w = as_rational(w)
        self._p = mpz(self.w.numerator)
        self._q = mpz(self.w.denominator)
        # integers scaled by q**bags; _pow[n] = x_{n-1}^(d-2) where x = 2a + a'/w
        self._bags = [1]
        self._A = [self._p]
        self._pow = [None]
        self._full = {0: None}
        self._X = {0: 2 * self._p + self._q}

    def __len__(self):
        return len(self._A)

    def extend(self, n: int) -> "CountTable":
        _check_n(n)
        d, p, q = self.d, self._p, self._q
        while len(self._A) <= n:
            k = len(self._A)
            x_prev = self._branch_scaled(k - 1)
            power = x_prev ** (d - 2)
            self._pow.append(power)
            self._A.append(power * (p * x_prev + (d - 1) * q * self._A[-1]))
            self._bags.append(1 + (d - 1) * self._bags[-1])
        return self

    # a'_n and the branch factor of the newest row are built only on request
    def _full_scaled(self, n: int):
        if n not in self._full:
            self._full[n] = self._pow[n] * self._branch_scaled(n - 1)
        return self._full[n]

    def _prime_scaled(self, n: int):
        return self._p if n == 0 else self._p * self._full_scaled(n)

    def _y_scaled(self, n: int):
        return self._q if n == 0 else self._q * self._full_scaled(n)

    def _branch_scaled(self, n: int):
        if n not in self._X:
            self._X[n] = 2 * self._A[n] + self._y_scaled(n)
        return self._X[n]

    def _scale(self, bags: int) -> int:
        return int(self._q) ** bags

    def a(self, n: int) -> Fraction:
        self.extend(n)
        return Fraction(int(self._A[n]), self._scale(self._bags[n]))

    def a_prime(self, n: int) -> Fraction:
        self.extend(n)
        return Fraction(int(self._prime_scaled(n)), self._scale(self._bags[n]))

    def branch(self, n: int) -> Fraction:
        """``2 a_n + a'_n / w``: weighted ways to hang a copy of A_n below a bag."""
        self.extend(n)
        return Fraction(int(self._branch_scaled(n)), self._scale(self._bags[n]))

    def c_exact(self, n: int) -> Fraction:
        self.extend(n)
        return Fraction(int(self._prime_scaled(n)), int(self._A[n]))

    def c(self, n: int) -> float:
        self.extend(n)
        return _ratio(self._prime_scaled(n), self._A[n])

    def s(self, n: int) -> float:
        """``a_{n-1}^{d-1} / a_n`` as a float (``n >= 1``)."""
        _check_n(n, 1)
        self.extend(n)
        # mpfr keeps the exponent range; relative error stays near d * 2**-53
        num = gmpy2.mpfr(self._q) * gmpy2.mpfr(self._A[n - 1]) ** (self.d - 1)
        return float(num / gmpy2.mpfr(self._A[n]))

    def s_exact(self, n: int) -> Fraction:
        _check_n(n, 1)
        return self.a(n - 1) ** (self.d - 1) / self.a(n)

    # ball counts -------------------------------------------------------

    def _ball_scaled(self, n: int):
        self.extend(n)
        A, Y = self._A, self._y_scaled
        total = 2 * A[n] * A[n - 1] + A[n] * Y(n - 1) + Y(n) * A[n - 1]
        return total, 1 + self.d * self._bags[n - 1]

    def ball(self, n: int) -> Fraction:
        _check_n(n)
        if n == 0:
            return self.w
        total, bags = self._ball_scaled(n)
        return Fraction(int(total), self._scale(bags))

    def _by_bags_scaled(self, n: int, m: int):
        d = self.d
        if isinstance(m, bool) or not isinstance(m, int):
            raise TypeError("m must be an integer")
        if not ((m == 1 and n >= 1) or (2 <= m < n)):
            raise ValueError(f"no closed formula for m={m}, n={n}; needs m=1<=n or 2<=m<n")
        self.extend(n)
        X, V = self._branch_scaled, self._bags
        if m == 1:
            return self._p * X(n - 1) ** d, 1 + d * V[n - 1]
        num = d * (d - 1) ** (m - 2) * self._p * X(n - 1) * X(n - m)
        bags = 1 + V[n - 1] + V[n - m]
        for i in range(1, m + 1):
            num *= X(n - i) ** (d - 2)
            bags += (d - 2) * V[n - i]
        return num, bags

    def by_bags(self, n: int, m: int) -> Fraction:
        num, bags = self._by_bags_scaled(n, m)
        return Fraction(int(num), self._scale(bags))

    def by_bags_ratio(self, n: int, m: int) -> float:
        """``t_m / t`` for the ball of radius ``n`` as a float."""
        num, bags = self._by_bags_scaled(n, m)
        total, total_bags = self._ball_scaled(n)
        return _ratio(num * self._q ** (total_bags - bags), total)

    def to_csv(self, n_max: int | None = None, include_ball: bool = False) -> str:
        """Columns ``n,a_n,a_prime_n,c_n,s_n`` (plus ``t_ball`` on request)."""
        n_max = len(self) - 1 if n_max is None else n_max
        self.extend(n_max)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["n", "a_n", "a_prime_n", "c_n", "s_n"]
        if include_ball:
            header.append("t_ball")
        writer.writerow(header)
        for n in range(n_max + 1):
            row = [n, _frac_str(self.a(n)), _frac_str(self.a_prime(n)), _dec(self.c(n)),
                   _dec(self.s(n)) if n >= 1 else ""]
            if include_ball:
                row.append(_frac_str(self.ball(n)) if n >= 1 else "")
            writer.writerow(row)
        return buf.getvalue()


def _ratio(num, den) -> float:
    return float(gmpy2.mpfr(num) / gmpy2.mpfr(den))


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _dec(x: float) -> str:
    return repr(float(x))


def recursion_a(d: int, w, n: int) -> tuple[Fraction, Fraction]:
    """``(a_n, a'_n)`` from the branch recursion, base case ``a_0 = a'_0 = w``."""
    _check_n(n)
    table = CountTable(d, w).extend(n)
    return table.a(n), table.a_prime(n)


def count_ball(d: int, w, n: int) -> Fraction:
    """Weighted spanning-tree count of the ball T_n times a weighted edge.

    The radius-0 ball is the central bag alone, with count ``w``.
    """
    _check_n(n)
    return CountTable(d, w).ball(n)


def count_by_bags(d: int, w, n: int, m: int) -> Fraction:
    """Mass of spanning trees whose root-bag path enters exactly ``m`` bags.

    Only for ``m == 1`` (``n >= 1``) or ``2 <= m < n``; the two deepest
    classes have no formula here and come from classification instead.
    """
    _check_n(n, 1)
    return CountTable(d, w).by_bags(n, m)


def ratio_sequence(d: int, w: float, n_max: int) -> list[tuple[float, float | None]]:
    """``(c_n, s_n)`` for ``n = 0..n_max`` from the normalized scalar recursion.

    ``c_n = (2w + c_{n-1}) / (2w + c_{n-1} + d - 1)`` with ``c_0 = 1`` and
    ``s_n = c_n / (w (2 + c_{n-1}/w)^(d-1))``; ``s_0`` is undefined (None).
    """
    _check_d(d)
    _check_n(n_max)
    w = float(w)
    if not (w > 0 and math.isfinite(w)):
        raise ValueError(f"w must be positive and finite, got {w}")
    out: list[tuple[float, float | None]] = [(1.0, None)]
    c_prev = 1.0
    for _ in range(n_max):
        c = (2 * w + c_prev) / (2 * w + c_prev + d - 1)
        s = c / (w * (2 + c_prev / w) ** (d - 1))
        out.append((c, s))
        c_prev = c
    return out


def formula_bag_classes(d: int, w, n: int) -> tuple[dict[int, Fraction], Fraction]:
    """Probabilities of the classes ``m = 1..max(1, n-1)`` plus the merged mass of the rest.

    Needs no determinant, so it stays cheap for large ``n``.
    """
    _check_n(n, 1)
    table = CountTable(d, w)
    total = table.ball(n)
    classes = {m: table.by_bags(n, m) / total for m in range(1, max(2, n))}
    return classes, 1 - sum(classes.values())


def exact_bag_distribution(d: int, w, n: int) -> dict[int, Fraction]:
    """Exact law of the number of bags on the root-bag path in the UST of the ball.

    Classes covered by the product formula use it; the remaining deep
    classes come from path-by-path classification with determinants.
    """
    _check_n(n, 1)
    table = CountTable(d, w)
    total = table.ball(n)
    out = {}
    boundary = []
    for m in range(1, n + 2):
        if m == 1 or m < n:
            out[m] = table.by_bags(n, m) / total
        else:
            boundary.append(m)
    classes = classify_spanning_trees(product(build_ball(d, n), K2, table.w), method="paths")
    for m in boundary:
        out[m] = classes.get(m, Fraction(0)) / total
    if sum(out.values()) != 1:
        raise ArithmeticError("bag classes do not add up to the ball count")
    return out


def exact_escape_probability(d: int, w, n: int, m: int) -> Fraction:
    """Probability that the root-bag LERW path in the ball of radius ``n`` leaves the ball of radius ``m``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    dist = exact_bag_distribution(d, w, n)
    return sum((p for k, p in dist.items() if k > m + 1), Fraction(0))
