"""Exact lower bounds on the number of planar central configurations.

Polynomials are kept as tuples of Python ints (coefficient ``k`` counts
configurations of Morse index ``k``), so nothing overflows for large ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

__all__ = [
    "IndexPolynomial",
    "BoundTable",
    "ParityError",
    "InequalityCheck",
    "bouquet_poly",
    "first_palmore_poly",
    "mccord_series",
    "mccord_poly",
    "ignored_palmore_poly",
    "morse_inequality_check",
    "equivariant_morse_check",
    "bound_table",
    "divide_by_one_plus_t",
]


class ParityError(ValueError):
    """A count of non-collinear configurations is odd (a mirror image is missing)."""


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    end = len(coeffs)
    while end > 1 and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end]) if end else (0,)


@dataclass(frozen=True)
class IndexPolynomial:
    """Polynomial in ``t`` with non-negative integer coefficients."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        values = []
        for c in coeffs:
            if isinstance(c, bool) or int(c) != c:
                raise TypeError(f"coefficients must be integers, got {c!r}")
            if c < 0:
                raise ValueError(f"coefficients must be non-negative, got {c}")
            values.append(int(c))
        object.__setattr__(self, "coeffs", _trim(values))

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __add__(self, other: IndexPolynomial) -> IndexPolynomial:
        size = max(len(self), len(other))
        return IndexPolynomial(self[k] + other[k] for k in range(size))

    def __mul__(self, other: IndexPolynomial) -> IndexPolynomial:
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IndexPolynomial(out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if any(self.coeffs) else 0

    @property
    def total(self) -> int:
        return sum(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def padded(self, length: int) -> list[int]:
        """Coefficient list of exactly ``length`` entries (zero-filled)."""
        if length < len(self.coeffs) and any(self.coeffs[length:]):
            raise ValueError(f"polynomial of degree {self.degree} does not fit in {length} slots")
        return [self[k] for k in range(length)]

    def __repr__(self) -> str:
        return f"IndexPolynomial({list(self.coeffs)})"


def _require(n: int, lowest: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"n must be an int, got {type(n).__name__}")
    if n < lowest:
        raise ValueError(f"n must be >= {lowest}, got {n}")


def bouquet_poly(n: int) -> IndexPolynomial:
    """Poincaré polynomial ``(1+2t)(1+3t)...(1+(n-1)t)`` of the shape space."""
    _require(n, 2)
    p = IndexPolynomial([1])
    for k in range(2, n):
        p = p * IndexPolynomial([1, k])
    return p


def first_palmore_poly(n: int) -> IndexPolynomial:
    """Bouquet bound plus the collinear saddles and their cancelling partners."""
    _require(n, 3)
    extra = factorial(n) // 2 - factorial(n - 1)
    coeffs = bouquet_poly(n).padded(n - 1)
    coeffs[n - 2] += extra
    coeffs[n - 3] += extra
    return IndexPolynomial(coeffs)


def mccord_series(n: int) -> list[int]:
    """Coefficients of Q(t): cumulative sums of the bouquet coefficients up to t^(n-3)."""
    _require(n, 3)
    p = bouquet_poly(n)
    out, acc = [], 0
    for j in range(n - 2):
        acc += p[j]
        out.append(acc)
    return out


def mccord_poly(n: int) -> IndexPolynomial:
    """Per-index bound from the reflection-equivariant Morse inequalities.

    Non-collinear configurations come in mirror pairs, hence the factor 2;
    the n!/2 collinear ones all sit at index n-2.
    """
    _require(n, 3)
    coeffs = [2 * c for c in mccord_series(n)]
    coeffs.append(factorial(n) // 2)
    return IndexPolynomial(coeffs)


def ignored_palmore_poly(n: int) -> IndexPolynomial:
    """Palmore's detailed counts, via N_n = (n-1)!(1+t)^(n-2) + (n-2) t N_(n-1), N_2 = 1."""
    _require(n, 2)
    poly = IndexPolynomial([1])
    for k in range(3, n + 1):
        head = IndexPolynomial([factorial(k - 1)])
        for _ in range(k - 2):
            head = head * IndexPolynomial([1, 1])
        tail = IndexPolynomial([0] + [(k - 2) * c for c in poly.coeffs])
        poly = head + tail
    return poly


def divide_by_one_plus_t(coeffs: Sequence[int]) -> tuple[list[int], int]:
    """Synthetic division of ``sum c_k t^k`` by ``1 + t``.

    Returns ``(quotient, remainder)``; the remainder is the value at ``t = -1``.
    """
    d = [int(c) for c in coeffs]
    while len(d) > 1 and d[-1] == 0:
        d.pop()
    if len(d) <= 1:
        return [0], (d[0] if d else 0)
    q = [0] * (len(d) - 1)
    q[-1] = d[-1]
    for k in range(len(d) - 2, 0, -1):
        q[k - 1] = d[k] - q[k]
    return q, d[0] - q[0]


@dataclass(frozen=True)
class InequalityCheck:
    passed: bool
    s_poly: IndexPolynomial | None
    difference: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def _check_difference(diff: list[int]) -> InequalityCheck:
    q, rem = divide_by_one_plus_t(diff)
    ok = rem == 0 and all(c >= 0 for c in q)
    return InequalityCheck(ok, IndexPolynomial(q) if ok else None, tuple(diff))


def morse_inequality_check(morse: IndexPolynomial | Sequence[int],
                           poincare: IndexPolynomial | Sequence[int]) -> InequalityCheck:
    """Pass iff morse - poincare = (1+t) S(t) with S >= 0 coefficient-wise."""
    morse, poincare = list(morse), list(poincare)
    if not morse or not poincare:
        raise ValueError("polynomials must be non-empty")
    size = max(len(morse), len(poincare))
    morse += [0] * (size - len(morse))
    poincare += [0] * (size - len(poincare))
    return _check_difference([a - b for a, b in zip(morse, poincare)])


def equivariant_morse_check(noncollinear_counts: IndexPolynomial | Sequence[int],
                            n: int) -> InequalityCheck:
    """Check R(t) - Q(t) = (1+t) S(t), S >= 0, where R halves the non-collinear counts."""
    _require(n, 3)
    counts = list(noncollinear_counts)
    odd = [k for k, c in enumerate(counts) if c % 2]
    if odd:
        raise ParityError(f"odd number of non-collinear configurations at index {odd}")
    r = [c // 2 for c in counts]
    q = mccord_series(n)
    size = max(len(r), len(q))
    r += [0] * (size - len(r))
    q += [0] * (size - len(q))
    return _check_difference([a - b for a, b in zip(r, q)])


@dataclass(frozen=True)
class BoundTable:
    n: int
    bouquet: IndexPolynomial
    first_palmore: IndexPolynomial
    mccord: IndexPolynomial
    ignored_palmore: IndexPolynomial

    ROWS = ("bouquet", "first_palmore", "mccord", "ignored_palmore")
    LABELS = {
        "bouquet": "bouquet",
        "first_palmore": "first Palmore",
        "mccord": "McCord",
        "ignored_palmore": "Ignored Palmore",
    }

    @property
    def totals(self) -> tuple[int, int, int, int]:
        return tuple(getattr(self, name).total for name in self.ROWS)

    def rows(self) -> list[tuple[str, list[int], int]]:
        return [(name, getattr(self, name).padded(self.n - 1), getattr(self, name).total)
                for name in self.ROWS]


def bound_table(n: int) -> BoundTable:
    _require(n, 3)
    return BoundTable(
        n=n,
        bouquet=bouquet_poly(n),
        first_palmore=first_palmore_poly(n),
        mccord=mccord_poly(n),
        ignored_palmore=ignored_palmore_poly(n),
    )
