"""Field-generic scalars, Pochhammer symbols and terminating 3F2 sums.

Two backends are supported. ``exact`` values are :class:`gmpy2.mpq`
rationals (always in lowest terms with a positive denominator), ``float``
values are Python floats. Functions here accept either and return the
same kind; mixing the two is rejected by :func:`backend_of_all`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from gmpy2 import mpq

Scalar = Union[mpq, float]


class ZeroDenominator(ArithmeticError):
    """A denominator factor vanished where the formula needs it nonzero."""

    def __init__(self, factor: str, value=None):
        self.factor = factor
        self.value = value
        msg = f"vanishing denominator factor {factor}"
        if value is not None:
            msg += f" (at {value})"
        super().__init__(msg)


class BackendMismatch(TypeError):
    pass


@dataclass(frozen=True)
class Backend:
    name: str

    @property
    def exact(self) -> bool:
        return self.name == "exact"

    def scalar(self, x) -> Scalar:
        """Coerce ``x`` into this backend.

        The exact backend refuses floats: exactness is the point of it.
        """
        if self.exact:
            if isinstance(x, float):
                raise BackendMismatch(f"float {x!r} given to the exact backend")
            if isinstance(x, str):
                return parse_rational(x)
            if isinstance(x, Fraction):
                return mpq(x.numerator, x.denominator)
            return mpq(x)
        if isinstance(x, str):
            return float(parse_rational(x))
        return float(x)

    def zero(self) -> Scalar:
        return mpq(0) if self.exact else 0.0

    def one(self) -> Scalar:
        return mpq(1) if self.exact else 1.0

    def __str__(self) -> str:
        return self.name


EXACT = Backend("exact")
FLOAT = Backend("float")
BACKENDS = {"exact": EXACT, "float": FLOAT}


def get_backend(name: str | Backend) -> Backend:
    if isinstance(name, Backend):
        return name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}") from None


def backend_of(x) -> Backend | None:
    """Backend a value belongs to; plain ints are neutral (``None``)."""
    if isinstance(x, mpq):
        return EXACT
    if isinstance(x, float):
        return FLOAT
    if isinstance(x, int):
        return None
    raise BackendMismatch(f"not a scalar: {x!r}")


def backend_of_all(values: Iterable) -> Backend | None:
    found = None
    for v in values:
        b = backend_of(v)
        if b is None:
            continue
        if found is None:
            found = b
        elif b is not found:
            raise BackendMismatch("exact and float scalars mixed in one expression")
    return found


def parse_rational(text: str) -> mpq:
    """Parse ``"p/q"`` (or an integer / finite decimal) into an exact rational."""
    s = text.strip()
    try:
        if "/" in s:
            p, q = s.split("/")
            num, den = int(p), int(q)
            if den == 0:
                raise ValueError
            return mpq(num, den)
        return mpq(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def format_scalar(x) -> str:
    """Exact values print as ``p/q`` (or ``p``); floats use ``repr``."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def is_zero(x) -> bool:
    return x == 0


# ---------------------------------------------------------------------------
# Pochhammer symbols

_POCH_CACHE: dict = {}
_POCH_CACHE_MAX = 1 << 16


def poch(a: Scalar, k: int) -> Scalar:
    """Rising factorial ``a (a+1) ... (a+k-1)``; equals 1 for ``k == 0``."""
    if k < 0:
        raise ValueError(f"poch order must be non-negative, got {k}")
    key = (type(a), a, k)
    hit = _POCH_CACHE.get(key)
    if hit is not None:
        return hit
    r = a - a + 1
    for j in range(k):
        r *= a + j
    if len(_POCH_CACHE) >= _POCH_CACHE_MAX:
        _POCH_CACHE.clear()
    _POCH_CACHE[key] = r
    return r


def poch_signed(a: Scalar, k: int) -> Scalar:
    """Pochhammer symbol extended to negative orders.

    ``(a)_{-k} = 1 / (a-k)_k``, the value of ``Gamma(a-k)/Gamma(a)``.
    """
    if k >= 0:
        return poch(a, k)
    d = poch(a + k, -k)
    if d == 0:
        raise ZeroDenominator(f"({a}{k:+d})_{-k}")
    return 1 / d


def multi_poch(bases: Sequence[Scalar], k: int) -> Scalar:
    """``(a_1, ..., a_r)_k``: product of the individual rising factorials."""
    r = 1
    for a in bases:
        r = r * poch(a, k)
    return r


def factorial(n: int, like: Scalar) -> Scalar:
    """``n!`` in the backend of ``like``."""
    r = like - like + 1
    for j in range(2, n + 1):
        r *= j
    return r


def hyp3f2_terms(top: Sequence[Scalar], bottom: Sequence[Scalar], kmax: int):
    """Yield the terms of a 3F2 at unit argument, k = 0..kmax.

    Terms are built by the running ratio. Generation stops early once a term
    is exactly zero (the numerator has truncated), so bottom parameters are
    only required to be nonzero up to that point.
    """
    t1, t2, t3 = top
    b1, b2 = bottom
    one = t1 - t1 + 1
    term = one
    yield term
    for k in range(kmax):
        num = (t1 + k) * (t2 + k) * (t3 + k)
        if num == 0:
            return
        den = (b1 + k) * (b2 + k) * (k + 1)
        if den == 0:
            raise ZeroDenominator(f"({b1})_{k + 1}*({b2})_{k + 1}", k + 1)
        term = term * num / den
        yield term


def hyp3f2(top: Sequence[Scalar], bottom: Sequence[Scalar], kmax: int) -> Scalar:
    """Terminating ``3F2(top; bottom; 1)`` summed for k = 0..kmax.

    ``kmax`` is the termination index and is the caller's responsibility.
    """
    if len(top) != 3 or len(bottom) != 2:
        raise ValueError("hyp3f2 needs three top and two bottom parameters")
    backend_of_all(list(top) + list(bottom))
    s = 0
    for t in hyp3f2_terms(top, bottom, kmax):
        s = s + t
    return s


def hyp3f2_with_mag(top, bottom, kmax: int):
    """Sum and the sum of absolute term values (a cancellation-aware scale)."""
    s = 0
    mag = 0
    for t in hyp3f2_terms(top, bottom, kmax):
        s = s + t
        mag = mag + abs(t)
    return s, mag


def termination_index(m: int, x) -> int:
    """Last non-vanishing index of a sum truncated by both ``(-m)_k`` and ``(-x)_k``.

    ``x`` shortens the sum only when it is a non-negative integer below m.
    """
    if isinstance(x, int) or (x == int(x)):
        xi = int(x)
        if 0 <= xi < m:
            return xi
    return m
