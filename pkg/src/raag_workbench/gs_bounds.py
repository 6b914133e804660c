"""Exact bound functions gamma(n), delta(n) from the Golod-Shafarevich argument.

Every decision is made in exact integer or rational arithmetic; floating
point only appears in ``BigCount.log2`` for display.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

from .errors import PreconditionError

DEFAULT_TAU = Fraction(2, 3)


@total_ordering
@dataclass(frozen=True)
class BigCount:
    """Non-negative integer ``2**exponent + offset`` kept symbolic until needed."""

    exponent: int | None = None
    offset: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def power_of_two(cls, e: int) -> "BigCount":
        return cls(e, 0)

    @classmethod
    def of(cls, value: int) -> "BigCount":
        if value < 0:
            raise ValueError("BigCount is non-negative")
        if value and value & (value - 1) == 0:
            return cls(value.bit_length() - 1, 0)
        return cls(None, value)

    @property
    def is_power_of_two(self) -> bool:
        return self.exponent is not None and self.offset == 0

    @property
    def value(self) -> int:
        if "v" not in self._cache:
            base = 0 if self.exponent is None else 1 << self.exponent
            self._cache["v"] = base + self.offset
        return self._cache["v"]

    def __int__(self):
        return self.value

    def log2(self) -> float:
        if self.exponent is None:
            return math.log2(self.offset) if self.offset else float("-inf")
        if self.offset == 0:
            return float(self.exponent)
        return self.exponent + math.log2(1 + self.offset / 2.0 ** self.exponent) if self.exponent < 1000 \
            else float(self.exponent)

    def __add__(self, k: int) -> "BigCount":
        return BigCount(self.exponent, self.offset + k)

    def __pow__(self, n: int) -> "BigCount":
        if self.is_power_of_two:
            return BigCount(self.exponent * n, 0)
        return BigCount.of(self.value ** n)

    def _key(self, other):
        return other.value if isinstance(other, BigCount) else int(other)

    def __eq__(self, other):
        if isinstance(other, BigCount) and self.is_power_of_two and other.is_power_of_two:
            return self.exponent == other.exponent
        if not isinstance(other, (BigCount, int)):
            return NotImplemented
        return self.value == self._key(other)

    def __lt__(self, other):
        if isinstance(other, BigCount) and self.exponent is not None and other.is_power_of_two:
            # 2^e + c < 2^E with 0 <= c < 2^e  <=>  e < E (up to the offset check)
            if 0 <= self.offset < (1 << min(self.exponent, 64)) and self.exponent < other.exponent:
                return True
        if not isinstance(other, (BigCount, int)):
            return NotImplemented
        return self.value < self._key(other)

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        if self.exponent is None:
            return str(self.offset)
        if self.offset == 0:
            return f"2^{self.exponent}"
        return f"2^{self.exponent} + {self.offset}"


def default_r(n: int) -> int:
    """Smallest r with 2^r >= 9 n^2, i.e. ceil(2 log2(3n))."""
    if n < 1:
        raise PreconditionError("n must be positive")
    target = 9 * n * n
    r = (target - 1).bit_length()
    assert (1 << r) >= target and (r == 0 or (1 << (r - 1)) < target)
    return r


def gs_value(n: int, tau: Fraction, r: int) -> Fraction:
    """1 - 2 tau + n tau^r."""
    tau = Fraction(tau)
    return 1 - 2 * tau + n * tau ** r


def gs_inequality_holds(n: int, tau, r: int) -> bool:
    tau = Fraction(tau)
    if not (Fraction(1, 2) < tau < 1):
        raise PreconditionError(f"tau must lie in (1/2, 1), got {tau}")
    if n < 1 or r < 1:
        raise PreconditionError("n and r must be positive")
    return gs_value(n, tau, r) < 0


@dataclass(frozen=True)
class JZProfile:
    mode: str
    dims: tuple[int, ...]   # b_1 .. b_{r-1}


def _exact_layer_dims(count: int) -> list[int]:
    """b_1..b_count from prod_l (1 + t^l)^{b_l} = 1/(1 - 2t)."""
    dims: list[int] = []
    poly = [1] + [0] * count   # running product, truncated at degree count
    for l in range(1, count + 1):
        b = (1 << l) - poly[l]
        dims.append(b)
        for _ in range(b):
            for deg in range(count, l - 1, -1):
                poly[deg] += poly[deg - l]
    return dims


def jz_profile(r: int, mode: str = "bound") -> JZProfile:
    """Dimensions of the layers D_l/D_{l+1}, l < r, of the mod-2 dimension series of F_2."""
    if r < 1:
        raise PreconditionError("r must be positive")
    if mode == "bound":
        return JZProfile(mode, tuple(1 << l for l in range(1, r)))
    if mode == "exact":
        return JZProfile(mode, tuple(_exact_layer_dims(r - 1)))
    raise PreconditionError(f"unknown mode {mode!r}")


def order_F_mod_Dr(r: int, mode: str = "bound") -> BigCount:
    return BigCount.power_of_two(sum(jz_profile(r, mode).dims))


def order_envelope(r: int) -> BigCount:
    """The coarser envelope 2^(2^r - 1) for |F/D_r F|."""
    return BigCount.power_of_two((1 << r) - 1)


def gamma(n: int, mode: str = "bound") -> BigCount:
    r = default_r(n)
    value = order_F_mod_Dr(r, mode) ** n
    envelope = BigCount.power_of_two(18 * n ** 3 - n)
    if not value <= envelope:
        raise AssertionError(f"gamma({n}) exceeds 2^(18n^3-n)")
    return value


def delta(n: int, mode: str = "bound") -> BigCount:
    value = gamma(n, mode) + n
    if not value < BigCount.power_of_two(18 * n ** 3):
        raise AssertionError(f"delta({n}) is not below 2^(18n^3)")
    return value


@dataclass(frozen=True)
class TauOptimum:
    feasible: bool
    tau: Fraction | None = None
    r: int | None = None
    exponent: int | None = None
    default_exponent: int | None = None


def bound_exponent(n: int, r: int) -> int:
    """log2 of the bound-mode gamma for a given r: n (2^r - 2)."""
    return n * ((1 << r) - 2)


def optimize_tau(n: int, resolution: int = 64, r_cap: int = 40) -> TauOptimum:
    """Smallest bound-mode exponent over tau = 1/2 + k/(2*resolution) and r <= r_cap.

    tau = 2/3 is always among the candidates.  Ties on r are broken by the
    larger Golod-Shafarevich margin, then by the smaller tau.
    """
    if n < 1 or resolution < 2:
        raise PreconditionError("need n >= 1 and resolution >= 2")
    taus = {Fraction(1, 2) + Fraction(k, 2 * resolution) for k in range(1, resolution)}
    taus.add(DEFAULT_TAU)
    default_exp = bound_exponent(n, default_r(n))
    best = None
    for r in range(1, r_cap + 1):
        for tau in sorted(taus):
            margin = -gs_value(n, tau, r)
            if margin > 0 and (best is None or margin > best[0]):
                best = (margin, tau)
        if best is not None:
            return TauOptimum(True, best[1], r, bound_exponent(n, r), default_exp)
    return TauOptimum(False, default_exponent=default_exp)
