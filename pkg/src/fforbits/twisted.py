"""The twisted polynomial ring K{T} with the rule T*c = c^p * T.

Elements are stored densely (coefficient tuple, ascending T-degree), which
is the right shape here: products and powers fill in low terms quickly, and
the T-degree budget keeps tuples short.  Multiplication follows

    (sum a_i T^i) * (sum b_j T^j) = sum_i sum_j a_i * b_j^(p^i) * T^(i+j)

so the ring is noncommutative unless every coefficient is fixed by the
p-power map, i.e. lies in the prime field.  Powers take a separate budget
from the polynomial degree budget because T-degree n corresponds to x-degree
p^n; the default cap is 4096.

A twisted polynomial is the same data as an additive polynomial in x
(T^i standing for x^(p^i)); to_dynpoly / from_dynpoly convert between the
two views, and evaluation goes through iterated p-th powers of the point.
"""

from __future__ import annotations

from typing import Optional, Union

from .errors import NotAdditive, RingMismatch, TauDegreeBudgetExceeded
from .field import FieldSpec
from .funcfield import ExtElem, ExtRing, KRing, RatFunc

from .dynpoly import DynPoly, is_additive, _scalar_in

DEFAULT_TAU_BUDGET = 4096

Ring = Union[KRing, ExtRing]
Scalar = Union[RatFunc, ExtElem]


class TwistedPoly:
    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: Ring, coeffs: tuple):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("TwistedPoly is immutable")

    @classmethod
    def make(cls, ring: Ring, coeffs) -> "TwistedPoly":
        cs = [_scalar_in(ring, c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        return cls(ring, tuple(cs))

    @classmethod
    def zero(cls, ring: Ring) -> "TwistedPoly":
        return cls(ring, ())

    @classmethod
    def one(cls, ring: Ring) -> "TwistedPoly":
        return cls(ring, (ring.one(),))

    @classmethod
    def constant(cls, ring: Ring, c) -> "TwistedPoly":
        c = _scalar_in(ring, c)
        return cls(ring, (c,) if c else ())

    @classmethod
    def tau(cls, ring: Ring, k: int = 1) -> "TwistedPoly":
        """The monomial T^k."""
        if k < 0:
            raise ValueError("negative T-degree")
        return cls(ring, (ring.zero(),) * k + (ring.one(),))

    @property
    def spec(self) -> FieldSpec:
        return self.ring.spec

    @property
    def tau_degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0].is_one()

    def __eq__(self, other) -> bool:
        return (isinstance(other, TwistedPoly) and self.ring == other.ring
                and self.coeffs == other.coeffs)

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ring, self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    def _check(self, other: "TwistedPoly") -> None:
        if self.ring != other.ring:
            raise RingMismatch("twisted polynomials over different rings")

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        while out and not out[-1]:
            out.pop()
        return TwistedPoly(self.ring, tuple(out))

    def __neg__(self) -> "TwistedPoly":
        return TwistedPoly(self.ring, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "TwistedPoly") -> "TwistedPoly":
        return self + (-other)

    def __mul__(self, other: "TwistedPoly") -> "TwistedPoly":
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return TwistedPoly.zero(self.ring)
        zero = self.ring.zero()
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        shifted = list(other.coeffs)  # holds b^(p^i) for the current row i
        last = 0
        for i, ai in enumerate(self.coeffs):
            if not ai:
                continue
            if i > last:
                gap = i - last
                shifted = [c.frobenius(gap) for c in shifted]
                last = i
            for j, bj in enumerate(shifted):
                if bj:
                    out[i + j] = out[i + j] + ai * bj
        while out and not out[-1]:
            out.pop()
        return TwistedPoly(self.ring, tuple(out))

    def scale(self, c) -> "TwistedPoly":
        """Left multiplication by a scalar (c acts before no twist)."""
        c = _scalar_in(self.ring, c)
        if not c:
            return TwistedPoly.zero(self.ring)
        out = [a * c for a in self.coeffs]
        while out and not out[-1]:
            out.pop()
        return TwistedPoly(self.ring, tuple(out))

    def __pow__(self, n: int) -> "TwistedPoly":
        return twisted_pow(self, n)

    def all_prime_field(self) -> bool:
        return all(c.in_prime_field() for c in self.coeffs)

    def evaluate(self, point):
        """Value of the additive polynomial this encodes, via iterated
        p-th powers of the point."""
        ring = self.ring
        if isinstance(ring, KRing) and isinstance(point, ExtElem) \
                and point.spec == ring.spec:
            return self.lift_to(point.ring).evaluate(point)
        point = _scalar_in(ring, point)
        acc = ring.zero()
        v = point
        for i, c in enumerate(self.coeffs):
            if i:
                v = v.frobenius()
            if c:
                acc = acc + c * v
        return acc

    def lift_to(self, ring: ExtRing) -> "TwistedPoly":
        if not (isinstance(self.ring, KRing) and self.ring.spec == ring.spec):
            raise RingMismatch("can only lift a twisted polynomial over K")
        return TwistedPoly(ring, tuple(ring.from_K(c) for c in self.coeffs))

    def to_dynpoly(self) -> DynPoly:
        p = self.spec.p
        terms = {}
        e = 1
        for i, c in enumerate(self.coeffs):
            if i:
                e *= p
            if c:
                terms[e] = c
        return DynPoly(self.ring, terms)

    @classmethod
    def from_dynpoly(cls, f: DynPoly) -> "TwistedPoly":
        p = f.spec.p
        if not is_additive(f):
            raise NotAdditive(f"{f} has a non-p-power term")
        rows = {}
        for e, c in f.terms.items():
            i = 0
            while e > 1:
                e //= p
                i += 1
            rows[i] = c
        if not rows:
            return cls.zero(f.ring)
        top = max(rows)
        zero = f.ring.zero()
        return cls(f.ring, tuple(rows.get(i, zero) for i in range(top + 1)))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            c_str = str(c)
            wrap = " + " in c_str or "/" in c_str or "*" in c_str
            if i == 0:
                parts.append(f"({c_str})" if wrap else c_str)
                continue
            v = "T" if i == 1 else f"T^{i}"
            if c_str == "1":
                parts.append(v)
            else:
                parts.append((f"({c_str})" if wrap else c_str) + f"*{v}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TwistedPoly({self})"


def twisted_pow(a: TwistedPoly, n: int,
                tau_budget: Optional[int] = None) -> TwistedPoly:
    """a^n in K{T}, with the result's T-degree capped by the budget.

    When every coefficient lies in the prime field the factors commute and
    the power splits along the base-p digits of n, which keeps things sparse
    even at degree thousands; otherwise plain square-and-multiply.
    """
    if n < 0:
        raise ValueError("negative power in K{T}")
    budget = DEFAULT_TAU_BUDGET if tau_budget is None else tau_budget
    if n == 0:
        return TwistedPoly.one(a.ring)
    d = a.tau_degree
    if d >= 1 and d * n > budget:
        raise TauDegreeBudgetExceeded(
            f"T-degree {d * n} exceeds budget {budget}")
    if d < 0:
        return TwistedPoly.zero(a.ring)
    if a.all_prime_field():
        return _prime_field_pow(a, n)
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _prime_field_pow(a: TwistedPoly, n: int) -> TwistedPoly:
    # commutative case: work in GF(p)[T] on plain ints, using that the
    # p-th power just dilates exponents (coefficients are Frobenius-fixed)
    p = a.spec.p
    base = {i: _prime_int(c) for i, c in enumerate(a.coeffs) if c}
    acc = {0: 1}
    step = 1
    while n:
        digit = n % p
        n //= p
        if digit:
            dilated = {e * step: v for e, v in base.items()}
            for _ in range(digit):
                acc = _conv_mod_p(acc, dilated, p)
        step *= p
    top = max(acc)
    ring = a.ring
    zero = ring.zero()
    return TwistedPoly(ring, tuple(
        ring.from_int(acc[i]) if i in acc else zero for i in range(top + 1)))


def _prime_int(c) -> int:
    if isinstance(c, ExtElem):
        c = c.as_K()
    return c.constant_value().as_int()


def _conv_mod_p(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for e1, v1 in a.items():
        for e2, v2 in b.items():
            e = e1 + e2
            v = (out.get(e, 0) + v1 * v2) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def commute_at_iterate(a: TwistedPoly, b: TwistedPoly, m: int,
                       tau_budget: Optional[int] = None) -> bool:
    """Do the m-th powers of a and b commute?

    Composition of additive polynomials is multiplication here, so this is
    literally a^m * b^m == b^m * a^m.
    """
    am = twisted_pow(a, m, tau_budget)
    bm = twisted_pow(b, m, tau_budget)
    return am * bm == bm * am
