"""Exact Laurent polynomials over the integers.

Only a designated subset of the variables is invertible: for the Hecke
coefficient rings these are the constant terms ``a0``, ``b0``, ``c0`` of the
order relations.  Monomials are packed into a single Python int (one 32-bit
field per variable, offset so that negative exponents are representable), which
makes monomial multiplication a single integer addition and makes integer order
coincide with lexicographic order on exponent vectors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

BITS = 32
OFFSET = 1 << (BITS - 1)
MASK = (1 << BITS) - 1

# 2**31 - 1 is a Mersenne prime; products of two residues fit in a signed int64.
DEFAULT_PRIME = 2147483647


class RingMismatch(ValueError):
    pass


class IllegalInversion(ArithmeticError):
    pass


@dataclass(frozen=True)
class VarSpec:
    """Ordered variable names and which of them are invertible."""

    names: tuple[str, ...]
    invertible: tuple[bool, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _shifts: tuple = field(init=False, repr=False, compare=False, hash=False)
    zero_key: int = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.names) != len(self.invertible):
            raise ValueError("names and invertible flags differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        n = len(self.names)
        shifts = tuple(BITS * (n - 1 - i) for i in range(n))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.names)})
        object.__setattr__(self, "_shifts", shifts)
        object.__setattr__(self, "zero_key", sum(OFFSET << s for s in shifts))

    @classmethod
    def of(cls, names: Iterable[str], invertible: Iterable[str] = ()) -> "VarSpec":
        names = tuple(names)
        inv = set(invertible)
        unknown = inv - set(names)
        if unknown:
            raise ValueError(f"invertible names {sorted(unknown)} not among variables")
        return cls(names, tuple(v in inv for v in names))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != len(self.names):
            raise ValueError("exponent vector length does not match ring")
        key = 0
        for e, s, inv, v in zip(exps, self._shifts, self.invertible, self.names):
            if e < 0 and not inv:
                raise IllegalInversion(f"negative exponent on non-invertible variable {v}")
            key |= (e + OFFSET) << s
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple(((key >> s) & MASK) - OFFSET for s in self._shifts)

    def check_key(self, key: int) -> None:
        for e, inv, v in zip(self.unpack(key), self.invertible, self.names):
            if e < 0 and not inv:
                raise IllegalInversion(f"negative exponent on non-invertible variable {v}")

    # convenience constructors
    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return LaurentPoly(self, {self.zero_key: 1})

    def const(self, c: int) -> "LaurentPoly":
        return LaurentPoly(self, {self.zero_key: c} if c else {})

    def var(self, name: str) -> "LaurentPoly":
        return LaurentPoly(self, {self.zero_key + (1 << self._shifts[self.index(name)]): 1})

    def monomial(self, exps: Mapping[str, int], coeff: int = 1) -> "LaurentPoly":
        vec = [0] * len(self.names)
        for v, e in exps.items():
            vec[self.index(v)] = e
        return LaurentPoly(self, {self.pack(vec): coeff} if coeff else {})

    def gens(self) -> list["LaurentPoly"]:
        return [self.var(v) for v in self.names]

    def parse(self, text: str) -> "LaurentPoly":
        return parse(self, text)


class LaurentPoly:
    """Immutable element of a Laurent polynomial ring described by a VarSpec."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: VarSpec, terms: dict[int, int]):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def from_exponents(cls, ring: VarSpec, items: Iterable[tuple[Sequence[int], int]]):
        out: dict[int, int] = {}
        for exps, c in items:
            k = ring.pack(exps)
            out[k] = out.get(k, 0) + c
        return cls(ring, {k: c for k, c in out.items() if c})

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch(f"{self.ring.names} vs {other.ring.names}")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        get = out.get
        for k, c in b.items():
            v = get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return LaurentPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly(self.ring, {})
            return LaurentPoly(self.ring, {k: c * other for k, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if not a or not b:
            return LaurentPoly(self.ring, {})
        if len(a) > len(b):
            a, b = b, a
        z = self.ring.zero_key
        if len(a) == 1:
            ((ka, ca),) = a.items()
            d = ka - z
            if ca == 1:
                return LaurentPoly(self.ring, {k + d: c for k, c in b.items()})
            return LaurentPoly(self.ring, {k + d: c * ca for k, c in b.items()})
        out: dict[int, int] = {}
        get = out.get
        for ka, ca in a.items():
            d = ka - z
            for kb, cb in b.items():
                k = kb + d
                out[k] = get(k, 0) + ca * cb
        return LaurentPoly(self.ring, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "LaurentPoly":
        """Inverse of a unit (a signed monomial in the invertible variables)."""
        if not self.is_unit():
            raise IllegalInversion(f"{self} is not a unit")
        ((k, c),) = self.terms.items()
        return LaurentPoly(self.ring, {2 * self.ring.zero_key - k: c})

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient of an exact division; raises ArithmeticError if inexact.

        Division by leading terms works in the Laurent ring because lex order
        on exponent vectors is compatible with multiplication.
        """
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.terms:
            return self
        if len(other.terms) == 1:
            ((kq, cq),) = other.terms.items()
            z = self.ring.zero_key
            out = {}
            for k, c in self.terms.items():
                qc, r = divmod(c, cq)
                if r:
                    raise ArithmeticError("inexact division")
                out[k - kq + z] = qc
            for k in out:
                self.ring.check_key(k)
            return LaurentPoly(self.ring, out)
        z = self.ring.zero_key
        lead_q = max(other.terms)
        low_q = min(other.terms)
        cq = other.terms[lead_q]
        floor = min(self.terms) - low_q + z
        rem = dict(self.terms)
        quot: dict[int, int] = {}
        while rem:
            lk = max(rem)
            mk = lk - lead_q + z
            if mk < floor:
                raise ArithmeticError("inexact division")
            c, r = divmod(rem[lk], cq)
            if r:
                raise ArithmeticError("inexact division")
            quot[mk] = c
            d = mk - z
            for k, cc in other.terms.items():
                kk = k + d
                v = rem.get(kk, 0) - c * cc
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        for k in quot:
            self.ring.check_key(k)
        return LaurentPoly(self.ring, quot)

    # -- predicates ----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        ((k, c),) = self.terms.items()
        if c not in (1, -1):
            return False
        for e, inv in zip(self.ring.unpack(k), self.ring.invertible):
            if e != 0 and not inv:
                return False
        return True

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_key in self.terms)

    def constant_value(self) -> int:
        return self.terms.get(self.ring.zero_key, 0)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self.terms.items())))
        return self._hash

    # -- inspection ----------------------------------------------------------
    def items(self) -> list[tuple[tuple[int, ...], int]]:
        """(exponent vector, coefficient) pairs, lex-descending."""
        unpack = self.ring.unpack
        return [(unpack(k), self.terms[k]) for k in sorted(self.terms, reverse=True)]

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e, _ in self.items())

    def degree_bounds(self) -> tuple[int, list[int]]:
        """(max total positive degree, per-variable max negative exponent)."""
        pos = 0
        neg = [0] * len(self.ring)
        for exps, _ in self.items():
            pos = max(pos, sum(e for e in exps if e > 0))
            for i, e in enumerate(exps):
                if -e > neg[i]:
                    neg[i] = -e
        return pos, neg

    def max_coeff_bits(self) -> int:
        return max((abs(c).bit_length() for c in self.terms.values()), default=0)

    # -- homomorphisms -------------------------------------------------------
    def evaluate(self, point: "FieldPoint") -> int:
        return evaluate_mod(self, point.values_for(self.ring), point.prime)

    def substitute(self, target: VarSpec, images: Mapping[str, "LaurentPoly | int"]) -> "LaurentPoly":
        """Ring homomorphism sending each variable to the given image in ``target``."""
        ims = []
        for v in self.ring.names:
            im = images[v]
            if isinstance(im, int):
                im = target.const(im)
            ims.append(im)
        out = target.zero()
        cache: dict[tuple[int, int], LaurentPoly] = {}
        for exps, c in self.items():
            t = target.const(c)
            for i, e in enumerate(exps):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = ims[i] ** e
                    t = t * cache[key]
            out = out + t
        return out

    # -- text ----------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.items():
            factors = []
            for v, e in zip(self.ring.names, exps):
                if e == 1:
                    factors.append(v)
                elif e:
                    factors.append(f"{v}^{e}")
            mag = abs(c)
            if factors:
                body = "*".join(factors if mag == 1 else [str(mag)] + factors)
            else:
                body = str(mag)
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"


def parse(ring: VarSpec, text: str) -> LaurentPoly:
    """Parse the canonical text form ``c*v^e*... + ...`` back into a polynomial."""
    text = text.strip()
    if text == "0":
        return ring.zero()
    # split on +/- that are not part of an exponent
    tokens = re.split(r"(?<!\^)\s*([+-])\s*", text)
    if tokens and tokens[0] == "":
        tokens = tokens[1:]
    else:
        tokens = ["+"] + tokens
    out = ring.zero()
    for sign, body in zip(tokens[0::2], tokens[1::2]):
        coeff = -1 if sign == "-" else 1
        exps = [0] * len(ring)
        for fac in body.split("*"):
            fac = fac.strip()
            if not fac:
                continue
            if fac.isdigit():
                coeff *= int(fac)
                continue
            if "^" in fac:
                v, e = fac.split("^")
                exps[ring.index(v.strip())] += int(e)
            else:
                exps[ring.index(fac)] += 1
        out = out + LaurentPoly(ring, {ring.pack(exps): coeff})
    return out


@dataclass(frozen=True)
class FieldPoint:
    """An assignment of residues mod a prime to named variables."""

    prime: int
    assignment: Mapping[str, int]

    def __post_init__(self):
        if self.prime <= 2**30:
            raise ValueError("prime must exceed 2^30")

    def values_for(self, ring: VarSpec) -> list[int]:
        vals = []
        for v, inv in zip(ring.names, ring.invertible):
            if v not in self.assignment:
                raise KeyError(f"no value assigned to {v}")
            x = self.assignment[v] % self.prime
            if inv and x == 0:
                raise ZeroDivisionError(f"invertible variable {v} assigned zero")
            vals.append(x)
        return vals

    @classmethod
    def random(cls, ring: VarSpec, rng, prime: int = DEFAULT_PRIME) -> "FieldPoint":
        # every coordinate drawn from 1..p-1 so invertible variables are never zero
        return cls(prime, {v: int(rng.integers(1, prime)) for v in ring.names})


def evaluate_mod(poly: LaurentPoly, values: Sequence[int], prime: int) -> int:
    """Image of ``poly`` in F_prime with variables set to ``values`` (ring order)."""
    total = 0
    for exps, c in poly.items():
        t = c % prime
        for v, e in zip(values, exps):
            if e:
                t = t * pow(v, e, prime) % prime
        total += t
    return total % prime


def coefficients_from_eigenvalues(us: Sequence[LaurentPoly]) -> list[LaurentPoly]:
    """Coefficients ``[a_0, ..., a_{e-1}]`` of ``X^e - sum a_k X^k = prod (X - u_j)``.

    ``a_{e-k} = (-1)^(k-1) * e_k(u_1..u_e)`` with ``e_k`` the elementary
    symmetric polynomials.
    """
    e = len(us)
    if e not in (2, 3, 4):
        raise ValueError(f"unsupported order {e}")
    ring = us[0].ring
    # elementary symmetric polynomials via prod (1 + u_j T)
    elem = [ring.one()] + [ring.zero()] * e
    for u in us:
        for k in range(e, 0, -1):
            elem[k] = elem[k] + elem[k - 1] * u
    coeffs = [ring.zero()] * e
    for k in range(1, e + 1):
        sign = 1 if (k - 1) % 2 == 0 else -1
        coeffs[e - k] = elem[k] * sign
    return coeffs
