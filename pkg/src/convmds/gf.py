"""Exact arithmetic in GF(p) and GF(p^m).

Elements are plain integers in ``[0, q)``: the base-p digits of an element
(little-endian) are the coefficients of its representing polynomial in the
field generator, so for ``m == 1`` the code is just the residue mod p.

Small fields (q <= 2**16) use log/antilog tables; larger ones fall back to
direct polynomial arithmetic, which is enough for the handful of minors the
explicit power-of-two construction needs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TABLE_LIMIT = 1 << 16
MAX_FIELD_SIZE = 1 << 20


class FieldError(ValueError):
    """Invalid field parameters or an illegal field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p), little-endian coefficient lists -----------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, f, p)


def _ppowmod(a: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial f over GF(p) (little-endian)."""
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    # x^(p^m) == x mod f
    xp = x
    for _ in range(m):
        xp = _ppowmod(xp, p, f, p)
    if _trim([(c - d) % p for c, d in _zip_pad(xp, x)]):
        return False
    for r in prime_factors(m):
        xp = x
        for _ in range(m // r):
            xp = _ppowmod(xp, p, f, p)
        diff = _trim([(c - d) % p for c, d in _zip_pad(xp, x)])
        if len(_pgcd(list(f), diff, p)) != 1:
            return False
    return True


def is_primitive_poly(f: Sequence[int], p: int) -> bool:
    """True when f is irreducible and x generates the multiplicative group."""
    if not is_irreducible(f, p):
        return False
    q1 = p ** (len(f) - 1) - 1
    x = [0, 1]
    if _ppowmod(x, q1, f, p) != [1]:
        return False
    return all(_ppowmod(x, q1 // r, f, p) != [1] for r in prime_factors(q1))


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def poly_code(coeffs: Sequence[int], p: int) -> int:
    return sum(c * p**i for i, c in enumerate(coeffs))


def code_poly(value: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        value, d = divmod(value, p)
        out.append(d)
    return out


@functools.lru_cache(maxsize=None)
def smallest_primitive_poly(p: int, m: int) -> tuple[int, ...]:
    """Primitive monic polynomial of degree m with the smallest integer code.

    The code of c_0 + c_1 x + ... + x^m is sum(c_i p^i), so the ordering
    compares the highest coefficients first.
    """
    base = p**m
    for low in range(1, base):
        f = code_poly(low, p, m) + [1]
        if f[0] == 0:
            continue
        if is_primitive_poly(f, p):
            return tuple(f)
    raise FieldError(f"no primitive polynomial of degree {m} over GF({p})")


def primitive_polys(p: int, m: int) -> list[tuple[int, ...]]:
    """All primitive monic polynomials of degree m over GF(p), in code order."""
    out = []
    for low in range(1, p**m):
        f = code_poly(low, p, m) + [1]
        if f[0] and is_primitive_poly(f, p):
            out.append(tuple(f))
    return out


# -- the field ----------------------------------------------------------------

class GF:
    """The finite field GF(p^m) with integer-coded elements.

    >>> F = GF(2, 4, (1, 1, 0, 0, 1))
    >>> F.mul(2, 8)   # alpha * alpha^3 = alpha + 1
    3
    """

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None):
        if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
            raise FieldError(f"characteristic {p!r} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        p, m = int(p), int(m)
        self.p, self.m, self.q = p, m, p**m
        if self.q > MAX_FIELD_SIZE:
            raise FieldError(f"GF({p}^{m}) exceeds the supported size 2^20")
        if m == 1:
            self.modulus: tuple[int, ...] | None = None
        elif modulus is None:
            self.modulus = smallest_primitive_poly(p, m)
        else:
            f = tuple(int(c) % p for c in modulus)
            if len(f) != m + 1 or f[-1] != 1:
                raise FieldError(f"modulus must be monic of degree {m}")
            if not is_irreducible(f, p):
                raise FieldError(f"modulus {f} is reducible over GF({p})")
            self.modulus = f
        self._mod_int = poly_code(self.modulus, p) if self.modulus else p
        self._tables = self.q <= TABLE_LIMIT
        if self._tables:
            self._build_tables()
        self.primitive = self._find_primitive()

    # construction helpers

    def _times_x(self, a: int) -> int:
        p, m = self.p, self.m
        if p == 2:
            a <<= 1
            if a >> m:
                a ^= self._mod_int
            return a
        d = code_poly(a, p, m)
        top = d[-1]
        d = [0] + d[:-1]
        if top:
            d = [(c - top * f) % p for c, f in zip(d, self.modulus)]
        return poly_code(d, p)

    def _build_tables(self):
        q, p, m = self.q, self.p, self.m
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        if m == 1:
            g = next(g for g in range(1, p) if self._order_mod_p(g) == p - 1) if p > 2 else 1
            x = 1
            for i in range(q - 1):
                exp[i] = x
                log[x] = i
                x = x * g % p
        else:
            # generate with x; if x is not primitive (user modulus) fall back
            x = 1
            seen = 0
            for i in range(q - 1):
                if log[x] != -1:
                    break
                exp[i] = x
                log[x] = i
                seen += 1
                x = self._times_x(x)
            if seen != q - 1:
                g = self._slow_primitive()
                log[:] = -1
                x = 1
                for i in range(q - 1):
                    exp[i] = x
                    log[x] = i
                    x = self._poly_mul(x, g)
        exp[q - 1 : 2 * (q - 1)] = exp[: q - 1]
        self._exp, self._log = exp, log
        self._exp_l, self._log_l = exp.tolist(), log.tolist()
        if p > 2 and m > 1:
            digits = np.array([code_poly(a, p, m) for a in range(q)], dtype=np.int64)
            self._digits = digits
            self._weights = p ** np.arange(m, dtype=np.int64)

    def _order_mod_p(self, g: int) -> int:
        x, k = g % self.p, 1
        while x != 1:
            x = x * g % self.p
            k += 1
        return k

    def _slow_primitive(self) -> int:
        for g in range(2, self.q):
            if self._has_full_order(g, self._poly_pow):
                return g
        raise FieldError("no primitive element found")

    def _has_full_order(self, g: int, powf) -> bool:
        q1 = self.q - 1
        if powf(g, q1) != 1:
            return False
        return all(powf(g, q1 // r) != 1 for r in prime_factors(q1))

    def _find_primitive(self) -> int:
        if self.q == 2:
            return 1
        for g in range(2, self.q):
            if self._has_full_order(g, self.pow):
                return g
        raise FieldError("no primitive element found")

    # direct polynomial arithmetic (used above the table limit)

    def _poly_mul(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        if m == 1:
            return a * b % p
        if p == 2:
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
            mod = self._mod_int
            for s in range(r.bit_length() - 1, m - 1, -1):
                if r >> s & 1:
                    r ^= mod << (s - m)
            return r
        prod = _pmulmod(code_poly(a, p, m), code_poly(b, p, m), self.modulus, p)
        return poly_code(prod, p)

    def _poly_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._poly_mul(result, a)
            a = self._poly_mul(a, a)
            e >>= 1
        return result

    # scalar arithmetic

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        da, db = code_poly(a, self.p, self.m), code_poly(b, self.p, self.m)
        return poly_code([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return poly_code([-x % self.p for x in code_poly(a, self.p, self.m)], self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._tables:
            return self._exp_l[self._log_l[a] + self._log_l[b]]
        return self._poly_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        if self._tables:
            return self._exp_l[(self.q - 1 - self._log_l[a]) % (self.q - 1)]
        return self._poly_pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self._tables:
            return self._exp_l[self._log_l[a] * e % (self.q - 1)]
        return self._poly_pow(a, e % (self.q - 1))

    def alpha_pow(self, e: int) -> int:
        """primitive_element ** e."""
        return self.pow(self.primitive, e)

    def elements(self) -> range:
        return range(self.q)

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    # vectorised arithmetic on integer arrays

    def add_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        s = (self._digits[a] + self._digits[b]) % self.p
        return s @ self._weights

    def mul_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        if not self._tables:
            return np.vectorize(self.mul, otypes=[np.int64])(a, b)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def matmul(self, u: np.ndarray, M: np.ndarray) -> np.ndarray:
        """Row vectors ``u`` (N x r) times matrix ``M`` (r x s) over the field."""
        u = np.asarray(u, dtype=np.int64)
        M = np.asarray(M, dtype=np.int64)
        if self.m == 1:
            return (u @ M) % self.p
        out = np.zeros((u.shape[0], M.shape[1]), dtype=np.int64)
        for i in range(M.shape[0]):
            out = self.add_arr(out, self.mul_arr(u[:, i : i + 1], M[i][None, :]))
        return out

    # descriptive

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus) if self.modulus else None}

    @classmethod
    def from_dict(cls, d: dict) -> "GF":
        return cls(d["p"], d.get("m", 1), d.get("modulus"))

    def pretty(self, a: int) -> str:
        """Render an element as a polynomial in a (the class of x)."""
        if self.m == 1:
            return str(a)
        terms = []
        for i, c in reversed(list(enumerate(code_poly(a, self.p, self.m)))):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "a" if i == 1 else f"a^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) or "0"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"


def field_create(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> GF:
    return GF(p, m, modulus)


@dataclass(frozen=True)
class FieldElement:
    """A field value bound to its field, for operator-style arithmetic."""

    field: GF
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise FieldError(f"{self.value} is not an element code of {self.field}")

    def _other(self, b) -> int:
        if isinstance(b, FieldElement):
            if b.field != self.field:
                raise FieldError("operands belong to different fields")
            return b.value
        return FieldElement(self.field, int(b)).value

    def __add__(self, b):
        return FieldElement(self.field, self.field.add(self.value, self._other(b)))

    def __sub__(self, b):
        return FieldElement(self.field, self.field.sub(self.value, self._other(b)))

    def __mul__(self, b):
        return FieldElement(self.field, self.field.mul(self.value, self._other(b)))

    def __truediv__(self, b):
        return FieldElement(self.field, self.field.div(self.value, self._other(b)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.value))

    __radd__ = __add__
    __rmul__ = __mul__

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value


_OPS = ("add", "sub", "mul", "div", "inv", "pow")


def field_arith(a: FieldElement, b: FieldElement | int | None, op: str) -> FieldElement:
    """Apply ``op`` to field elements; ``b`` is the exponent for ``pow``."""
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}")
    if op == "inv":
        return a.inv()
    if op == "pow":
        return a ** int(b)
    if isinstance(b, FieldElement) and b.field != a.field:
        raise FieldError("operands belong to different fields")
    return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}[op](b)


def as_field_matrix(F: GF, rows: Iterable[Iterable[int]]) -> np.ndarray:
    M = np.array([[int(x) for x in r] for r in rows], dtype=np.int64)
    if M.size and (M.min() < 0 or M.max() >= F.q):
        raise FieldError(f"matrix entries must be element codes of {F}")
    return M
