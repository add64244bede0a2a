"""Exact field backends: GF(2^k), Z/p and Q.

Every backend exposes the same small scalar API (``add``, ``mul``, ``inv``,
...) plus an array API used by the elimination routines in
:mod:`polylef.linalg`.  GF(2^k) with k <= 32 and Z/p with p < 2^31 get
vectorized numpy kernels; everything else runs on object arrays.
"""

from __future__ import annotations

import hashlib
import warnings
from fractions import Fraction
from functools import lru_cache

import numpy as np


class FieldError(ValueError):
    pass


class SmallFieldWarning(UserWarning):
    """Random specialization over a field too small for Schwartz-Zippel."""


# ---------------------------------------------------------------------------
# carry-less arithmetic on ints (GF(2)[x] packed as bits)


def clmul(a: int, b: int) -> int:
    if a < b:
        a, b = b, a
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def clmod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def _clgcd(a: int, b: int) -> int:
    while b:
        a, b = b, clmod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_gf2(f: int) -> bool:
    """Rabin's test for a polynomial over GF(2) packed as an int."""
    k = f.bit_length() - 1
    if k < 1:
        return False
    if k == 1:
        return True

    def frob(x: int, times: int) -> int:
        for _ in range(times):
            x = clmod(clmul(x, x), f)
        return x

    if frob(2, k) != 2:
        return False
    for q in _prime_factors(k):
        h = frob(2, k // q) ^ 2
        if _clgcd(f, h) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(k: int) -> int:
    """Least irreducible polynomial of degree k, ordering polynomials as ints.

    For k = 8 this is x^8 + x^4 + x^3 + x + 1 (0x11B).
    """
    if not 1 <= k <= 64:
        raise FieldError(f"GF(2^k) supported for 1 <= k <= 64, got k={k}")
    for tail in range(1, 1 << k, 2):
        f = (1 << k) | tail
        if is_irreducible_gf2(f):
            return f
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def _hash_int(*parts: object, nbytes: int = 16) -> int:
    key = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=nbytes).digest(), "big")


# ---------------------------------------------------------------------------
# base class


class Field:
    """Common scalar and array API.

    Subclasses set ``characteristic``, ``order`` (None when infinite),
    ``zero``, ``one`` and implement the scalar operations.  The array
    operations default to object-dtype loops.
    """

    characteristic: int
    order: int | None
    name: str
    dtype: object = object

    # -- scalars
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        return self.sub(self.zero, a)

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def power(self, a, e: int):
        out, base = self.one, a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def from_int(self, n: int):
        raise NotImplementedError

    def sum(self, items):
        out = self.zero
        for x in items:
            out = self.add(out, x)
        return out

    def to_json(self, a):
        return str(a)

    # -- arrays
    def array(self, values) -> np.ndarray:
        values = list(values)
        out = np.empty(len(values), dtype=object)
        out[:] = values
        return out

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(self.zero)
        return out

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def nonzero(self, a: np.ndarray) -> np.ndarray:
        if a.size == 0:
            return np.zeros(a.shape, dtype=bool)
        return np.frompyfunc(lambda x: not self.is_zero(x), 1, 1)(a).astype(bool)

    def arr_add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.frompyfunc(self.add, 2, 1)(a, b)

    def arr_sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.frompyfunc(self.sub, 2, 1)(a, b)

    def arr_mul(self, a, b) -> np.ndarray:
        return np.frompyfunc(self.mul, 2, 1)(a, b)

    def scale(self, c, v: np.ndarray) -> np.ndarray:
        return np.frompyfunc(lambda x: self.mul(c, x), 1, 1)(v)

    def outer(self, f: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.frompyfunc(self.mul, 2, 1)(f[:, None], v[None, :])

    def choose_pivot(self, column: np.ndarray) -> int:
        """Index (into ``column``) of the pivot among nonzero candidates."""
        return 0

    # -- randomness
    def element_from_key(self, *parts: object):
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.name


# ---------------------------------------------------------------------------
# GF(2^k)


class GF2k(Field):
    characteristic = 2

    def __init__(self, k: int, modulus: int | None = None):
        if not 1 <= k <= 64:
            raise FieldError(f"GF(2^k) supported for 1 <= k <= 64, got k={k}")
        self.k = k
        self.modulus = default_modulus(k) if modulus is None else modulus
        if self.modulus.bit_length() - 1 != k or not is_irreducible_gf2(self.modulus):
            raise FieldError(f"modulus {self.modulus:#x} is not irreducible of degree {k}")
        self.order = 1 << k
        self.mask = self.order - 1
        self.zero, self.one = 0, 1
        self.name = f"GF(2^{k})"
        self.vectorized = k <= 32
        if self.vectorized:
            self.dtype = np.uint64
            self._mod = np.uint64(self.modulus)

    def __eq__(self, other):
        return isinstance(other, GF2k) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("GF2k", self.modulus))

    def add(self, a, b):
        return int(a) ^ int(b)

    sub = add

    def neg(self, a):
        return int(a)

    def mul(self, a, b):
        return clmod(clmul(int(a), int(b)), self.modulus)

    def inv(self, a):
        a = int(a)
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + self.name)
        # extended Euclid in GF(2)[x]
        r0, r1, s0, s1 = self.modulus, a, 0, 1
        while r1:
            shift = r0.bit_length() - r1.bit_length()
            if shift < 0:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            r0 ^= r1 << shift
            s0 ^= s1 << shift
            if r0.bit_length() < r1.bit_length():
                r0, r1, s0, s1 = r1, r0, s1, s0
        assert r0 == 1
        return clmod(s0, self.modulus)

    def from_int(self, n: int):
        return n & 1

    def element_from_key(self, *parts):
        return _hash_int(*parts) & self.mask

    def to_json(self, a):
        return f"{int(a):#x}"

    # -- arrays
    def array(self, values):
        if not self.vectorized:
            return super().array(int(v) for v in values)
        return np.array([int(v) for v in values], dtype=np.uint64)

    def zeros(self, shape):
        if not self.vectorized:
            return super().zeros(shape)
        return np.zeros(shape, dtype=np.uint64)

    def identity(self, n):
        if not self.vectorized:
            return super().identity(n)
        return np.eye(n, dtype=np.uint64)

    def nonzero(self, a):
        if not self.vectorized:
            return super().nonzero(a)
        return a != 0

    def arr_add(self, a, b):
        if not self.vectorized:
            return super().arr_add(a, b)
        return a ^ b

    arr_sub = arr_add

    def _times_x_table(self, v: np.ndarray) -> list[np.ndarray]:
        k, mod = self.k, self._mod
        out = [v.astype(np.uint64, copy=True)]
        top = np.uint64(k)
        for _ in range(1, k):
            w = out[-1] << np.uint64(1)
            w = np.where((w >> top) & np.uint64(1) == 1, w ^ mod, w)
            out.append(w)
        return out

    def arr_mul(self, a, b):
        if not self.vectorized:
            return super().arr_mul(a, b)
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.uint64), np.asarray(b, dtype=np.uint64))
        out = np.zeros(a.shape, dtype=np.uint64)
        for j, aj in enumerate(self._times_x_table(a)):
            out ^= np.where((b >> np.uint64(j)) & np.uint64(1) == 1, aj, np.uint64(0))
        return out

    def scale(self, c, v):
        if not self.vectorized:
            return super().scale(c, v)
        return self.outer(np.array([c], dtype=np.uint64), v)[0]

    def outer(self, f, v):
        if not self.vectorized:
            return super().outer(f, v)
        f = np.asarray(f, dtype=np.uint64)
        xs = self._times_x_table(np.asarray(v, dtype=np.uint64))
        out = np.zeros((f.shape[0], xs[0].shape[0]), dtype=np.uint64)
        for pos in range(0, self.k, 4):
            width = min(4, self.k - pos)
            table = np.zeros((16, xs[0].shape[0]), dtype=np.uint64)
            for nib in range(1, 1 << width):
                low = (nib & -nib).bit_length() - 1
                table[nib] = table[nib & (nib - 1)] ^ xs[pos + low]
            idx = ((f >> np.uint64(pos)) & np.uint64(15)).astype(np.intp)
            out ^= table[idx]
        return out


# ---------------------------------------------------------------------------
# Z/p


def _is_prime(p: int) -> bool:
    from sympy import isprime

    return bool(isprime(p))


class PrimeField(Field):
    def __init__(self, p: int):
        if not (2 <= p < 1 << 61) or not _is_prime(p):
            raise FieldError(f"{p} is not a prime below 2^61")
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero, self.one = 0, 1
        self.name = f"GF({p})"
        self.vectorized = p < 1 << 31
        if self.vectorized:
            self.dtype = np.int64

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def add(self, a, b):
        return (int(a) + int(b)) % self.p

    def sub(self, a, b):
        return (int(a) - int(b)) % self.p

    def neg(self, a):
        return (-int(a)) % self.p

    def mul(self, a, b):
        return (int(a) * int(b)) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in " + self.name)
        return pow(int(a), self.p - 2, self.p)

    def from_int(self, n: int):
        return n % self.p

    def element_from_key(self, *parts):
        return _hash_int(*parts) % self.p

    def array(self, values):
        if not self.vectorized:
            return super().array(int(v) % self.p for v in values)
        return np.array([int(v) % self.p for v in values], dtype=np.int64)

    def zeros(self, shape):
        if not self.vectorized:
            out = np.empty(shape, dtype=object)
            out.fill(0)
            return out
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n):
        if not self.vectorized:
            return super().identity(n)
        return np.eye(n, dtype=np.int64)

    def nonzero(self, a):
        return np.asarray(a != 0, dtype=bool)

    def arr_add(self, a, b):
        return (a + b) % self.p

    def arr_sub(self, a, b):
        return (a - b) % self.p

    def arr_mul(self, a, b):
        return (a * b) % self.p

    def scale(self, c, v):
        return (int(c) * v) % self.p if not self.vectorized else (np.int64(c) * v) % self.p

    def outer(self, f, v):
        return (f[:, None] * v[None, :]) % self.p


# ---------------------------------------------------------------------------
# Q


class RationalField(Field):
    characteristic = 0
    order = None
    name = "QQ"

    def __init__(self):
        self.zero, self.one = Fraction(0), Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / Fraction(a)

    def from_int(self, n: int):
        return Fraction(n)

    def array(self, values):
        return super().array(Fraction(v) for v in values)

    def nonzero(self, a):
        return np.asarray(a != 0, dtype=bool)

    def arr_add(self, a, b):
        return a + b

    def arr_sub(self, a, b):
        return a - b

    def arr_mul(self, a, b):
        return a * b

    def scale(self, c, v):
        return v * c

    def outer(self, f, v):
        return np.multiply.outer(f, v)


QQ = RationalField()


def gf2k_field(k: int) -> GF2k:
    return _gf2k_cached(k)


@lru_cache(maxsize=None)
def _gf2k_cached(k: int) -> GF2k:
    return GF2k(k)


def prime_field(p: int) -> PrimeField:
    return PrimeField(p)


def warn_if_small(field: Field, bound_bits: int = 16) -> None:
    if field.order is not None and field.order < 1 << bound_bits:
        warnings.warn(
            f"random specialization over {field.name} (size {field.order}) is "
            "degenerate-prone; Schwartz-Zippel bounds are vacuous",
            SmallFieldWarning,
            stacklevel=3,
        )
