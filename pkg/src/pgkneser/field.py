"""Arithmetic in GF(q) for prime powers q <= 9.

Elements are the integers ``0 .. q-1``.  For an extension field GF(p^e) the
integer ``sum c_i p^i`` stands for the polynomial ``sum c_i x^i`` reduced
modulo a fixed primitive polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

MAX_Q = 9


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n**0.5) + 1))


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e`` or raise FieldError."""
    if q < 2:
        raise FieldError(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1 or not _is_prime(p):
        raise FieldError(f"q={q} is not a prime power")
    return p, e


def _poly_mulmod(a, b, modulus, p):
    # coefficient lists, lowest degree first; modulus is monic of degree e
    e = len(modulus) - 1
    out = [0] * (2 * e)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, e - 1, -1):
        c = out[k]
        if c:
            for j in range(e + 1):
                out[k - e + j] = (out[k - e + j] - c * modulus[j]) % p
    return out[:e]


def _digits(n, p, e):
    return [(n // p**i) % p for i in range(e)]


def _undigits(cs, p):
    return sum(c * p**i for i, c in enumerate(cs))


def _primitive_modulus(p: int, e: int) -> list[int]:
    """First monic degree-e polynomial (lowest coefficient first) for which x
    generates the multiplicative group."""
    order = p**e - 1
    for tail in product(range(p), repeat=e):
        modulus = list(reversed(tail)) + [1]
        if modulus[0] == 0:
            continue
        x = [0, 1] + [0] * (e - 2)
        acc = [1] + [0] * (e - 1)
        seen = set()
        for _ in range(order):
            acc = _poly_mulmod(acc, x, modulus, p)
            seen.add(tuple(acc))
        if len(seen) == order:
            return modulus
    raise FieldError(f"no primitive polynomial of degree {e} over GF({p})")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(q) with precomputed addition/multiplication tables.

    Prime fields use residues mod p directly.  Extension fields build
    exp/log tables from a primitive polynomial and derive the products from
    them.
    """

    q: int
    p: int = field(init=False)
    e: int = field(init=False)
    modulus: tuple[int, ...] = field(init=False)
    exp_table: tuple[int, ...] = field(init=False, repr=False)
    log_table: tuple[int, ...] = field(init=False, repr=False)
    add_table: np.ndarray = field(init=False, repr=False)
    mul_table: np.ndarray = field(init=False, repr=False)
    neg_table: np.ndarray = field(init=False, repr=False)
    inv_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        q = self.q
        if q > MAX_Q:
            raise FieldError(f"fields with q > {MAX_Q} are not supported (q={q})")
        p, e = prime_power(q)
        set_ = object.__setattr__
        set_(self, "p", p)
        set_(self, "e", e)

        add = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            da = _digits(a, p, e)
            for b in range(q):
                db = _digits(b, p, e)
                add[a, b] = _undigits([(x + y) % p for x, y in zip(da, db)], p)

        if e == 1:
            modulus = (0, 1)
            mul = np.fromfunction(lambda a, b: (a * b) % p, (q, q), dtype=np.int64)
            g = next(g for g in range(1, q) if len({pow(g, k, p) for k in range(q - 1)}) == q - 1)
            exp = [pow(g, k, p) for k in range(q - 1)]
        else:
            modulus = tuple(_primitive_modulus(p, e))
            exp = []
            acc = [1] + [0] * (e - 1)
            x = [0, 1] + [0] * (e - 2)
            for _ in range(q - 1):
                exp.append(_undigits(acc, p))
                acc = _poly_mulmod(acc, x, list(modulus), p)
            log = {v: k for k, v in enumerate(exp)}
            mul = np.zeros((q, q), dtype=np.int64)
            for a in range(1, q):
                for b in range(1, q):
                    mul[a, b] = exp[(log[a] + log[b]) % (q - 1)]
        log = [0] * q
        for k, v in enumerate(exp):
            log[v] = k
        neg = np.array([int(np.nonzero(add[a] == 0)[0][0]) for a in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = exp[(-log[a]) % (q - 1)]
        for t in (add, mul, neg, inv):
            t.setflags(write=False)
        set_(self, "modulus", modulus)
        set_(self, "exp_table", tuple(exp))
        set_(self, "log_table", tuple(log))
        set_(self, "add_table", add)
        set_(self, "mul_table", mul)
        set_(self, "neg_table", neg)
        set_(self, "inv_table", inv)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))

    def __repr__(self):
        return f"GF({self.q})"

    @property
    def elements(self) -> range:
        return range(self.q)

    def _check(self, *xs):
        for x in xs:
            if not 0 <= x < self.q:
                raise FieldError(f"{x} is not an element of GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add_table[a, self.neg_table[b]])

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))


@lru_cache(maxsize=None)
def gf(q: int) -> FieldSpec:
    """Shared FieldSpec instance for GF(q)."""
    return FieldSpec(q)
