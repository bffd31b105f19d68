"""Integer primitives: modular arithmetic, primes, totient, orders, unit groups."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
import threading

import numpy as np

MAX_MODULUS = 2**63 - 1

# Deterministic for every n < 2**64 (Jim Sinclair's base set).
_MR_BASES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
# The first 13 primes are a deterministic base set below 3.3e24.
_MR_BASES_WIDE = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

DEFAULT_SEGMENT = 1 << 18


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} is not reduced modulo {self.modulus}")


@dataclass(frozen=True)
class PrimeList:
    """All primes up to ``limit`` as a read-only int64 array."""

    limit: int
    primes: np.ndarray

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    def __contains__(self, n):
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)


def _check_modulus(m):
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    if m > MAX_MODULUS:
        raise ValueError(f"modulus {m} exceeds 2**63 - 1")


def mod_mul(a, b, m):
    """Return ``a*b mod m``; Python ints make the 128-bit intermediate implicit."""
    _check_modulus(m)
    return (a * b) % m


def mod_exp(base, exponent, m):
    """Return ``base**exponent mod m`` (square-and-multiply, via built-in pow)."""
    _check_modulus(m)
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(base, exponent, m)


def powmod_array(base, exponents, moduli):
    """Vectorised ``base**e mod m`` for int arrays with every modulus < 2**32.

    Products of two residues stay below 2**64, so plain uint64 arithmetic
    is exact.  Larger moduli fall back to scalar ``pow``.
    """
    e = np.asarray(exponents, dtype=np.int64)
    m = np.asarray(moduli, dtype=np.int64)
    if e.shape != m.shape:
        raise ValueError("exponents and moduli must have the same shape")
    if e.size == 0:
        return np.zeros(0, dtype=np.int64)
    if m.min() < 1:
        raise ValueError("moduli must be >= 1")
    if e.min() < 0:
        raise ValueError("exponents must be nonnegative")
    if m.max() >= 2**32:
        return np.array([pow(base, int(x), int(n)) for x, n in zip(e, m)], dtype=np.int64)

    mu = m.astype(np.uint64)
    eu = e.astype(np.uint64)
    result = np.ones_like(mu) % mu
    if 0 <= base < 2**63:
        sq = np.uint64(base) % mu
    else:
        sq = np.array([base % int(n) for n in m], dtype=np.uint64)
    one = np.uint64(1)
    for bit in range(int(e.max()).bit_length()):
        odd = ((eu >> np.uint64(bit)) & one).astype(bool)
        result = np.where(odd, (result * sq) % mu, result)
        sq = (sq * sq) % mu
    return result.astype(np.int64)


def is_prime(n):
    """Deterministic Miller-Rabin; exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES_64 if n < 2**64 else _MR_BASES_WIDE
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _small_sieve(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags)


def sieve_primes(limit, segment=DEFAULT_SEGMENT):
    """Segmented sieve of Eratosthenes over odd numbers.

    Memory besides the output is O(sqrt(limit) + segment).
    """
    if limit < 2:
        return PrimeList(max(limit, 0), _freeze(np.zeros(0, dtype=np.int64)))
    if segment < 2:
        raise ValueError("segment size must be >= 2")
    base = _small_sieve(isqrt(limit))[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    span = 2 * segment
    low = 3
    while low <= limit:
        high = min(low + span, limit + 1)
        odd = np.ones((high - low + 1) // 2, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            if start % 2 == 0:
                start += p
            odd[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(odd).astype(np.int64))
        low = high if high % 2 else high + 1
    return PrimeList(limit, _freeze(np.concatenate(chunks)))


def _freeze(a):
    a.setflags(write=False)
    return a


_cache_lock = threading.Lock()
_cached = None


def primes_upto(limit):
    """Primes <= limit, served from a process-wide sieve that only grows."""
    global _cached
    with _cache_lock:
        if _cached is None or _cached.limit < limit:
            grow = max(limit, 2 * _cached.limit if _cached is not None else 0, 1 << 16)
            _cached = sieve_primes(grow)
        arr = _cached.primes
    return arr[: np.searchsorted(arr, limit, side="right")]


def factorize(n):
    """Prime factorisation by trial division as {prime: exponent}."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n):
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def multiplicative_order(b, q):
    """Least t >= 1 with b**t == 1 (mod q), for a prime q not dividing b.

    Starts from q - 1 and strips prime factors while the power stays 1.
    """
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if gcd(b, q) != 1:
        raise ValueError(f"gcd({b}, {q}) != 1; order undefined")
    t = q - 1
    for f in factorize(q - 1):
        while t % f == 0 and pow(b, t // f, q) == 1:
            t //= f
    return t


def units_mod(m):
    """Sorted residues in [0, m) coprime to m.  By convention units_mod(1) == [0]."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    if m == 1:
        return [0]
    r = np.arange(m, dtype=np.int64)
    return np.flatnonzero(np.gcd(r, m) == 1).tolist()
