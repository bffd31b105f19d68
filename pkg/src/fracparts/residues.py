"""Partition of the unit group mod q(q-1) into the classes Z_0, ..., Z_{q-1}.

A unit r lands in Z_k when b**r == k*r + b (mod q).  Because gcd(r, q) = 1
the class index is forced: k == (b**r - b) * r**-1 (mod q).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .numtheory import euler_phi, is_prime, multiplicative_order, units_mod


@dataclass(frozen=True, eq=False)
class ZkTable:
    b: int
    q: int
    modulus: int
    classes: tuple  # classes[k] is a sorted read-only int64 array
    lookup: np.ndarray  # residue -> k, or -1 for non-units

    def sizes(self):
        return [len(c) for c in self.classes]

    def class_of(self, r):
        k = int(self.lookup[r % self.modulus])
        if k < 0:
            raise ValueError(f"{r} is not a unit modulo {self.modulus}")
        return k

    def classify(self, values):
        """Vectorised class lookup; raises if any value is not a unit."""
        ks = self.lookup[np.asarray(values, dtype=np.int64) % self.modulus]
        if ks.size and ks.min() < 0:
            bad = np.asarray(values)[ks < 0][0]
            raise ValueError(f"{bad} is not a unit modulo {self.modulus}")
        return ks


@dataclass(frozen=True)
class Prop1Report:
    b: int
    q: int
    m_b_q: int
    phi_q_minus_1: int
    expected_zk: int
    expected_z0: int
    sizes: tuple
    total: int
    phi_modulus: int
    passed: bool

    def line(self):
        tail = sorted(set(self.sizes[1:]))
        zk = tail[0] if len(tail) == 1 else ",".join(map(str, tail))
        return (
            f"{self.b} {self.q} {self.m_b_q} {self.phi_q_minus_1} "
            f"{self.sizes[0]} {zk} {'pass' if self.passed else 'FAIL'}"
        )


def _check_base_prime(b, q):
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if q == 2 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    if gcd(b, q) != 1:
        raise ValueError(f"q = {q} divides b = {b}")


@lru_cache(maxsize=512)
def compute_zk(b, q):
    _check_base_prime(b, q)
    m = q * (q - 1)
    r = np.asarray(units_mod(m), dtype=np.int64)
    # b**r mod q depends only on r mod (q-1); r**-1 mod q only on r mod q.
    powers = np.array([pow(b, e, q) for e in range(q - 1)], dtype=np.int64)
    inverses = np.zeros(q, dtype=np.int64)
    inverses[1:] = [pow(x, -1, q) for x in range(1, q)]
    k = ((powers[r % (q - 1)] - b) % q) * inverses[r % q] % q

    lookup = np.full(m, -1, dtype=np.int64)
    lookup[r] = k
    lookup.setflags(write=False)
    classes = []
    for j in range(q):
        c = r[k == j]
        c.setflags(write=False)
        classes.append(c)
    return ZkTable(b, q, m, tuple(classes), lookup)


def m_b(b, q):
    """Number of units r mod q-1 with r == 1 (mod ord_q(b))."""
    t = multiplicative_order(b, q)
    return sum(1 for r in units_mod(q - 1) if r % t == 1 % t)


def verify_prop1(b, q):
    table = compute_zk(b, q)
    mb = m_b(b, q)
    phi = euler_phi(q - 1)
    expected_zk = phi - mb
    expected_z0 = (q - 1) * mb
    sizes = tuple(table.sizes())
    total = sum(sizes)
    phi_m = euler_phi(table.modulus)
    passed = (
        sizes[0] == expected_z0
        and all(s == expected_zk for s in sizes[1:])
        and total == phi_m
    )
    return Prop1Report(b, q, mb, phi, expected_zk, expected_z0, sizes, total, phi_m, passed)
