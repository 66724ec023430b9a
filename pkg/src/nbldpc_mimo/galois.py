"""GF(2^m) arithmetic on the polynomial basis, backed by exp/log tables.

Field elements are integers in [0, 2^m) whose binary digits are the
coefficients of the polynomial basis representation, low-order coefficient
first.  With the default degree-3 polynomial x^3 + x + 1 the powers of the
primitive element alpha enumerate

    1 = (1,0,0), alpha = (0,1,0), alpha^2 = (0,0,1), alpha^3 = (1,1,0),
    alpha^4 = (0,1,1), alpha^5 = (1,1,1), alpha^6 = (1,0,1).

Multiplication and inversion go through the exp/log tables; addition is
bitwise XOR.  All operations accept numpy arrays and broadcast.
"""

from __future__ import annotations

import numpy as np

# One default primitive polynomial per extension degree (bitmask of the
# coefficients, constant term in bit 0).  Construction re-verifies
# primitivity, so a bad entry here cannot survive the test suite.
DEFAULT_PRIMITIVE_POLYS: dict[int, int] = {
    2: 0b111,                # x^2 + x + 1
    3: 0b1011,               # x^3 + x + 1
    4: 0b10011,              # x^4 + x + 1
    5: 0b100101,             # x^5 + x^2 + 1
    6: 0b1000011,            # x^6 + x + 1
    7: 0b10001001,           # x^7 + x^3 + 1
    8: 0b100011101,          # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,         # x^9 + x^4 + 1
    10: 0b10000001001,       # x^10 + x^3 + 1
    11: 0b100000000101,      # x^11 + x^2 + 1
    12: 0b1000001010011,     # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,    # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,   # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10001000000001011, # x^16 + x^12 + x^3 + x + 1
}


class GaloisField:
    """GF(2^m) with a fixed primitive element alpha (the polynomial x).

    Immutable after construction; all methods are pure, so one instance is
    safely shared across processes and threads.
    """

    def __init__(self, m: int, primitive_poly: int | None = None) -> None:
        if not 2 <= m <= 16:
            raise ValueError(f"field degree m={m} out of supported range [2, 16]")
        if primitive_poly is None:
            primitive_poly = DEFAULT_PRIMITIVE_POLYS[m]
        if primitive_poly.bit_length() != m + 1:
            raise ValueError(
                f"polynomial 0x{primitive_poly:x} has degree "
                f"{primitive_poly.bit_length() - 1}, expected {m}"
            )
        self.m = m
        self.q = 1 << m
        self.primitive_poly = primitive_poly
        self._exp, self._log = self._build_tables(m, primitive_poly)

    @staticmethod
    def _build_tables(m: int, poly: int) -> tuple[np.ndarray, np.ndarray]:
        q = 1 << m
        exp = np.zeros(q - 1, dtype=np.int32)
        log = np.zeros(q, dtype=np.int32)
        seen = bytearray(q)
        x = 1
        for i in range(q - 1):
            if seen[x]:
                raise ValueError(
                    f"0x{poly:x} is not primitive for m={m}: "
                    f"alpha^{i} revisits alpha^{log[x]}"
                )
            exp[i] = x
            log[x] = i
            seen[x] = 1
            x <<= 1
            if x & q:
                x ^= poly
        if x != 1:
            raise ValueError(
                f"0x{poly:x} is not primitive for m={m}: alpha^{q - 1} != 1"
            )
        return exp, log

    @property
    def alpha(self) -> int:
        """The primitive element, i.e. the polynomial x."""
        return 2

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)

    def add(self, a, b):
        """a + b (characteristic 2: bitwise XOR; also subtraction)."""
        if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
            return int(a) ^ int(b)
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        """a * b via the exp/log tables; zero absorbs.  Broadcasts."""
        if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
            if a == 0 or b == 0:
                return 0
            return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])
        a = np.asarray(a)
        b = np.asarray(b)
        prod = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a):
        """Multiplicative inverse; raises on zero."""
        if isinstance(a, (int, np.integer)):
            if a == 0:
                raise ZeroDivisionError("zero has no inverse in GF(2^m)")
            return int(self._exp[(-self._log[a]) % (self.q - 1)])
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow_alpha(self, k: int) -> int:
        """alpha^k for any integer k."""
        return int(self._exp[k % (self.q - 1)])

    def dot(self, coeffs, syms) -> int:
        """GF inner product sum_j coeffs[j] * syms[j] (XOR-accumulated)."""
        prods = self.mul(np.asarray(coeffs), np.asarray(syms))
        return int(np.bitwise_xor.reduce(np.atleast_1d(prods)))

    def bits_of(self, x: int) -> tuple[int, ...]:
        """Binary representation of x, low-order coefficient first."""
        return tuple((int(x) >> i) & 1 for i in range(self.m))

    def symbol_from_bits(self, bits) -> int:
        """Inverse of :meth:`bits_of`."""
        bits = tuple(bits)
        if len(bits) != self.m:
            raise ValueError(f"expected {self.m} bits, got {len(bits)}")
        return sum((int(b) & 1) << i for i, b in enumerate(bits))

    def mul_row(self, a: int) -> np.ndarray:
        """Vector [a*x for x in 0..q-1]; the index map used for message
        permutations in the decoder."""
        return np.asarray(self.mul(a, np.arange(self.q)), dtype=np.int64)

    def __repr__(self) -> str:
        return f"GaloisField(m={self.m}, poly=0x{self.primitive_poly:x})"


def build_field(m: int, primitive_poly: int | None = None) -> GaloisField:
    """Construct GF(2^m), validating that the polynomial is primitive."""
    return GaloisField(m, primitive_poly)
