"""Pauli strings stored as a pair of integer bitmasks plus a phase.

A string represents ``i**phase * X^x_mask * Z^z_mask`` with every X factor
ordered before every Z factor.  Qubit ``q`` is bit ``q`` of each mask, and
it is also bit ``q`` of a computational basis index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def popcount(x: int) -> int:
    return bin(x).count("1")


def parity_array(values: np.ndarray) -> np.ndarray:
    """Bit parity of every entry of an unsigned/int64 array (0 or 1)."""
    v = np.asarray(values, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.int8)


@dataclass(frozen=True)
class PauliString:
    n: int
    x_mask: int = 0
    z_mask: int = 0
    phase: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has support outside the register")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from e.g. ``"-XIZY"``; character ``j`` acts on qubit ``j``."""
        phase = 0
        if label[:2] in ("+i", "-i"):
            phase = 1 if label[0] == "+" else 3
            label = label[2:]
        elif label[:1] in ("+", "-"):
            phase = 0 if label[0] == "+" else 2
            label = label[1:]
        x = z = 0
        for q, ch in enumerate(label):
            if ch == "X":
                x |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
                phase += 1  # Y = i X Z
            elif ch != "I":
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(label), x, z, phase)

    @classmethod
    def single(cls, n: int, q: int, kind: str) -> "PauliString":
        return cls.from_label("".join(kind if j == q else "I" for j in range(n)))

    @classmethod
    def x_on(cls, n: int, mask: int) -> "PauliString":
        return cls(n, x_mask=mask)

    @classmethod
    def z_on(cls, n: int, mask: int) -> "PauliString":
        return cls(n, z_mask=mask)

    @property
    def weight(self) -> int:
        return popcount(self.x_mask | self.z_mask)

    def is_hermitian(self) -> bool:
        return (self.phase - popcount(self.x_mask & self.z_mask)) % 2 == 0

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def commutes(self, other: "PauliString") -> bool:
        sym = popcount(self.x_mask & other.z_mask) + popcount(self.z_mask & other.x_mask)
        return sym % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.x_mask, self.z_mask, self.phase + 2)

    def hermitian_sign(self) -> int:
        """+1/-1 for hermitian strings: the real sign in front of the X..Z..Y form."""
        if not self.is_hermitian():
            raise ValueError("string is not hermitian")
        k = (self.phase - popcount(self.x_mask & self.z_mask)) % 4
        return 1 if k == 0 else -1

    def label(self) -> str:
        chars = []
        for q in range(self.n):
            xb, zb = (self.x_mask >> q) & 1, (self.z_mask >> q) & 1
            chars.append("IZXY"[2 * xb + zb])
        k = (self.phase - popcount(self.x_mask & self.z_mask)) % 4
        return ["+", "+i", "-", "-i"][k] + "".join(chars)

    def __repr__(self) -> str:
        return f"PauliString({self.label()})"

    def apply_to_indices(self, idx: np.ndarray):
        """Action on basis indices: returns (target indices, complex coefficients)."""
        idx = np.asarray(idx, dtype=np.int64)
        sign = 1 - 2 * parity_array(idx & self.z_mask).astype(np.int64)
        coeff = (1j ** self.phase) * sign
        return idx ^ self.x_mask, coeff

    def apply_dense(self, vec: np.ndarray) -> np.ndarray:
        """Apply to a full ``2**n`` state vector."""
        idx = np.arange(vec.shape[0], dtype=np.int64)
        tgt, coeff = self.apply_to_indices(idx)
        out = np.empty_like(vec, dtype=np.complex128)
        out[tgt] = coeff * vec
        return out

    def to_sparse(self):
        import scipy.sparse as sp

        dim = 1 << self.n
        idx = np.arange(dim, dtype=np.int64)
        tgt, coeff = self.apply_to_indices(idx)
        return sp.csr_matrix((coeff.astype(np.complex128), (tgt, idx)), shape=(dim, dim))


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a @ b`` (operator order: a on the left)."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    # Z^{za} X^{xb} = (-1)^{|za & xb|} X^{xb} Z^{za}
    sign = 2 * popcount(a.z_mask & b.x_mask)
    return PauliString(a.n, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, a.phase + b.phase + sign)


def pauli_product(strings, n: int) -> PauliString:
    out = PauliString.identity(n)
    for s in strings:
        out = pauli_mul(out, s)
    return out
