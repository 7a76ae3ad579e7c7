"""Clifford tableau simulation with mid-circuit Z measurements, scar
preparation circuits and a brute-force stabilizer Renyi entropy.

Tableau rows are Pauli strings in the ``i**phase X^x Z^z`` convention of
``pauli.py``; with that convention every gate acts on one qubit's factor
independently, so the update rules below need no cross-qubit sign terms.

Circuit text grammar, one instruction per line (``#`` starts a comment)::

    qubits <n_data> <n_ancilla>
    H|S|X|Z <q> [if|ifnot <c>...]
    CNOT|CZ <q1> <q2> [if|ifnot <c>...]
    MZ <q> <c>

``if c1 c2`` runs the gate when the XOR of the listed classical bits is 1,
``ifnot`` when it is 0.  A classical bit is 1 for outcome -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .geometry import Geometry
from .pauli import PauliString, pauli_mul
from .scars import ScarLabel, StabilizerSpec, scar_patterns, scar_spec
from .sectors import StateVector

ONE_QUBIT = ("H", "S", "X", "Z")
TWO_QUBIT = ("CNOT", "CZ")


class MeasurementContradiction(ValueError):
    pass


# ---------------------------------------------------------------- tableau


@dataclass
class Tableau:
    """Destabilizer rows 0..n-1 and stabilizer rows n..2n-1 as (x, z, phase) lists."""

    n: int
    xs: List[int]
    zs: List[int]
    phases: List[int]

    @classmethod
    def zero_state(cls, n: int) -> "Tableau":
        xs = [1 << q for q in range(n)] + [0] * n
        zs = [0] * n + [1 << q for q in range(n)]
        return cls(n, xs, zs, [0] * (2 * n))

    def copy(self) -> "Tableau":
        return Tableau(self.n, list(self.xs), list(self.zs), list(self.phases))

    def row(self, i: int) -> PauliString:
        return PauliString(self.n, self.xs[i], self.zs[i], self.phases[i])

    def _set(self, i: int, p: PauliString) -> None:
        self.xs[i], self.zs[i], self.phases[i] = p.x_mask, p.z_mask, p.phase

    def stabilizers(self) -> List[PauliString]:
        return [self.row(i) for i in range(self.n, 2 * self.n)]

    def destabilizers(self) -> List[PauliString]:
        return [self.row(i) for i in range(self.n)]

    def check(self) -> None:
        """Symplectic frame: D_i anticommutes with S_i only; stabilizers hermitian."""
        n = self.n
        rows = [self.row(i) for i in range(2 * n)]
        for i in range(2 * n):
            for j in range(i + 1, 2 * n):
                anti = not rows[i].commutes(rows[j])
                if anti != (j == i + n):
                    raise ArithmeticError(f"rows {i}, {j} break the symplectic frame")
        if not all(s.is_hermitian() for s in rows[n:]):
            raise ArithmeticError("non-hermitian stabilizer row")


def _check_qubit(t: Tableau, q: int) -> None:
    if not 0 <= q < t.n:
        raise IndexError(f"qubit {q} outside 0..{t.n - 1}")


def _gate_rows(t: Tableau, name: str, qs: Tuple[int, ...]) -> None:
    xs, zs, ph = t.xs, t.zs, t.phases
    if name == "CZ":
        a, b = qs
        _gate_rows(t, "H", (b,))
        _gate_rows(t, "CNOT", (a, b))
        _gate_rows(t, "H", (b,))
        return
    if name == "CNOT":
        c, tg = qs
        if c == tg:
            raise ValueError("CNOT needs distinct qubits")
        for i in range(2 * t.n):
            x, z = xs[i], zs[i]
            if (x >> c) & 1:
                x ^= 1 << tg
            if (z >> tg) & 1:
                z ^= 1 << c
            xs[i], zs[i] = x, z
        return
    (q,) = qs
    bit = 1 << q
    for i in range(2 * t.n):
        x, z = xs[i] & bit, zs[i] & bit
        if name == "X":
            if z:
                ph[i] = (ph[i] + 2) % 4
        elif name == "Z":
            if x:
                ph[i] = (ph[i] + 2) % 4
        elif name == "H":
            if x and z:
                ph[i] = (ph[i] + 2) % 4
            xs[i] = (xs[i] & ~bit) | (bit if z else 0)
            zs[i] = (zs[i] & ~bit) | (bit if x else 0)
        elif name == "S":
            if x:
                ph[i] = (ph[i] + 1) % 4
                zs[i] ^= bit
        else:
            raise ValueError(f"unknown gate {name!r}")


def apply_gate(t: Tableau, name: str, *qs: int) -> Tableau:
    """Conjugate every row by a Clifford gate, in place; returns t."""
    for q in qs:
        _check_qubit(t, q)
    _gate_rows(t, name, tuple(qs))
    return t


def measure_z(t: Tableau, q: int, forced: Optional[int] = None,
              rng: Optional[np.random.Generator] = None) -> Tuple[int, Tableau]:
    """Measure Z_q in place; returns (outcome +-1, t).

    A random outcome is taken from ``forced`` when given, else from ``rng``.
    Forcing a value that contradicts a deterministic outcome raises.
    """
    _check_qubit(t, q)
    n, bit = t.n, 1 << q
    pivot = next((i for i in range(n, 2 * n) if t.xs[i] & bit), None)
    if pivot is None:
        acc = PauliString.identity(n)
        for i in range(n):
            if t.xs[i] & bit:
                acc = pauli_mul(acc, t.row(i + n))
        outcome = acc.hermitian_sign()
        if forced is not None and forced != outcome:
            raise MeasurementContradiction(f"Z_{q} is deterministically {outcome:+d}, forced {forced:+d}")
        return outcome, t
    if forced is not None:
        if forced not in (1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        outcome = forced
    else:
        rng = rng or np.random.default_rng()
        outcome = 1 if rng.integers(2) == 0 else -1
    sp = t.row(pivot)
    for i in range(2 * n):
        if i != pivot and t.xs[i] & bit:
            t._set(i, pauli_mul(t.row(i), sp))
    t._set(pivot - n, sp)
    t._set(pivot, PauliString(n, 0, bit, 0 if outcome == 1 else 2))
    return outcome, t


def stabilizer_expectation(t: Tableau, P: PauliString) -> int:
    if P.n != t.n:
        raise ValueError("size mismatch")
    n = t.n
    if any(not P.commutes(t.row(i)) for i in range(n, 2 * n)):
        return 0
    acc = PauliString.identity(n)
    for i in range(n):
        if not P.commutes(t.row(i)):
            acc = pauli_mul(acc, t.row(i + n))
    if acc.x_mask != P.x_mask or acc.z_mask != P.z_mask:
        raise ArithmeticError("commuting Pauli not generated by the stabilizers")
    k = (P.phase - acc.phase) % 4
    if k % 2:
        raise ValueError("expectation of a non-hermitian string")
    return 1 if k == 0 else -1


def canonical_form(t: Tableau, keep: Optional[Sequence[int]] = None) -> Tuple[Tuple[int, int, int], ...]:
    """Reduced row echelon form of the stabilizer group restricted to ``keep``.

    Columns of dropped qubits are eliminated first; the rows left without
    support on them generate the kept group, which must have full rank (the
    dropped qubits are in a product state).  Rows are (x, z, sign) over the
    kept qubits relabelled 0..len(keep)-1.
    """
    n = t.n
    keep = list(range(n)) if keep is None else list(keep)
    drop = [q for q in range(n) if q not in set(keep)]
    cols = [("x", q) for q in drop] + [("z", q) for q in drop]
    cols += [("x", q) for q in keep] + [("z", q) for q in keep]
    rows = t.stabilizers()
    lead = []
    r = 0
    for kind, q in cols:
        bit = 1 << q
        sel = (lambda p: p.x_mask & bit) if kind == "x" else (lambda p: p.z_mask & bit)
        piv = next((i for i in range(r, len(rows)) if sel(rows[i])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and sel(rows[i]):
                rows[i] = pauli_mul(rows[i], rows[r])
        lead.append(q in drop)
        r += 1
    kept = [p for p, dropped in zip(rows, lead) if not dropped]
    if len(kept) != len(keep):
        raise ValueError("kept qubits are entangled with the dropped ones")
    out = []
    for p in kept:
        x = sum(1 << j for j, q in enumerate(keep) if (p.x_mask >> q) & 1)
        z = sum(1 << j for j, q in enumerate(keep) if (p.z_mask >> q) & 1)
        out.append((x, z, p.hermitian_sign()))
    return tuple(out)


def tableau_to_statevector(t: Tableau, max_qubits: int = 14) -> np.ndarray:
    """Dense state stabilized by the tableau, phase fixed by the largest amplitude."""
    if t.n > max_qubits:
        raise ValueError(f"{t.n} qubits exceeds the dense cap {max_qubits}")
    rng = np.random.default_rng(12345)
    v = rng.normal(size=1 << t.n) + 1j * rng.normal(size=1 << t.n)
    for s in t.stabilizers():
        v = 0.5 * (v + s.apply_dense(v))
    v /= np.linalg.norm(v)
    return fix_phase(v)


def fix_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v) > np.max(np.abs(v)) - 1e-9))
    return v * (abs(v[i]) / v[i])


# ---------------------------------------------------------------- circuits


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: Tuple[int, ...]
    cbit: Optional[int] = None  # for MZ: classical bit written
    cond: Tuple[int, ...] = ()  # XOR of these bits ...
    cond_value: int = 1  # ... must equal this


@dataclass
class Circuit:
    n_data: int
    n_ancilla: int = 0
    gates: List[Gate] = field(default_factory=list)
    n_cbits: int = 0

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancilla

    def add(self, name: str, *qubits: int, cond: Sequence[int] = (), cond_value: int = 1) -> "Circuit":
        if name not in ONE_QUBIT + TWO_QUBIT:
            raise ValueError(f"unknown gate {name!r}")
        want = 1 if name in ONE_QUBIT else 2
        if len(qubits) != want:
            raise ValueError(f"{name} takes {want} qubits")
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"qubit {q} out of range")
        for c in cond:
            if not 0 <= c < self.n_cbits:
                raise ValueError(f"classical bit {c} is not written by an earlier measurement")
        self.gates.append(Gate(name, tuple(qubits), None, tuple(cond), cond_value))
        return self

    def measure(self, q: int) -> int:
        if not 0 <= q < self.n_qubits:
            raise IndexError(f"qubit {q} out of range")
        c = self.n_cbits
        self.gates.append(Gate("MZ", (q,), c))
        self.n_cbits += 1
        return c

    def extend(self, other: "Circuit") -> "Circuit":
        for g in other.gates:
            if g.name == "MZ":
                raise ValueError("extend only copies unitary gates")
            self.add(g.name, *g.qubits)
        return self

    @property
    def is_unitary(self) -> bool:
        return all(g.name != "MZ" for g in self.gates)

    def to_text(self) -> str:
        lines = [f"qubits {self.n_data} {self.n_ancilla}"]
        for g in self.gates:
            if g.name == "MZ":
                lines.append(f"MZ {g.qubits[0]} {g.cbit}")
                continue
            s = " ".join([g.name, *map(str, g.qubits)])
            if g.cond:
                s += (" if " if g.cond_value else " ifnot ") + " ".join(map(str, g.cond))
            lines.append(s)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        circ = None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            if line[0] == "qubits":
                circ = cls(int(line[1]), int(line[2]) if len(line) > 2 else 0)
                continue
            if circ is None:
                raise ValueError("circuit text must start with a 'qubits' line")
            if line[0] == "MZ":
                c = circ.measure(int(line[1]))
                if len(line) > 2 and int(line[2]) != c:
                    raise ValueError(f"classical bits must be numbered in order, got {line[2]}, expected {c}")
                continue
            name, rest = line[0], line[1:]
            cond, value = (), 1
            for kw in ("if", "ifnot"):
                if kw in rest:
                    at = rest.index(kw)
                    cond, value = tuple(int(c) for c in rest[at + 1 :]), int(kw == "if")
                    rest = rest[:at]
            circ.add(name, *(int(q) for q in rest), cond=cond, cond_value=value)
        if circ is None:
            raise ValueError("empty circuit text")
        return circ


def run_circuit(circ: Circuit, forced: Optional[Sequence[int]] = None,
                rng: Optional[np.random.Generator] = None,
                tableau: Optional[Tableau] = None) -> Tuple[Tableau, List[int]]:
    """Simulate from |0...0>; ``forced[i]`` is used for the i-th random measurement."""
    t = tableau.copy() if tableau is not None else Tableau.zero_state(circ.n_qubits)
    bits: List[int] = []
    n_random = 0
    for g in circ.gates:
        if g.name == "MZ":
            q = g.qubits[0]
            deterministic = not any(t.xs[i] & (1 << q) for i in range(t.n, 2 * t.n))
            f = None
            if not deterministic and forced is not None:
                f = forced[n_random]
            if not deterministic:
                n_random += 1
            outcome, _ = measure_z(t, q, f, rng)
            bits.append(0 if outcome == 1 else 1)
            continue
        if g.cond and (sum(bits[c] for c in g.cond) % 2) != g.cond_value:
            continue
        apply_gate(t, g.name, *g.qubits)
    return t, bits


def enumerate_branches(circ: Circuit) -> Iterator[Tuple[Tableau, List[int]]]:
    """Every measurement-outcome branch, depth first; random outcomes fork a copy."""
    stack = [(0, Tableau.zero_state(circ.n_qubits), [])]
    while stack:
        start, t, bits = stack.pop()
        for gi in range(start, len(circ.gates)):
            g = circ.gates[gi]
            if g.name == "MZ":
                q = g.qubits[0]
                if any(t.xs[i] & (1 << q) for i in range(t.n, 2 * t.n)):
                    other = t.copy()
                    measure_z(other, q, -1)
                    stack.append((gi + 1, other, bits + [1]))
                    measure_z(t, q, 1)
                    bits = bits + [0]
                else:
                    outcome, _ = measure_z(t, q)
                    bits = bits + [0 if outcome == 1 else 1]
                continue
            if g.cond and (sum(bits[c] for c in g.cond) % 2) != g.cond_value:
                continue
            apply_gate(t, g.name, *g.qubits)
        yield t, bits


# ---------------------------------------------------------------- dense oracle

_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
_S = np.diag([1, 1j])
_X = np.array([[0, 1], [1, 0]])
_Z = np.diag([1, -1])
_ONE = {"H": _H, "S": _S, "X": _X, "Z": _Z}


def dense_apply(vec: np.ndarray, name: str, *qs: int) -> np.ndarray:
    """Apply a gate to a dense vector; qubit q is bit q of the index."""
    n = int(round(math.log2(vec.shape[0])))
    psi = vec.reshape([2] * n)  # axis n-1-q holds qubit q
    if name in _ONE:
        ax = n - 1 - qs[0]
        psi = np.moveaxis(np.tensordot(_ONE[name], psi, axes=([1], [ax])), 0, ax)
        return psi.reshape(-1)
    idx = np.arange(vec.shape[0])
    a, b = qs
    if name == "CNOT":
        src = np.where((idx >> a) & 1, idx ^ (1 << b), idx)
        return vec[src]
    if name == "CZ":
        return vec * np.where(((idx >> a) & 1) & ((idx >> b) & 1), -1, 1)
    raise ValueError(f"unknown gate {name!r}")


def dense_run(circ: Circuit) -> np.ndarray:
    if not circ.is_unitary:
        raise ValueError("the dense oracle runs unitary circuits only")
    v = np.zeros(1 << circ.n_qubits, dtype=np.complex128)
    v[0] = 1
    for g in circ.gates:
        v = dense_apply(v, g.name, *g.qubits)
    return v


def random_clifford_circuit(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    circ = Circuit(n)
    for _ in range(depth):
        kind = rng.integers(6) if n > 1 else rng.integers(4)
        if kind < 4:
            circ.add(ONE_QUBIT[kind], int(rng.integers(n)))
        else:
            a, b = rng.choice(n, 2, replace=False)
            circ.add(TWO_QUBIT[kind - 4], int(a), int(b))
    return circ


# ---------------------------------------------------------------- scar preparation


def _links_targets(L: int, label: ScarLabel, v_y: int):
    geom = Geometry(L, 2)
    zp, xp = scar_patterns(L, label)
    zz = [int(zp[c] * zp[(c - 1) % L]) for c in range(L)]
    return geom, zp, xp, zz


def _prepare_horizontals(circ: Circuit, geom: Geometry, zp, v_y: int) -> None:
    for c in range(geom.L):
        if zp[c] == -1:
            circ.add("X", geom.h(c, 1))
        if v_y * zp[c] == -1:
            circ.add("X", geom.h(c, 0))


def _vx_rotation(circ: Circuit, geom: Geometry) -> None:
    """exp(-i pi/4 P) with P = i (X X on rung 0) V_x, which maps the rung-0 XX stabilizer to -V_x.

    P = Y_a X_b Z_{v(1,0)} ... Z_{v(L-1,0)} with a = v(0,0), b = v(0,1).
    """
    a, b = geom.v(0, 0), geom.v(0, 1)
    others = [b] + [geom.v(c, 0) for c in range(1, geom.L)]
    for _ in range(3):
        circ.add("S", a)  # S^dagger
    circ.add("H", a)
    circ.add("H", b)
    for q in others:
        circ.add("CNOT", q, a)
    circ.add("S", a)
    for q in reversed(others):
        circ.add("CNOT", q, a)
    circ.add("H", b)
    circ.add("H", a)
    circ.add("S", a)


def prep_scar_circuit(L: int, label: ScarLabel, v_x: int = 1, v_y: int = 1, fix_vx: bool = True) -> Circuit:
    """Measurement-free preparation of a gauge-side odd-L scar basis state.

    Horizontal links are set to their electric eigenvalues; each vertical rung
    pair (v(c,0), v(c,1)) becomes the Bell state with ZZ fixed by the Gauss
    laws and XX chosen so that neighbouring pairs reproduce the X X X X
    stabilizers.  That product state leaves V_x undetermined; ``fix_vx``
    appends one Pauli rotation (non-local, depth O(L)) which trades the
    rung-0 XX stabilizer for V_x.
    """
    if L % 2 == 0:
        raise ValueError("preparation circuits are for odd L")
    label.validate(L)
    geom, zp, xp, zz = _links_targets(L, label, v_y)
    circ = Circuit(geom.n_links)
    _prepare_horizontals(circ, geom, zp, v_y)
    xx = [-v_x if fix_vx else 1]
    for c in range(L - 1):
        xx.append(int(xx[-1] * xp[c]))
    for c in range(L):
        a, b = geom.v(c, 0), geom.v(c, 1)
        circ.add("H", a)
        circ.add("CNOT", a, b)
        if zz[c] == -1:
            circ.add("X", b)
        if xx[c] == -1:
            circ.add("Z", a)
    if fix_vx:
        _vx_rotation(circ, geom)
    return circ


def prep_scar_circuit_mcm(L: int, label: ScarLabel, v_y: int = 1, v_x: int = 1, route: str = "xparity") -> Circuit:
    """Preparation with L ancillas, mid-circuit measurements and feedforward.

    ``xparity``: start from the electric product state that already satisfies
    every Gauss law and V_x, measure the four-body X parities of neighbouring
    rung pairs (they commute with V_x) and repair wrong parities with Z on a
    chain of vertical links chosen from the outcome prefix parities.

    ``gauss``: start from vertical links in X eigenstates, measure each rung
    pair's Z parity and repair it with X on v(c,0), which fixes both Gauss
    laws of the rung at once; then reuse ancilla 0 to measure V_x and repair
    it with X X on rung 0.

    Both correction tables are derived, not transcribed.
    """
    if L % 2 == 0:
        raise ValueError("preparation circuits are for odd L")
    if route not in ("xparity", "gauss"):
        raise ValueError(f"unknown route {route!r}")
    label.validate(L)
    geom, zp, xp, zz = _links_targets(L, label, v_y)
    n = geom.n_links
    anc = [n + c for c in range(L)]
    circ = Circuit(n, L)
    _prepare_horizontals(circ, geom, zp, v_y)
    if route == "xparity":
        for c in range(L):
            bottom = 1 if (c == 0 and v_x == -1) else 0
            if bottom:
                circ.add("X", geom.v(c, 0))
            if bottom ^ (zz[c] == -1):
                circ.add("X", geom.v(c, 1))
        targets = [int(xp[c]) for c in range(L - 1)]
        targets.append(int(np.prod(targets)))
        bits = []
        for c in range(L):
            circ.add("H", anc[c])
            for q in (geom.v(c, 0), geom.v(c, 1), geom.v(c + 1, 0), geom.v(c + 1, 1)):
                circ.add("CNOT", anc[c], q)
            circ.add("H", anc[c])
            bits.append(circ.measure(anc[c]))
        # Z on v(d,0) flips parities d-1 and d; errors e_c = bit_c xor [target_c = -1]
        for d in range(1, L):
            const = sum(targets[c] == -1 for c in range(d)) % 2
            circ.add("Z", geom.v(d, 0), cond=bits[:d], cond_value=1 ^ const)
        return circ
    xx = [1]
    for c in range(L - 1):
        xx.append(int(xx[-1] * xp[c]))
    for c in range(L):
        a, b = geom.v(c, 0), geom.v(c, 1)
        circ.add("H", a)
        circ.add("H", b)
        if xx[c] == -1:
            circ.add("Z", b)
    bits = []
    for c in range(L):
        a, b = geom.v(c, 0), geom.v(c, 1)
        circ.add("CNOT", a, anc[c])
        circ.add("CNOT", b, anc[c])
        bits.append(circ.measure(anc[c]))
        circ.add("X", a, cond=(bits[-1],), cond_value=0 if zz[c] == -1 else 1)
    # reset ancilla 0 from its recorded outcome, then measure V_x on it
    circ.add("X", anc[0], cond=(bits[0],))
    for c in range(L):
        circ.add("CNOT", geom.v(c, 0), anc[0])
    m = circ.measure(anc[0])
    for q in (geom.v(0, 0), geom.v(0, 1)):
        circ.add("X", q, cond=(m,), cond_value=0 if v_x == -1 else 1)
    return circ


def spec_satisfied(t: Tableau, spec: StabilizerSpec) -> bool:
    """Every generator of the spec has deterministic expectation equal to its target."""
    for p, val in spec.generators:
        ext = PauliString(t.n, p.x_mask, p.z_mask, p.phase)
        if stabilizer_expectation(t, ext) != val:
            return False
    return True


def target_spec(L: int, label: ScarLabel, v_x: int = 1, v_y: int = 1) -> StabilizerSpec:
    return scar_spec(L, label, "lgt", v_x, v_y)


# ---------------------------------------------------------------- magic

SRE_MAX_QUBITS = 10


def pauli_expectations(psi: np.ndarray) -> np.ndarray:
    """|<X^x Z^z>| for all 4^n strings, indexed [x, z]."""
    dim = psi.shape[0]
    idx = np.arange(dim)
    # row x: conj(psi[j ^ x]) psi[j]; the Walsh-Hadamard transform over j gives sum_j (-1)^{z.j}
    w = np.conj(psi[idx[:, None] ^ idx[None, :]]) * psi[None, :]
    return np.abs(w @ sla.hadamard(dim))


def stabilizer_renyi_entropy_2(state, max_qubits: int = SRE_MAX_QUBITS) -> float:
    """M_2 = -log( sum_P <P>^4 / 2^n ) for a normalized dense state."""
    psi = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    dim = psi.shape[0]
    n = int(round(math.log2(dim)))
    if 1 << n != dim:
        raise ValueError("state length is not a power of two")
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the cap {max_qubits}")
    psi = psi / np.linalg.norm(psi)
    e = pauli_expectations(psi)
    return float(-np.log(np.sum(e ** 4) / dim))


def ising_dense_vector(state: StateVector) -> np.ndarray:
    """Embed a sector state into the full 2^n register."""
    out = np.zeros(1 << state.basis.n_qubits, dtype=np.complex128)
    out[state.basis.states] = state.amplitudes
    return out
