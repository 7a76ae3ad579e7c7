"""Time evolution, Loschmidt echoes, local observables and random circuits.

Hamiltonians are either a ``SparseOperator`` acting on a basis order or a
``FlipHamiltonian`` acting on plaquette-frame order.  ``propagate`` works in
the operator's own order and hands observers native vectors; use
``to_native`` / ``from_native`` to move a ``StateVector`` across.
"""

from __future__ import annotations

import csv
import math
import weakref
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .duality import ising_to_lgt_configs
from .entanglement import Cut, decompose
from .geometry import Geometry
from .hamiltonian import CouplingConfig, SparseOperator
from .krylov import FlipHamiltonian, krylov_propagate
from .scars import ScarLabel, _chain, effective_hamiltonian, ising_seed, rung_x_mask_lgt, scar_labels, scar_patterns
from .sectors import PlaquetteFrame, SectorBasis, StateVector, z_product, z_values

DENSE_EVOLVE_CAP = 4096


@dataclass
class EchoSeries:
    times: np.ndarray
    values: np.ndarray
    meta: Dict = field(default_factory=dict)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def late_time_average(self, window: float = 0.25) -> float:
        n = len(self.values)
        start = min(n - 1, int(math.floor(n * (1.0 - window))))
        return float(np.mean(self.magnitude[start:]))

    def check(self, atol: float = 1e-12) -> None:
        if abs(self.values[0] - 1.0) > atol and self.times[0] == 0:
            raise ArithmeticError("echo at t=0 differs from 1")
        if np.max(self.magnitude) > 1 + 1e-9:
            raise ArithmeticError("echo magnitude exceeds 1")


# eigendecompositions reused across calls on the same operator
_EIG_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _eig(H: SparseOperator):
    got = _EIG_CACHE.get(H)
    if got is None:
        a = H.to_dense()
        if not np.any(np.imag(a)):
            a = a.real
        got = np.linalg.eigh(a)
        _EIG_CACHE[H] = got
    return got


def to_native(H, state: StateVector) -> np.ndarray:
    if isinstance(H, FlipHamiltonian):
        return H.frame.to_frame(state.amplitudes)
    return state.amplitudes


def from_native(H, vec: np.ndarray, basis: SectorBasis) -> StateVector:
    if isinstance(H, FlipHamiltonian):
        return StateVector(basis, H.frame.from_frame(vec))
    return StateVector(basis, vec)


def propagate(H, psi0: np.ndarray, times: Sequence[float], observer: Callable[[float, np.ndarray], None],
              method: str = "auto", krylov_m: int = 30, tol: float = 1e-10,
              dense_cap: int = DENSE_EVOLVE_CAP) -> None:
    """observer(t, exp(-iHt) psi0) for each sorted time, in H's native order."""
    dim = H.dim
    if method == "auto":
        method = "dense" if isinstance(H, SparseOperator) and dim <= dense_cap else "krylov"
    if method == "dense":
        evals, evecs = _eig(H)
        c = evecs.conj().T @ psi0
        for t in times:
            observer(float(t), evecs @ (np.exp(-1j * evals * t) * c))
    elif method == "krylov":
        krylov_propagate(H, psi0, times, observer, m=krylov_m, tol=tol)
    else:
        raise ValueError(f"unknown method {method!r}")


def evolve(H, psi0: StateVector, t: float, **kw) -> StateVector:
    out = {}
    propagate(H, to_native(H, psi0), [t], lambda _t, v: out.__setitem__("v", v), **kw)
    return from_native(H, out["v"], psi0.basis)


def loschmidt_echo(H, psi0: StateVector, times: Sequence[float], meta: Optional[dict] = None, **kw) -> EchoSeries:
    v0 = to_native(H, psi0)
    times = np.asarray(times, dtype=float)
    vals = np.empty(len(times), dtype=np.complex128)
    pos = {}

    def obs(t, v):
        i = pos.setdefault("i", 0)
        vals[i] = np.vdot(v0, v)
        pos["i"] = i + 1

    propagate(H, v0, times, obs, **kw)
    series = EchoSeries(times, vals, dict(meta or {}, kind="hamiltonian"))
    series.check(1e-9)
    return series


def scar_subspace_echo(L: int, cfg: CouplingConfig, label: ScarLabel, times: Sequence[float],
                       chunk: int = 256) -> EchoSeries:
    """Echo of a scar basis state, computed inside the 4L-dimensional span."""
    label.validate(L)
    h = effective_hamiltonian(L, cfg)
    evals, evecs = np.linalg.eigh(h)
    idx = (label.k - 1) * 4 + label.alpha - 1
    w = np.abs(evecs[idx]) ** 2
    times = np.asarray(times, dtype=float)
    vals = np.empty(len(times), dtype=np.complex128)
    for s in range(0, len(times), chunk):
        tt = times[s : s + chunk]
        vals[s : s + chunk] = np.exp(-1j * np.outer(tt, evals)) @ w
    meta = {"kind": "scar-subspace", "L": L, "g": cfg.g, "alpha": label.alpha, "k": label.k}
    return EchoSeries(times, vals, meta)


def rms_envelope(x: np.ndarray, values: np.ndarray, lo: float, hi: float, n_bins: int = 40):
    """sqrt(<|L|^2>) over logarithmic bins of x in [lo, hi]; returns (bin centers, envelope).

    The raw echo inside the scar span oscillates through near-zeros (two bands
    interfere), so power laws are fitted to this envelope.
    """
    edges = np.logspace(np.log10(lo), np.log10(hi), n_bins + 1)
    a2 = np.abs(values) ** 2
    centers, env = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        m = (x >= a) & (x < b)
        if m.any():
            centers.append(math.sqrt(a * b))
            env.append(math.sqrt(float(a2[m].mean())))
    return np.array(centers), np.array(env)


def power_law_exponent(series: EchoSeries, g: float, lo: float = 30.0, hi: Optional[float] = None,
                       n_bins: int = 40) -> float:
    """Least-squares slope of log envelope against log(g t) over [lo, hi].

    Default window: from g t = 30, past the initial band-edge transient, to
    g t = L, before the spreading amplitude wraps around the 4L-site chain.
    """
    if hi is None:
        hi = float(series.meta.get("L", 1000))
    c, env = rms_envelope(g * series.times, series.values, lo, hi, n_bins)
    return float(np.polyfit(np.log(c), np.log(env), 1)[0])


def electric_expectation(state: StateVector, link: int) -> float:
    p = np.abs(state.amplitudes) ** 2
    return float(np.dot(p, z_values(state.basis.states, link)))


def electric_trajectory(H, psi0: StateVector, links: Sequence[int], times: Sequence[float], **kw) -> np.ndarray:
    """(len(times), len(links)) array of <sigma^z_link>(t)."""
    if isinstance(H, FlipHamiltonian):
        states = H.frame.configs
    else:
        states = psi0.basis.states
    zs = np.stack([z_values(states, l) for l in links], axis=1).astype(float)
    out = []
    propagate(H, to_native(H, psi0), times, lambda t, v: out.append((np.abs(v) ** 2) @ zs), **kw)
    return np.array(out)


def entanglement_trajectory(H, psi0: StateVector, cut: Cut, times: Sequence[float], **kw) -> np.ndarray:
    """(len(times), 3) array of (S_dist, S_symm, S_total)."""
    basis = psi0.basis
    out = []

    def obs(t, v):
        st = from_native(H, v, basis)
        st = StateVector(basis, st.amplitudes / st.norm())
        d = decompose(st, cut)
        out.append((d.S_dist, d.S_symm, d.S_total))

    propagate(H, to_native(H, psi0), times, obs, **kw)
    return np.array(out)


# ---------------------------------------------------------------- random circuits


@dataclass(frozen=True)
class RandomCircuitAngles:
    """Site-uniform angles (alpha_i, beta_i, gamma_i) for each layer.

    ``cue``: Euler angles of a Haar-random SU(2), alpha and gamma uniform on
    [0, 2pi) and beta = arccos(1 - 2u) on [0, pi].  ``uniform``: all three
    uniform on [0, 2pi).
    """

    seed: int
    alphas: np.ndarray
    betas: np.ndarray
    gammas: np.ndarray
    distribution: str = "cue"

    @classmethod
    def draw(cls, seed: int, n_layers: int, distribution: str = "cue") -> "RandomCircuitAngles":
        rng = np.random.default_rng(seed)
        if distribution == "cue":
            a = rng.uniform(0, 2 * np.pi, n_layers)
            b = np.arccos(1 - 2 * rng.uniform(0, 1, n_layers))
            c = rng.uniform(0, 2 * np.pi, n_layers)
        elif distribution == "uniform":
            a, b, c = (rng.uniform(0, 2 * np.pi, n_layers) for _ in range(3))
        else:
            raise ValueError(f"unknown distribution {distribution!r}")
        return cls(seed, a, b, c, distribution)

    @property
    def n_layers(self) -> int:
        return len(self.alphas)


@dataclass
class CircuitSpace:
    """Native index space of a circuit: XOR masks for the 2L plaquette X's plus
    the two z-diagonal families sum_p Z_pZ_{p+L} and sum_p (bond terms)."""

    flip_masks: List[int]
    rung_diag: np.ndarray
    bond_diag: np.ndarray
    to_native: Callable[[np.ndarray], np.ndarray]
    from_native: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def for_basis(cls, basis: SectorBasis) -> "CircuitSpace":
        if basis.label.kind == "ising":
            L = basis.n_qubits // 2
            s = basis.states
            rung = sum(z_product(s, (1 << q) | (1 << (q + L))) for q in range(L))
            bond = sum(
                z_product(s, (1 << q) | (1 << ((q + 1) % L))) + z_product(s, (1 << (q + L)) | (1 << ((q + 1) % L + L)))
                for q in range(L)
            )
            ident = lambda v: v  # noqa: E731
            return cls([1 << q for q in range(2 * L)], rung.astype(float), bond.astype(float), ident, ident)
        geom = basis.geometry
        frame = PlaquetteFrame(basis)
        cfg = frame.configs
        L = geom.L
        rung = sum(z_values(cfg, geom.h(c, 1)) for c in range(L))
        vx = basis.label.v_x
        bond = sum(
            (vx if c == 0 else 1) * (z_values(cfg, geom.v(c, 0)) + z_values(cfg, geom.v(c, 1))) for c in range(L)
        )
        nb = frame.nbits
        masks = [1 << j for j in range(nb)] + [(1 << nb) - 1]
        return cls(masks, rung.astype(float), bond.astype(float), frame.to_frame, frame.from_frame)


def apply_layer(space: CircuitSpace, v: np.ndarray, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """exp(-i alpha rung) then exp(-i beta sum X) then exp(-i gamma bond), in that order of application."""
    v = v * np.exp(-1j * alpha * space.rung_diag)
    idx = np.arange(v.shape[0], dtype=np.int64)
    cb, sb = math.cos(beta), math.sin(beta)
    for m in space.flip_masks:
        v = cb * v - 1j * sb * v[idx ^ np.int64(m)]
    return v * np.exp(-1j * gamma * space.bond_diag)


def random_circuit_evolve(psi0: StateVector, angles: RandomCircuitAngles, s: int,
                          observer: Optional[Callable[[int, np.ndarray], None]] = None,
                          space: Optional[CircuitSpace] = None) -> StateVector:
    """Apply s layers; observer(layer, native vector) is called after each layer (and at 0)."""
    if angles.n_layers < s:
        raise ValueError("not enough angle layers")
    space = space or CircuitSpace.for_basis(psi0.basis)
    v = space.to_native(psi0.amplitudes)
    if observer:
        observer(0, v)
    for i in range(s):
        v = apply_layer(space, v, angles.alphas[i], angles.betas[i], angles.gammas[i])
        if observer:
            observer(i + 1, v)
    return StateVector(psi0.basis, space.from_native(v))


def random_circuit_echo(psi0: StateVector, angles: RandomCircuitAngles, s: int) -> EchoSeries:
    space = CircuitSpace.for_basis(psi0.basis)
    v0 = space.to_native(psi0.amplitudes)
    vals = []
    random_circuit_evolve(psi0, angles, s, lambda i, v: vals.append(np.vdot(v0, v)), space)
    meta = {"kind": "random-circuit", "seed": angles.seed, "distribution": angles.distribution}
    series = EchoSeries(np.arange(s + 1, dtype=float), np.array(vals), meta)
    series.check(1e-9)
    return series


# ---------------------------------------------------------------- initial states


def lgt_scar_support(L: int, label: ScarLabel, v_x: int = 1, v_y: int = 1):
    """(configs, amplitudes) of a gauge-side scar basis state, without a basis."""
    geom = Geometry(L, 2)
    zp, xp = scar_patterns(L, label)
    seed = int(ising_to_lgt_configs(geom, [ising_seed(L, zp)], v_x, v_y)[0])
    masks = [rung_x_mask_lgt(geom, c) for c in range(L - 1)]
    return _chain(seed, masks, xp[: L - 1])


def scar_overlaps(L: int, config: int, v_x: int = 1, v_y: int = 1) -> np.ndarray:
    """Overlap of the z-basis state |config> with every gauge-side scar basis state."""
    out = []
    for lab in scar_labels(L):
        cfgs, amps = lgt_scar_support(L, lab, v_x, v_y)
        hit = np.nonzero(cfgs == config)[0]
        out.append(amps[hit[0]] if hit.size else 0.0)
    return np.array(out)


def is_scar_pattern(L: int, geom: Geometry, config: int) -> bool:
    zp = np.array([1 - 2 * ((config >> geom.h(c, 1)) & 1) for c in range(L)])
    return any(np.array_equal(zp, scar_patterns(L, lab)[0]) for lab in scar_labels(L))


def non_scar_initial_state(basis: SectorBasis, seed: int, balanced: bool = True, max_draws: int = 100000) -> StateVector:
    """A gauge-side z-basis state whose rung pattern matches no scar pattern.

    With ``balanced`` the electric field sums to zero, so <H> = 0.  The
    overlap with every scar basis state is checked explicitly.
    """
    geom = basis.geometry
    L = geom.L
    rng = np.random.default_rng(seed)
    n = geom.n_links
    for _ in range(max_draws):
        cfg = int(basis.states[rng.integers(len(basis))])
        if balanced and bin(cfg).count("1") * 2 != n:
            continue
        if is_scar_pattern(L, geom, cfg):
            continue
        if np.max(np.abs(scar_overlaps(L, cfg, basis.label.v_x, basis.label.v_y))) > 0:
            raise ArithmeticError("pattern test and projection disagree")
        return StateVector.basis_state(basis, cfg)
    raise RuntimeError("no non-scar initial state found")


def write_trajectory_csv(path, xs, columns: Dict[str, Sequence], x_name: str = "t", comment: str = "") -> None:
    names = list(columns)
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([x_name, *names])
        for i, x in enumerate(xs):
            w.writerow([repr(float(x)), *(repr(float(columns[n][i])) for n in names)])
