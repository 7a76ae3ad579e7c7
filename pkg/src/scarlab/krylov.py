"""Lanczos propagator for exp(-iHt)|v> and a numba plaquette-flip Hamiltonian.

The propagator builds an m-dimensional Krylov space by Lanczos, takes the largest step whose a-posteriori error
estimate ``beta * h_{m+1,m} * |[exp(-i tau T)]_{m,1}|`` stays below
``tol * tau / t_span`` and evaluates every requested time that falls inside
the step from the same Krylov basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np

from .geometry import Geometry
from .hamiltonian import CouplingConfig, link_couplings
from .sectors import PlaquetteFrame, SectorBasis, z_values


class KrylovError(ArithmeticError):
    pass


def _as_matvec(H) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(H, "matvec"):
        return H.matvec
    mat = H.matrix if hasattr(H, "matrix") else H
    return lambda v: mat @ v


def _lanczos(matvec, v, m, scale, full_reorth=False, work=None):
    """Orthonormal basis V (m' x n) and tridiagonal T plus the residual norm.

    The default is the three-term recurrence with the current and previous
    vector projected out; ``full_reorth`` adds two Gram-Schmidt passes against
    the whole basis (memory-bound, roughly 3x slower at 2^21 states).
    """
    n = v.shape[0]
    beta0 = np.linalg.norm(v)
    V = work if work is not None and work.shape == (m + 1, n) else np.empty((m + 1, n), dtype=np.complex128)
    V[0] = v / beta0
    alpha = np.zeros(m)
    beta = np.zeros(m)
    for j in range(m):
        w = matvec(V[j])
        alpha[j] = np.real(np.vdot(V[j], w))
        if full_reorth:
            for _ in range(2):
                rows = V[: j + 1]
                w = w - (rows @ w.conj()).conj() @ rows
        else:
            w -= alpha[j] * V[j]
            if j:
                w -= beta[j - 1] * V[j - 1]
            # one local correction against the two vectors just used
            w -= np.vdot(V[j], w) * V[j]
        beta[j] = np.linalg.norm(w)
        if beta[j] < 1e-13 * scale:
            # invariant subspace: the step is exact for any tau
            return V[: j + 1], alpha[: j + 1], beta[:j], 0.0, beta0
        V[j + 1] = w / beta[j]
    return V[:m], alpha, beta[: m - 1], beta[m - 1], beta0


def krylov_propagate(H, v0: np.ndarray, times: Sequence[float], observer: Callable[[float, np.ndarray], None],
                     m: int = 30, tol: float = 1e-10, max_steps: int = 100000, norm_bound: float = None,
                     full_reorth: bool = False) -> None:
    """Call ``observer(t, psi(t))`` for every sorted time in ``times``."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be sorted and non-negative")
    matvec = _as_matvec(H)
    if norm_bound is None:
        norm_bound = H.norm_bound() if hasattr(H, "norm_bound") else 1.0
    scale = max(norm_bound, 1.0)
    psi = np.asarray(v0, dtype=np.complex128).copy()
    t_now = 0.0
    t_end = float(times[-1])
    span = max(t_end, 1e-300)
    ti = 0
    while ti < len(times) and times[ti] <= 0.0:
        observer(float(times[ti]), psi.copy())
        ti += 1
    steps = 0
    work = np.empty((m + 1, psi.shape[0]), dtype=np.complex128)
    while ti < len(times):
        steps += 1
        if steps > max_steps:
            raise KrylovError(f"no convergence after {max_steps} Krylov steps at t={t_now}")
        V, a, b, resid, beta0 = _lanczos(matvec, psi, m, scale, full_reorth, work)
        mm = len(a)
        T = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
        evals, evecs = np.linalg.eigh(T)
        first = evecs[0].conj()

        def coeffs(tau):
            return evecs @ (np.exp(-1j * evals * tau) * first)

        remaining = t_end - t_now
        if resid == 0.0:
            tau = remaining
        else:
            tau = min(remaining, 3.0 * mm / scale)
            for _ in range(400):
                err = beta0 * resid * abs(coeffs(tau)[-1])
                if err <= tol * max(tau, 1e-12) / span or err <= 1e-15:
                    break
                tau *= 0.8
            else:
                raise KrylovError(f"Krylov step collapsed at t={t_now}, residual estimate {err:.2e}")
        t_next = t_now + tau
        while ti < len(times) and times[ti] <= t_next + 1e-12 * span:
            dt = float(times[ti]) - t_now
            observer(float(times[ti]), beta0 * (coeffs(dt) @ V[:mm]))
            ti += 1
        psi = beta0 * (coeffs(tau) @ V[:mm])
        t_now = t_next


def krylov_expm(H, v0: np.ndarray, t: float, **kw) -> np.ndarray:
    out = {}
    krylov_propagate(H, v0, [t], lambda tt, v: out.__setitem__("v", v), **kw)
    return out["v"]


@numba.njit(cache=True)
def _flip_matvec(x, diag, nbits, out):
    n = x.shape[0]
    full = n - 1
    for i in range(n):
        acc = diag[i] * x[i] - x[i ^ full]
        for j in range(nbits):
            acc -= x[i ^ (1 << j)]
        out[i] = acc
    return out


@dataclass
class FlipHamiltonian:
    """Gauge-side H on a PlaquetteFrame: diag(E) - sum_p (plaquette flip).

    Vectors are in frame order; ``frame.to_frame`` / ``from_frame`` convert.
    """

    frame: PlaquetteFrame
    diag: np.ndarray

    def __post_init__(self):
        self._diag_c = np.ascontiguousarray(self.diag, dtype=np.complex128)

    @classmethod
    def build(cls, geom: Geometry, basis: SectorBasis, cfg: CouplingConfig) -> "FlipHamiltonian":
        frame = PlaquetteFrame(basis)
        configs = frame.configs
        diag = np.zeros(frame.dim)
        for link, g in enumerate(link_couplings(geom, cfg)):
            if g:
                diag -= g * z_values(configs, link)
        return cls(frame, diag)

    @property
    def dim(self) -> int:
        return self.frame.dim

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.complex128)
        return _flip_matvec(x, self._diag_c, self.frame.nbits, np.empty_like(x))

    def norm_bound(self) -> float:
        return float(np.max(np.abs(self.diag))) + self.frame.nbits + 1
