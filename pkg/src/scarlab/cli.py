"""Command line entry point: ``scarlab <command> [flags]``.

Every run is described by a ``RunConfig``; ``--config file.json`` loads one
and flags override it.  CSV outputs start with a ``# {json}`` line echoing
the config, so identical configs give byte-identical files.

Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import (
    DENSE_EVOLVE_CAP,
    RandomCircuitAngles,
    CircuitSpace,
    non_scar_initial_state,
    propagate,
    random_circuit_evolve,
    scar_subspace_echo,
    to_native,
    from_native,
)
from .entanglement import Cut, all_cuts, decompose, half_cut, lgt_labels, reduced_density_matrix
from .geometry import Geometry
from .hamiltonian import (
    CouplingConfig,
    DENSE_CAP,
    build_ising_hamiltonian,
    build_lgt_hamiltonian,
    ising_parity_spectrum,
    rotate_into_symmetry,
    spectrum_dense,
    spectrum_iterative,
    verify_duality,
)
from .krylov import FlipHamiltonian
from .scan import mark_degeneracies, momentum_spectrum
from .scars import (
    ScarLabel,
    check_subspace_invariance,
    effective_hamiltonian,
    projected_hamiltonian,
    scar_basis_matrix,
    scar_labels,
    scar_state,
)
from .sectors import StateVector, enumerate_ising_sector, enumerate_lgt_sector, z_values

# above this many states the uniform-coupling spectrum goes through the
# translation blocks instead of one dense eigensolve
MOMENTUM_THRESHOLD = 4096

COMMANDS = ("spectrum", "echo", "entanglement-dynamics", "observables", "verify")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "spectrum"
    L: int = 5
    k: int = 2
    g: float = 0.9
    v_x: int = 1
    v_y: int = 1
    epsilon: float = 0.0
    epsilon_site: int = 1
    side: str = "lgt"
    cut: Optional[Tuple[int, int]] = None
    times: Tuple[float, float, int] = (0.0, 100.0, 401)
    layers: int = 100
    seed: int = 0
    state: str = "scar"
    label: Tuple[int, int] = (1, 1)
    evolution: str = "hamiltonian"
    distribution: str = "cue"
    links: Optional[Tuple[int, ...]] = None
    n_eigs: int = 0
    sigma: float = 0.0
    inject_fault: bool = False
    out: Optional[str] = None
    format: str = "csv"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.L < 2 or self.k < 2:
            raise UsageError("need L >= 2 and k >= 2")
        if self.side not in ("lgt", "ising"):
            raise UsageError("side must be lgt or ising")
        if self.side == "ising" and self.k != 2:
            raise UsageError("the Ising dual exists for k = 2 only")
        if self.v_x not in (1, -1) or self.v_y not in (1, -1):
            raise UsageError("ribbon eigenvalues must be +1 or -1")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.state not in ("scar", "nonscar"):
            raise UsageError("state must be scar or nonscar")
        if self.evolution not in ("hamiltonian", "subspace", "circuit"):
            raise UsageError("evolution must be hamiltonian, subspace or circuit")
        t0, t1, n = self.times
        if n < 1 or t1 < t0 or t0 < 0:
            raise UsageError("times must be t0:t1:n with 0 <= t0 <= t1 and n >= 1")

    def coupling(self) -> CouplingConfig:
        return CouplingConfig(self.g, self.epsilon, self.epsilon_site, self.v_x, self.v_y)

    def time_grid(self) -> np.ndarray:
        t0, t1, n = self.times
        return np.linspace(t0, t1, int(n))

    def geometry(self) -> Geometry:
        return Geometry(self.L, self.k)

    def to_json(self, with_out: bool = False) -> str:
        d = asdict(self)
        if not with_out:
            # the destination is not part of the run
            d.pop("out")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        d = dict(d)
        for key in ("cut", "times", "label", "links"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def thread_count() -> int:
    return max(1, int(os.environ.get("SCARLAB_THREADS", os.cpu_count() or 1)))


def parallel_map(fn: Callable, items: Sequence) -> List:
    """Order-preserving map over a thread pool capped by SCARLAB_THREADS."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- output


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x) + 0.0)  # no negative zero


def table_text(cfg: RunConfig, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    if cfg.format == "json":
        doc = {"config": json.loads(cfg.to_json()), "columns": list(header),
               "rows": [[_fmt(v) for v in r] for r in rows]}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# {cfg.to_json()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- shared setup


def _cut(cfg: RunConfig) -> Cut:
    if cfg.cut is None:
        return half_cut(cfg.L, cfg.side, cfg.k)
    a, b = cfg.cut
    return Cut(cfg.side, cfg.L, a, b, cfg.k)


def _basis(cfg: RunConfig):
    if cfg.side == "ising":
        return enumerate_ising_sector(cfg.L)
    return enumerate_lgt_sector(cfg.geometry(), cfg.v_x, cfg.v_y)


def _scar_matrix(cfg: RunConfig, basis) -> Optional[np.ndarray]:
    """Orthonormal columns spanning the analytic scar space, if the ladder has one."""
    if cfg.k != 2:
        return None
    return scar_basis_matrix(cfg.L, cfg.side, basis)


def _initial_state(cfg: RunConfig, basis) -> StateVector:
    if cfg.state == "nonscar":
        if cfg.side != "lgt" or cfg.k != 2:
            raise UsageError("non-scar initial states are drawn on the gauge side of the ladder")
        return non_scar_initial_state(basis, cfg.seed)
    if cfg.k != 2:
        raise UsageError("scar initial states need k = 2")
    if cfg.L % 2:
        lab = ScarLabel("odd", alpha=cfg.label[0], k=cfg.label[1])
    else:
        lab = ScarLabel("even", which=cfg.label[0])
    return scar_state(cfg.L, lab, cfg.side, basis, cfg.v_x, cfg.v_y)


def _hamiltonian(cfg: RunConfig, basis):
    if cfg.side == "ising":
        return build_ising_hamiltonian(cfg.L, cfg.coupling())
    if len(basis) > DENSE_EVOLVE_CAP:
        return FlipHamiltonian.build(cfg.geometry(), basis, cfg.coupling())
    return build_lgt_hamiltonian(cfg.geometry(), basis, cfg.coupling())


def _trajectory(cfg: RunConfig, psi0: StateVector, observer: Callable[[float, StateVector], None]) -> np.ndarray:
    """Run the configured evolution; observer gets basis-order states. Returns the x axis."""
    basis = psi0.basis
    if cfg.evolution == "circuit":
        angles = RandomCircuitAngles.draw(cfg.seed, cfg.layers, cfg.distribution)
        space = CircuitSpace.for_basis(basis)
        random_circuit_evolve(psi0, angles, cfg.layers,
                              lambda s, v: observer(s, StateVector(basis, space.from_native(v))), space)
        return np.arange(cfg.layers + 1, dtype=float)
    if cfg.evolution == "subspace":
        raise UsageError("subspace evolution only yields echoes")
    H = _hamiltonian(cfg, basis)
    times = cfg.time_grid()
    propagate(H, to_native(H, psi0), times, lambda t, v: observer(t, from_native(H, v, basis)))
    return times


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg: RunConfig) -> Tuple[str, bool]:
    basis = _basis(cfg)
    cut = _cut(cfg)
    ccfg = cfg.coupling()
    if cfg.side == "ising":
        res = ising_parity_spectrum(cfg.L, ccfg, vectors=True)
        evals, evecs = res.eigenvalues, res.eigenvectors
    elif not cfg.n_eigs and not cfg.epsilon and len(basis) > MOMENTUM_THRESHOLD:
        return _momentum_spectrum(cfg, basis, cut), True
    else:
        op = build_lgt_hamiltonian(cfg.geometry(), basis, ccfg)
        if cfg.n_eigs:
            res = spectrum_iterative(op, cfg.n_eigs, cfg.sigma)
        elif len(basis) > DENSE_CAP:
            raise UsageError(f"dimension {len(basis)} exceeds the dense cap {DENSE_CAP}; pass --n-eigs")
        else:
            res = spectrum_dense(op, vectors=True)
        evals, evecs = res.eigenvalues, res.eigenvectors
    S = _scar_matrix(cfg, basis)
    if S is not None:
        proj = S @ S.conj().T
        evals, evecs, weight = rotate_into_symmetry(evals, evecs, proj)
    else:
        weight = np.zeros(len(evals))

    def row(i):
        st = StateVector(basis, evecs[:, i])
        d = decompose(st, cut)
        return [i, evals[i], d.S_dist, d.S_symm, d.S_total, weight[i] > 1 - 1e-8]

    rows = parallel_map(row, list(range(len(evals))))
    header = ["index", "energy", "S_dist", "S_symm", "S_total", "is_scar"]
    return table_text(cfg, header, rows), True


def _momentum_spectrum(cfg: RunConfig, basis, cut: Cut) -> str:
    """Full spectrum through the translation blocks; rows sorted by energy."""
    recs = momentum_spectrum(cfg.geometry(), cfg.coupling(), basis, cut, scar_basis=_scar_matrix(cfg, basis))
    recs = mark_degeneracies(list(recs))
    rows = [[i, r.energy, r.S_dist, r.S_symm, r.S_total, r.scar_weight > 1 - 1e-8] for i, r in enumerate(recs)]
    return table_text(cfg, ["index", "energy", "S_dist", "S_symm", "S_total", "is_scar"], rows)


def cmd_echo(cfg: RunConfig) -> Tuple[str, bool]:
    if cfg.evolution == "subspace":
        if cfg.L % 2 == 0 or cfg.k != 2:
            raise UsageError("the scar-subspace echo needs odd L on the two-leg ladder")
        lab = ScarLabel("odd", alpha=cfg.label[0], k=cfg.label[1])
        series = scar_subspace_echo(cfg.L, cfg.coupling(), lab, cfg.time_grid())
        xs, vals = series.times, series.values
    else:
        basis = _basis(cfg)
        psi0 = _initial_state(cfg, basis)
        v0 = psi0.amplitudes
        vals_list = []
        xs = _trajectory(cfg, psi0, lambda t, st: vals_list.append(np.vdot(v0, st.amplitudes)))
        vals = np.array(vals_list)
    rows = [[x, v.real, v.imag, abs(v)] for x, v in zip(xs, vals)]
    x_name = "s" if cfg.evolution == "circuit" else "t"
    return table_text(cfg, [x_name, "re", "im", "abs"], rows), True


def cmd_entanglement_dynamics(cfg: RunConfig) -> Tuple[str, bool]:
    basis = _basis(cfg)
    psi0 = _initial_state(cfg, basis)
    cut = _cut(cfg)
    out = []

    def obs(t, st):
        st = StateVector(basis, st.amplitudes / st.norm())
        d = decompose(st, cut)
        out.append((d.S_dist, d.S_symm, d.S_total))

    xs = _trajectory(cfg, psi0, obs)
    rows = [[x, *o] for x, o in zip(xs, out)]
    x_name = "s" if cfg.evolution == "circuit" else "t"
    return table_text(cfg, [x_name, "S_dist", "S_symm", "S_total"], rows), True


def default_links(geom: Geometry) -> Tuple[int, ...]:
    m = geom.L // 2
    return (geom.h(0, 1), geom.h(m, 1), geom.v(0, 0), geom.v(m, 0))


def cmd_observables(cfg: RunConfig) -> Tuple[str, bool]:
    if cfg.side != "lgt":
        raise UsageError("electric observables live on the gauge side")
    geom = cfg.geometry()
    basis = _basis(cfg)
    psi0 = _initial_state(cfg, basis)
    links = cfg.links or default_links(geom)
    zs = np.stack([z_values(basis.states, l) for l in links], axis=1).astype(float)
    out = []
    xs = _trajectory(cfg, psi0, lambda t, st: out.append((np.abs(st.amplitudes) ** 2) @ zs))
    names = []
    for l in links:
        c, r, kind = geom.link_coords(l)
        names.append(f"sz_{kind}_{c}_{r}")
    rows = [[x, *o] for x, o in zip(xs, out)]
    x_name = "s" if cfg.evolution == "circuit" else "t"
    return table_text(cfg, [x_name, *names], rows), True


def verify_report(cfg: RunConfig) -> Dict:
    """Aggregate the verification suites at one L; each entry has value, bound, pass."""
    from .fermions import MAX_L, fermion_report
    from .stabilizer import canonical_form, enumerate_branches, prep_scar_circuit, prep_scar_circuit_mcm, run_circuit, spec_satisfied, target_spec
    from .scars import even_scar_state

    L = cfg.L
    ccfg = cfg.coupling()
    checks: Dict[str, Dict] = {}

    def add(name, value, bound):
        checks[name] = {"value": float(value), "bound": bound, "pass": bool(value <= bound)}

    if L <= 5:
        add("duality_mismatch", verify_duality(L, cfg.g, cfg.v_x, cfg.v_y, cfg.epsilon, cfg.epsilon_site), 1e-10)
    geom = Geometry(L, 2)
    lgt_basis = enumerate_lgt_sector(geom, cfg.v_x, cfg.v_y)
    H_lgt = build_lgt_hamiltonian(geom, lgt_basis, ccfg)
    if L % 2 == 0:
        res = 0.0
        for which in (1, 2):
            st = even_scar_state(L, which, "lgt", lgt_basis)
            res = max(res, float(np.linalg.norm(H_lgt.matrix @ st.amplitudes)))
        add("even_scar_residual", res, 1e-12)
    else:
        states = [scar_state(L, lab, "lgt", lgt_basis) for lab in scar_labels(L)]
        add("scar_leakage", check_subspace_invariance(H_lgt, states), 1e-12)
        V = np.stack([s.amplitudes for s in states], axis=1)
        analytic = effective_hamiltonian(L, ccfg)
        if cfg.inject_fault:
            analytic = analytic.copy()
            analytic[0, 3] = analytic[3, 0] = -analytic[0, 3]
        add("effective_h_mismatch", np.max(np.abs(projected_hamiltonian(H_lgt, V) - analytic)), 1e-12)
        if L <= 7:
            bad = 0
            for lab in scar_labels(L):
                spec = target_spec(L, lab, cfg.v_x, cfg.v_y)
                t3, _ = run_circuit(prep_scar_circuit(L, lab, cfg.v_x, cfg.v_y))
                ref = canonical_form(t3)
                bad += not spec_satisfied(t3, spec)
                for route in ("xparity", "gauss"):
                    circ = prep_scar_circuit_mcm(L, lab, cfg.v_y, cfg.v_x, route)
                    for tb, _ in enumerate_branches(circ):
                        bad += not (spec_satisfied(tb, spec) and canonical_form(tb, range(geom.n_links)) == ref)
            add("tableau_failures", bad, 0)
        rng = np.random.default_rng(cfg.seed)
        c = rng.normal(size=V.shape[1]) + 1j * rng.normal(size=V.shape[1])
        psi = StateVector(lgt_basis, V @ (c / np.linalg.norm(c)))
        s_dist = max(decompose(psi, cut).S_dist for cut in all_cuts(L, "lgt"))
        add("scar_superposition_S_dist", s_dist, 1e-10)
    # superselection: rho_A of a bulk eigenstate has no weight between boundary labels
    if len(lgt_basis) <= DENSE_EVOLVE_CAP:
        psi = StateVector(lgt_basis, np.linalg.eigh(H_lgt.to_dense())[1][:, len(lgt_basis) // 2])
        rdm = reduced_density_matrix(psi, half_cut(L, "lgt"))
        lab = lgt_labels(rdm)
        differ = np.any(lab[:, None, :] != lab[None, :, :], axis=2)
        add("superselection_offblock", float(np.max(np.abs(rdm.matrix[differ]), initial=0.0)), 1e-12)
    if L <= min(MAX_L, 5):
        rep = fermion_report(L, ccfg)
        # the two documented conflicts are reported, not checked
        for key in sorted(set(rep) - {"commutant_full_space", "plaquette_fermion_alt_sign"}):
            add(f"fermion_{key}", rep[key], 1e-12)
    return {"config": json.loads(cfg.to_json()), "checks": checks,
            "pass": all(c["pass"] for c in checks.values())}


def cmd_verify(cfg: RunConfig) -> Tuple[str, bool]:
    report = verify_report(cfg)
    return json.dumps(report, sort_keys=True, indent=1) + "\n", report["pass"]


HANDLERS = {
    "spectrum": cmd_spectrum,
    "echo": cmd_echo,
    "entanglement-dynamics": cmd_entanglement_dynamics,
    "observables": cmd_observables,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- argument parsing


def _pair(text: str) -> Tuple[int, int]:
    a, b = text.split(",")
    return int(a), int(b)


def _times(text: str) -> Tuple[float, float, int]:
    t0, t1, n = text.split(":")
    return float(t0), float(t1), int(n)


def _ints(text: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scarlab", description="Scar numerics for the Z2 gauge ladder and its Ising dual.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON RunConfig; flags override its values")
    ap.add_argument("--L", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--g", type=float)
    ap.add_argument("--vx", dest="v_x", type=int)
    ap.add_argument("--vy", dest="v_y", type=int)
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--epsilon-site", dest="epsilon_site", type=int)
    ap.add_argument("--side", choices=("lgt", "ising"))
    ap.add_argument("--cut", type=_pair, help="a,b column range of subsystem A")
    ap.add_argument("--times", type=_times, help="t0:t1:n")
    ap.add_argument("--layers", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--state", choices=("scar", "nonscar"))
    ap.add_argument("--label", type=_pair, help="alpha,k for odd L; which,0 for even L")
    ap.add_argument("--evolution", choices=("hamiltonian", "subspace", "circuit"))
    ap.add_argument("--distribution", choices=("cue", "uniform"))
    ap.add_argument("--links", type=_ints)
    ap.add_argument("--n-eigs", dest="n_eigs", type=int)
    ap.add_argument("--sigma", type=float)
    ap.add_argument("--inject-fault", dest="inject_fault", action="store_true", default=None,
                    help="flip one analytic matrix element (control for verify)")
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("csv", "json"))
    return ap


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    base = {}
    if ns.config:
        with open(ns.config) as fh:
            base = json.load(fh)
    cfg = RunConfig.from_dict(base)
    over = {k: v for k, v in vars(ns).items() if k != "config" and v is not None}
    cfg = replace(cfg, **over)
    cfg.validate()
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as err:  # argparse usage errors
        return int(err.code) if err.code else 0
    except (UsageError, ValueError, OSError) as err:
        print(f"scarlab: {err}", file=sys.stderr)
        return 2
    try:
        text, ok = HANDLERS[cfg.command](cfg)
    except UsageError as err:
        print(f"scarlab: {err}", file=sys.stderr)
        return 2
    emit(cfg, text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
