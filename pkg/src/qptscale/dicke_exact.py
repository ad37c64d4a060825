"""Exact numerics for the spin-boson Hamiltonian on a truncated basis:
sparse matrix assembly, parity-resolved ground states, finite-size fidelity,
the truncation-convergence series, and exact echo curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dicke import (DickeParams, critical_coupling, fidelity_gaussian,
                    fidelity_scaling, mode_energies, scaling_eta)
from .echo import EchoSeries, _as_time_grid
from .errors import InputError, ResourceError
from .linalg import (DENSE_THRESHOLD_DEFAULT, SymmetricMatrix, eigh_dense,
                     lanczos_ground, spectral_propagate)

MAX_DIM_DEFAULT = 200_000


@dataclass(frozen=True)
class TruncatedDicke:
    """Finite-size description: n_atoms two-level atoms (collective spin
    j = n_atoms / 2) and boson levels 0 .. n_boson - 1.

    Basis index = boson_level * (n_atoms + 1) + k with k = m + j in 0..n_atoms.
    """

    n_atoms: int
    n_boson: int
    omega: float
    omega0: float
    coupling: float

    def __post_init__(self):
        if self.n_atoms < 1:
            raise InputError("n_atoms must be at least 1")
        if self.n_boson < 2:
            raise InputError("n_boson must be at least 2")
        DickeParams(self.omega, self.omega0, self.coupling)  # reuse validation

    @property
    def j(self) -> float:
        return 0.5 * self.n_atoms

    @property
    def dim(self) -> int:
        return self.n_boson * (self.n_atoms + 1)

    def index(self, boson_level: int, k: int) -> int:
        return boson_level * (self.n_atoms + 1) + k

    def params(self) -> DickeParams:
        return DickeParams(self.omega, self.omega0, self.coupling)


def build_hamiltonian(system: TruncatedDicke, *,
                      max_dim: int = MAX_DIM_DEFAULT) -> SymmetricMatrix:
    """Sparse symmetric matrix of the truncated Hamiltonian.

    Diagonal entries are omega * n + omega0 * m; the coupling connects
    (n, m) to (n +/- 1, m +/- 1) with amplitude
    (coupling / sqrt(n_atoms)) * sqrt(boson factor) * sqrt(j(j+1) - m(m +/- 1)).
    """
    if system.dim > max_dim:
        raise ResourceError(f"dim {system.dim} exceeds the memory cap {max_dim}")
    na, nb = system.n_atoms, system.n_boson
    width = na + 1
    j = system.j
    ks = np.arange(width)
    ms = ks - j
    ns = np.arange(nb)

    diag_rows = (ns[:, None] * width + ks[None, :]).ravel()
    diag_vals = (system.omega * ns[:, None] + system.omega0 * ms[None, :]).ravel()

    rows = [diag_rows]
    cols = [diag_rows]
    vals = [diag_vals]
    g = system.coupling / math.sqrt(na)
    if g:
        bos = np.sqrt(ns[:nb - 1] + 1.0)
        up = np.sqrt((j - ms[:na]) * (j + ms[:na] + 1.0))
        rows.append((ns[:nb - 1, None] * width + ks[None, :na]).ravel())
        cols.append(((ns[:nb - 1, None] + 1) * width + ks[None, :na] + 1).ravel())
        vals.append(g * (bos[:, None] * up[None, :]).ravel())
        down = np.sqrt((j + ms[1:]) * (j - ms[1:] + 1.0))
        rows.append((ns[:nb - 1, None] * width + ks[None, 1:]).ravel())
        cols.append(((ns[:nb - 1, None] + 1) * width + ks[None, 1:] - 1).ravel())
        vals.append(g * (bos[:, None] * down[None, :]).ravel())
    return SymmetricMatrix.from_upper(system.dim,
                                      np.concatenate(rows),
                                      np.concatenate(cols),
                                      np.concatenate(vals))


def parity_indices(system: TruncatedDicke) -> tuple[np.ndarray, np.ndarray]:
    """Basis indices of the even and odd blocks of (n + m + j) parity."""
    width = system.n_atoms + 1
    ns = np.arange(system.n_boson)
    ks = np.arange(width)
    par = ((ns[:, None] + ks[None, :]) % 2).ravel()
    return np.nonzero(par == 0)[0], np.nonzero(par == 1)[0]


def _block(matrix: SymmetricMatrix, idx: np.ndarray) -> SymmetricMatrix:
    pos = np.full(matrix.dim, -1, dtype=np.int64)
    pos[idx] = np.arange(idx.size)
    mask = (pos[matrix.rows] >= 0) & (pos[matrix.cols] >= 0)
    return SymmetricMatrix.from_upper(int(idx.size),
                                      pos[matrix.rows[mask]],
                                      pos[matrix.cols[mask]],
                                      matrix.vals[mask])


@dataclass(frozen=True)
class GroundState:
    """Lowest eigenpair with parity bookkeeping (vector in the full basis)."""

    energy: float
    vector: np.ndarray
    parity: str
    meta: dict


def _solve_block(sub: SymmetricMatrix, dense_threshold: int,
                 lanczos_tol: float, lanczos_seed: int):
    if sub.dim <= dense_threshold:
        e, v = eigh_dense(sub, dense_threshold=dense_threshold).ground()
        return e, v, "dense"
    e, v = lanczos_ground(sub, sub.dim, lanczos_tol, seed=lanczos_seed)
    return e, v, "lanczos"


def ground_state_exact(system: TruncatedDicke, *,
                       dense_threshold: int = DENSE_THRESHOLD_DEFAULT,
                       lanczos_tol: float = 1e-11,
                       lanczos_seed: int = 7,
                       degeneracy_tol: float = 1e-10,
                       max_dim: int = MAX_DIM_DEFAULT) -> GroundState:
    """Ground state of the truncated Hamiltonian.

    Below the critical coupling only the even parity block is solved (the
    ground state lives there); at and above it both blocks are solved, the
    global minimum is returned, and near-degeneracy of the two blocks is
    reported in the metadata.
    """
    h = build_hamiltonian(system, max_dim=max_dim)
    even, odd = parity_indices(system)
    lc = critical_coupling(system.omega, system.omega0)
    blocks = [("even", even)]
    if system.coupling >= lc:
        blocks.append(("odd", odd))
    solved = []
    for name, idx in blocks:
        sub = _block(h, idx)
        e, v, method = _solve_block(sub, dense_threshold, lanczos_tol, lanczos_seed)
        solved.append((e, v, name, idx, method, sub.dim))
    solved.sort(key=lambda item: (item[0], item[2]))
    e0, v0, name, idx, method, block_dim = solved[0]
    parity_gap = abs(solved[1][0] - solved[0][0]) if len(solved) > 1 else None
    vector = np.zeros(system.dim)
    vector[idx] = v0
    lead = int(np.argmax(np.abs(vector)))
    if vector[lead] < 0:
        vector = -vector
    meta = {
        "method": method,
        "block_dim": block_dim,
        "parity_gap": parity_gap,
        "quasi_degenerate": bool(parity_gap is not None and parity_gap < degeneracy_tol),
        "n_boson": system.n_boson,
    }
    return GroundState(energy=float(e0), vector=vector, parity=name, meta=meta)


def fidelity_exact(omega: float, omega0: float, n_atoms: int, n_boson: int,
                   lambda1: float, lambda2: float, **solver_opts) -> float:
    """|<g(lambda1)|g(lambda2)>| on a common truncated basis."""
    g1 = ground_state_exact(
        TruncatedDicke(n_atoms, n_boson, omega, omega0, lambda1), **solver_opts)
    g2 = ground_state_exact(
        TruncatedDicke(n_atoms, n_boson, omega, omega0, lambda2), **solver_opts)
    return float(abs(g1.vector @ g2.vector))


@dataclass(frozen=True)
class ConvergenceEntry:
    n_atoms: int
    n_boson: int
    lp_exact: float
    gap: float


@dataclass(frozen=True)
class ConvergenceSeries:
    """Finite-size fidelity and its distance to a thermodynamic reference."""

    entries: tuple[ConvergenceEntry, ...]
    reference: float
    target: str
    meta: dict

    def validate(self) -> None:
        sizes = [e.n_atoms for e in self.entries]
        if sizes != sorted(set(sizes)):
            raise InputError("entries must be strictly ascending in n_atoms")
        if any(e.gap < 0 for e in self.entries):
            raise InputError("gaps must be nonnegative")


def convergence_gap(omega: float, omega0: float, lambda1: float, lambda2: float,
                    n_list, *, n_boson_for=None, target: str = "scaling",
                    **solver_opts) -> ConvergenceSeries:
    """Distance D(N) = |Lp^N - Lp| between the finite-size fidelity and a
    thermodynamic-limit prediction, over ascending atom counts.

    ``target`` selects the reference: "scaling" (default) uses the ratio-only
    fidelity law, "effective" the two-mode Gaussian fidelity (shared rotation,
    exact at omega == omega0); the two references differ by ~3e-5 at the
    standard parameter set, far below the gaps resolved here.  ``n_boson_for``
    maps N to the boson cutoff; by default the cutoff equals N.
    """
    n_list = [int(n) for n in n_list]
    if n_list != sorted(set(n_list)):
        raise InputError("n_list must be strictly ascending")
    lc = critical_coupling(omega, omega0)
    pair = scaling_eta(lambda1, lambda2, lc)
    if target == "effective":
        reference = fidelity_gaussian(DickeParams(omega, omega0, lambda1),
                                      DickeParams(omega, omega0, lambda2),
                                      shared_rotation=True)
    elif target == "scaling":
        reference = fidelity_scaling(pair.eta)
    else:
        raise InputError(f"unknown convergence target {target!r}")
    entries = []
    for n in n_list:
        nb = int(n_boson_for(n)) if callable(n_boson_for) else n
        lp = fidelity_exact(omega, omega0, n, nb, lambda1, lambda2, **solver_opts)
        entries.append(ConvergenceEntry(n_atoms=n, n_boson=nb, lp_exact=lp,
                                        gap=abs(lp - reference)))
    series = ConvergenceSeries(entries=tuple(entries), reference=float(reference),
                               target=target,
                               meta={"omega": omega, "omega0": omega0,
                                     "lambda1": lambda1, "lambda2": lambda2,
                                     "eta": pair.eta, "phase": pair.phase})
    series.validate()
    return series


def echo_exact(omega: float, omega0: float, n_atoms: int, n_boson: int,
               lambda1: float, lambda2: float, t_grid, *,
               dense_threshold: int = DENSE_THRESHOLD_DEFAULT,
               **solver_opts) -> EchoSeries:
    """Exact echo |<g(lambda2)| exp(-i H(lambda1) t) |g(lambda2)>|^2.

    Needs the full spectrum of the parity block holding the initial state;
    the operation refuses block dimensions above ``dense_threshold`` instead
    of switching methods silently.  The rescaled grid uses the
    thermodynamic-limit zero-mode energy at lambda1.
    """
    t = _as_time_grid(t_grid)
    gs2 = ground_state_exact(
        TruncatedDicke(n_atoms, n_boson, omega, omega0, lambda2),
        dense_threshold=dense_threshold, **solver_opts)
    spec1 = TruncatedDicke(n_atoms, n_boson, omega, omega0, lambda1)
    even, odd = parity_indices(spec1)
    idx = even if gs2.parity == "even" else odd
    sub = _block(build_hamiltonian(spec1), idx)
    if sub.dim > dense_threshold:
        raise ResourceError(
            f"echo needs the full spectrum of a {sub.dim}-dimensional parity "
            f"block (> {dense_threshold}); reduce n_atoms or the boson cutoff")
    dec = eigh_dense(sub, dense_threshold=dense_threshold)
    psi0 = gs2.vector[idx]
    amp = spectral_propagate(dec, psi0, t)
    m = np.abs(amp) ** 2
    e1 = mode_energies(DickeParams(omega, omega0, lambda1)).e1
    lc = critical_coupling(omega, omega0)
    period = math.pi / e1 if e1 > 0 else math.inf
    meta = {
        "model": "dicke",
        "n_atoms": n_atoms,
        "n_boson": n_boson,
        "omega": omega,
        "omega0": omega0,
        "lambda1": lambda1,
        "lambda2": lambda2,
        "block": gs2.parity,
        "quasi_degenerate": gs2.meta["quasi_degenerate"],
        "scale": abs(lambda2 - lc),
        "period": period,
        "covers_period": bool(math.isfinite(period) and t[-1] >= period * (1 - 1e-12)),
    }
    return EchoSeries(t=t, tau=e1 * t, echo=m, omega1=e1, meta=meta)
