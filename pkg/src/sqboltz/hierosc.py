"""Hierarchic chain of oscillators: block coordinates and quantum transfer.

A chain of 2^L equal masses is organized into nested pairs: atoms bind
into molecules with rigidity k0, molecules bind to each other with
rigidity k1.  The recursive center-of-mass / displacement coordinates

    s[j+1][i] = (s[j][2i] + s[j][2i+1]) / 2
    d[j+1][i] =  s[j][2i] - s[j][2i+1]

block-diagonalize the quadratic Hamiltonian by scale.  For the
four-particle chain (L = 2) and zero total momentum the energy splits
into one coarse mode of frequency Omega = sqrt(k1/m0) (the d[2][0]
coordinate, mass m0) and two fine modes of frequency
omega = sqrt(k0/mu0), mu0 = m0/2 (the d[1][i] coordinates):

    E = m0 d2dot^2/2 + k1 d2^2/2 + (m0/4) sum d1dot_i^2 + (k0/2) sum d1_i^2.

Connecting adjacent blocks with an extra spring tilde_k0 adds the
inter-block term

    H_ib = (tilde_k0/2) * (d2 - (d1_0 + d1_1)/2)^2,

whose second-quantized form (hbar = 1, quadrature normalization
transcribed as printed in the model definition, coefficients
(k1 m0)^(-1/4) and (k0 mu0)^(-1/4)/2) couples the coarse ladder A to
the fine ladders a_i.  Three dynamical realizations are provided:

    free          no coupling; occupations are constants of motion
    hermitian     full quadratic H_ib (or its rotating-wave reduction),
                  unitary evolution
    scale_ordered only the coarse-to-fine transfer survives, realized as
                  jump operators L_i ~ a_i^dag A with rate set by the
                  H_ib cross coefficient; evolution is a quantum-jump
                  unraveling whose ensemble mean loses coarse quanta
                  monotonically

Quantum operators are dense matrices over the product Fock basis
|n_A> x |n_0> x |n_1> truncated at n_cut per mode (coarse index varies
slowest); classical transforms support any power-of-two chain length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

EVOLVE_MODES = ("free", "hermitian", "scale_ordered")
COUPLINGS = ("full", "rwa")

# permitted occupation of any mode's top Fock level during evolution
TRUNCATION_CEILING = 1e-6


class TruncationOverflow(RuntimeError):
    """State amplitude climbed into the top Fock level of some mode."""


@dataclass(frozen=True)
class ChainSpec:
    """Masses, rigidities and Fock truncation of the hierarchic chain."""

    m0: float = 1.0
    k0: float = 1.0
    k1: float = 2.0        # k1 = 2 k0 puts the coarse mode on resonance
    tilde_k0: float = 0.1
    n_cut: int = 4

    def __post_init__(self):
        if self.m0 <= 0 or self.k0 <= 0 or self.k1 <= 0:
            raise ValueError("m0, k0 and k1 must be positive")
        if self.tilde_k0 < 0:
            raise ValueError(f"tilde_k0 must be >= 0, got {self.tilde_k0}")
        if self.n_cut < 2:
            raise ValueError(f"n_cut must be >= 2, got {self.n_cut}")

    @property
    def omega_coarse(self) -> float:
        """Frequency of the inter-molecular (coarse) mode, sqrt(k1/m0)."""
        return math.sqrt(self.k1 / self.m0)

    @property
    def omega_fine(self) -> float:
        """Frequency of the intra-molecular (fine) modes, sqrt(k0/mu0)."""
        return math.sqrt(self.k0 / (self.m0 / 2.0))


# ---------------------------------------------------------------------------
# hierarchic coordinate transforms
# ---------------------------------------------------------------------------

@dataclass
class HierCoords:
    """Pyramid of center-of-mass and displacement coordinates.

    Level j (1-based) holds arrays of length 2^(L-j); the top center of
    mass s_levels[-1] has a single entry.
    """

    s_levels: list
    d_levels: list

    def __post_init__(self):
        if len(self.s_levels) != len(self.d_levels) or not self.s_levels:
            raise ValueError("s_levels and d_levels must be parallel and non-empty")
        for lev, (s, d) in enumerate(zip(self.s_levels, self.d_levels), start=1):
            if len(s) != len(d):
                raise ValueError(f"level {lev}: s and d lengths differ")
        if len(self.s_levels[-1]) != 1:
            raise ValueError("pyramid must reduce to a single top element")

    @property
    def top(self) -> float:
        return float(self.s_levels[-1][0])

    def displacement(self, level: int, i: int = 0) -> float:
        return float(self.d_levels[level - 1][i])


def to_hierarchical(positions) -> HierCoords:
    """Recursive pairwise mean/difference transform of a 2^L vector (L >= 1)."""
    x = np.asarray(positions, dtype=float)
    n = len(x)
    if n < 2 or n & (n - 1):
        raise ValueError(f"length must be a power of two >= 2, got {n}")
    s_levels, d_levels = [], []
    cur = x
    while len(cur) > 1:
        even, odd = cur[0::2], cur[1::2]
        s_levels.append((even + odd) / 2.0)
        d_levels.append(even - odd)
        cur = s_levels[-1]
    return HierCoords(s_levels, d_levels)


def from_hierarchical(coords: HierCoords) -> np.ndarray:
    """Invert ``to_hierarchical``: top-down halving reconstruction."""
    cur = np.asarray(coords.s_levels[-1], dtype=float)
    for d in reversed(coords.d_levels):
        d = np.asarray(d, dtype=float)
        if len(d) != len(cur):
            raise ValueError("level shapes are inconsistent")
        nxt = np.empty(2 * len(cur))
        nxt[0::2] = cur + d / 2.0
        nxt[1::2] = cur - d / 2.0
        cur = nxt
    return cur


# ---------------------------------------------------------------------------
# classical four-particle energies
# ---------------------------------------------------------------------------

def _require_four(arr, name):
    a = np.asarray(arr, dtype=float)
    if a.shape != (4,):
        raise ValueError(f"{name} must hold 4 entries, got shape {a.shape}")
    return a


def classical_energy(spec: ChainSpec, positions, velocities) -> float:
    """Direct chain energy: kinetic plus the two spring families.

    Evaluated straight from particle coordinates (no hierarchic
    transform) so it can serve as the independent side of the
    decomposition identity.
    """
    x = _require_four(positions, "positions")
    v = _require_four(velocities, "velocities")
    d1_0 = x[0] - x[1]
    d1_1 = x[2] - x[3]
    d2_0 = (x[0] + x[1]) / 2.0 - (x[2] + x[3]) / 2.0
    kinetic = 0.5 * spec.m0 * float(v @ v)
    potential = 0.5 * spec.k0 * (d1_0**2 + d1_1**2) + 0.5 * spec.k1 * d2_0**2
    return kinetic + potential


def decomposed_energy(spec: ChainSpec, coords: HierCoords, velocities) -> float:
    """Scale-decomposed energy; requires zero total momentum.

    E = m0 d2dot^2/2 + k1 d2^2/2 + (m0/4) sum d1dot_i^2 + (k0/2) sum d1_i^2
    """
    v = _require_four(velocities, "velocities")
    vc = to_hierarchical(v)
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(vc.top) > 1e-12 * scale:
        raise ValueError(
            f"decomposed form assumes zero total momentum, got mean velocity {vc.top!r}")
    d1 = np.asarray(coords.d_levels[0], dtype=float)
    d2 = coords.displacement(2)
    d1dot = np.asarray(vc.d_levels[0], dtype=float)
    d2dot = vc.displacement(2)
    return (0.5 * spec.m0 * d2dot**2 + 0.5 * spec.k1 * d2**2
            + 0.25 * spec.m0 * float(d1dot @ d1dot)
            + 0.5 * spec.k0 * float(d1 @ d1))


def interblock_energy(spec: ChainSpec, coords: HierCoords) -> float:
    """Adjacent-block spring energy (tilde_k0/2)(d2 - (d1_0 + d1_1)/2)^2.

    In particle coordinates this is exactly (tilde_k0/2)(x1 - x2)^2, the
    spring bridging the two molecules.
    """
    d1 = coords.d_levels[0]
    d2 = coords.displacement(2)
    bracket = d2 - (float(d1[0]) + float(d1[1])) / 2.0
    return 0.5 * spec.tilde_k0 * bracket**2


def normal_mode_frequencies(spec: ChainSpec) -> np.ndarray:
    """Small-oscillation frequencies of the four-particle chain.

    Eigenvalues of the mass-scaled Hessian of the chain potential; the
    spectrum is {0, Omega, omega, omega} with the zero mode being the
    free center-of-mass translation.
    """
    k0, k1, m0 = spec.k0, spec.k1, spec.m0
    hess = np.zeros((4, 4))
    # intra-pair springs (x0 - x1), (x2 - x3)
    for a, b in ((0, 1), (2, 3)):
        hess[a, a] += k0
        hess[b, b] += k0
        hess[a, b] -= k0
        hess[b, a] -= k0
    # inter-pair spring on the block centers, ((x0+x1) - (x2+x3))/2
    g = np.array([0.5, 0.5, -0.5, -0.5])
    hess += k1 * np.outer(g, g)
    evals = np.linalg.eigvalsh(hess / m0)
    return np.sqrt(np.clip(evals, 0.0, None))


# ---------------------------------------------------------------------------
# truncated Fock-space operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeBasis:
    """Product basis |n_A> x |n_0> x |n_1>, coarse index slowest."""

    n_cut: int
    labels: tuple = ("A", "0", "1")

    @property
    def dim(self) -> int:
        return self.n_cut ** len(self.labels)

    def index(self, occupations) -> int:
        if len(occupations) != len(self.labels):
            raise ValueError("one occupation per mode required")
        idx = 0
        for n in occupations:
            if not 0 <= n < self.n_cut:
                raise ValueError(f"occupation {n} outside [0, {self.n_cut})")
            idx = idx * self.n_cut + int(n)
        return idx


@dataclass(frozen=True)
class FockOperator:
    """Dense operator over a ModeBasis."""

    matrix: np.ndarray
    basis: ModeBasis

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {m.shape} does not match basis dim {self.basis.dim}")

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)


def lowering_operator(n_cut: int) -> np.ndarray:
    """Single-mode annihilation matrix, a|n> = sqrt(n)|n-1>."""
    a = np.zeros((n_cut, n_cut))
    ns = np.arange(1, n_cut)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def quadrature_operator(n_cut: int) -> np.ndarray:
    """Dimensionless position quadrature xi = (a + a^dag)/sqrt(2)."""
    a = lowering_operator(n_cut)
    return (a + a.T) / math.sqrt(2.0)


def mean_square_quadrature(n_cut: int) -> np.ndarray:
    """<n|xi^2|n> for n = 0..n_cut-1 (exact n + 1/2 up to n_cut - 2)."""
    xi = quadrature_operator(n_cut)
    return np.diag(xi @ xi).copy()


def _mode_operator(op: np.ndarray, mode: int, basis: ModeBasis) -> np.ndarray:
    eye = np.eye(basis.n_cut)
    mats = [eye] * len(basis.labels)
    mats[mode] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def number_operator(basis: ModeBasis, mode: int) -> np.ndarray:
    return _mode_operator(np.diag(np.arange(basis.n_cut, dtype=float)), mode, basis)


def fock_state(basis: ModeBasis, occupations) -> np.ndarray:
    """Unit vector for the product Fock state with given occupations."""
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index(occupations)] = 1.0
    return psi


@dataclass(frozen=True)
class QuantumModel:
    """Hamiltonian (plus jump operators in scale-ordered mode)."""

    hamiltonian: FockOperator
    jumps: tuple
    basis: ModeBasis
    mode: str
    omega_coarse: float
    omega_fine: float
    coupling_rate: float = 0.0


def build_quantum_hamiltonian(spec: ChainSpec, mode: str = "free",
                              coupling: str = "full") -> QuantumModel:
    """Assemble the truncated two-scale Hamiltonian.

    mode "free" keeps only the ladder energies
    Omega (N_A + 1/2) + omega (N_0 + N_1 + 1).  mode "hermitian" adds the
    inter-block quadratic form; with coupling="rwa" only the excitation
    conserving cross terms a_i^dag A + A^dag a_i are retained (with the
    coefficient of the full form).  mode "scale_ordered" keeps the free
    part and turns the one-way coarse-to-fine channel into jump operators
    L_i = sqrt(g) a_i^dag A, g being the magnitude of the cross
    coefficient.
    """
    if mode not in EVOLVE_MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {EVOLVE_MODES}")
    if coupling not in COUPLINGS:
        raise ValueError(f"unknown coupling {coupling!r}, expected one of {COUPLINGS}")
    basis = ModeBasis(spec.n_cut)
    big_omega = spec.omega_coarse
    small_omega = spec.omega_fine

    n_a = number_operator(basis, 0)
    n_0 = number_operator(basis, 1)
    n_1 = number_operator(basis, 2)
    eye = np.eye(basis.dim)
    h_free = big_omega * (n_a + 0.5 * eye) + small_omega * (n_0 + n_1 + eye)

    a_low = lowering_operator(spec.n_cut)
    big_a = _mode_operator(a_low, 0, basis)
    a_fine = [_mode_operator(a_low, 1, basis), _mode_operator(a_low, 2, basis)]

    mu0 = spec.m0 / 2.0
    alpha = (spec.k1 * spec.m0) ** -0.25
    beta = 0.5 * (spec.k0 * mu0) ** -0.25
    g_cross = spec.tilde_k0 * alpha * beta / 4.0

    if mode == "free":
        h = h_free
        jumps = ()
        rate = 0.0
    elif mode == "hermitian":
        if coupling == "full":
            u = big_a + big_a.T
            v = sum(ai + ai.T for ai in a_fine)
            x_op = (alpha / 2.0) * u - (beta / 2.0) * v
            h = h_free + 0.5 * spec.tilde_k0 * (x_op @ x_op)
        else:
            h = h_free - g_cross * sum(ai.T @ big_a + big_a.T @ ai for ai in a_fine)
        jumps = ()
        rate = 0.0
    else:
        h = h_free
        rate = g_cross
        jumps = tuple(FockOperator(math.sqrt(rate) * (ai.T @ big_a), basis)
                      for ai in a_fine)

    return QuantumModel(hamiltonian=FockOperator(h.astype(complex), basis),
                        jumps=jumps, basis=basis, mode=mode,
                        omega_coarse=big_omega, omega_fine=small_omega,
                        coupling_rate=rate)


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

@dataclass
class EvolutionResult:
    times: np.ndarray
    occ_a: np.ndarray
    occ_0: np.ndarray
    occ_1: np.ndarray
    norm: np.ndarray
    energy: np.ndarray


def _top_level_probability(psi: np.ndarray, basis: ModeBasis) -> float:
    probs = np.abs(psi) ** 2
    shape = (basis.n_cut,) * len(basis.labels)
    cube = probs.reshape(shape)
    top = 0.0
    for axis in range(len(shape)):
        top = max(top, float(np.take(cube, basis.n_cut - 1, axis=axis).sum()))
    return top


def _check_truncation(psi: np.ndarray, basis: ModeBasis, t: float):
    top = _top_level_probability(psi, basis)
    norm2 = float(np.vdot(psi, psi).real)
    if norm2 > 0 and top / norm2 > TRUNCATION_CEILING:
        raise TruncationOverflow(
            f"top Fock level holds probability {top / norm2:.3g} at t={t:.6g}; "
            f"raise n_cut above {basis.n_cut}")


def evolve(model: QuantumModel, psi0: np.ndarray, times,
           rng: np.random.Generator | None = None, n_traj: int = 1) -> EvolutionResult:
    """Propagate psi0 over the time grid and record mode occupations.

    Unitary modes use exact eigendecomposition propagation (norm is
    preserved to machine precision).  Scale-ordered mode runs ``n_traj``
    quantum-jump trajectories with the waiting-time algorithm on a
    uniform substep grid and returns ensemble averages; the reported
    norm is the post-renormalization value 1 for every sample.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be an increasing grid with at least two points")
    psi0 = np.asarray(psi0, dtype=complex)
    norm0 = math.sqrt(float(np.vdot(psi0, psi0).real))
    if abs(norm0 - 1.0) > 1e-9:
        raise ValueError(f"initial state must be normalized, got |psi| = {norm0!r}")
    basis = model.basis
    h = model.hamiltonian.matrix
    n_ops = [number_operator(basis, m) for m in range(3)]

    if not model.jumps:
        evals, vecs = np.linalg.eigh(h)
        coef = vecs.conj().T @ psi0
        occ = np.empty((len(times), 3))
        norm = np.empty(len(times))
        energy = np.empty(len(times))
        for k, t in enumerate(times):
            psi = vecs @ (np.exp(-1j * evals * t) * coef)
            _check_truncation(psi, basis, t)
            norm[k] = math.sqrt(float(np.vdot(psi, psi).real))
            energy[k] = float(np.vdot(psi, h @ psi).real)
            for m in range(3):
                occ[k, m] = float(np.vdot(psi, n_ops[m] @ psi).real)
        return EvolutionResult(times, occ[:, 0], occ[:, 1], occ[:, 2], norm, energy)

    if rng is None:
        rng = np.random.default_rng(0)
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")

    jumps = [j.matrix for j in model.jumps]
    decay = sum(j.conj().T @ j for j in jumps)
    h_eff = h - 0.5j * decay
    max_rate = float(np.max(np.diag(decay).real))
    dt_grid = float(np.min(np.diff(times)))
    n_sub = max(1, math.ceil(dt_grid * max_rate / 0.05))
    # uniform substep; times must be commensurate with it
    dt_sub = dt_grid / n_sub
    prop = expm(-1j * h_eff * dt_sub)

    occ_sum = np.zeros((len(times), 3))
    energy_sum = np.zeros(len(times))
    for _ in range(n_traj):
        psi = psi0.copy()
        t_cur = times[0]
        for k, t in enumerate(times):
            while t_cur < t - 1e-12 * max(1.0, abs(t)):
                psi_next = prop @ psi
                stay = float(np.vdot(psi_next, psi_next).real)
                jumped = False
                if rng.random() < 1.0 - stay:
                    weights = np.array([float(np.vdot(j @ psi, j @ psi).real) for j in jumps])
                    total = weights.sum()
                    if total > 0.0:
                        pick = int(np.searchsorted(np.cumsum(weights / total),
                                                   rng.random(), side="right"))
                        psi = jumps[pick] @ psi
                        jumped = True
                if not jumped:
                    psi = psi_next
                psi = psi / math.sqrt(float(np.vdot(psi, psi).real))
                t_cur += dt_sub
            _check_truncation(psi, basis, t)
            for m in range(3):
                occ_sum[k, m] += float(np.vdot(psi, n_ops[m] @ psi).real)
            energy_sum[k] += float(np.vdot(psi, h @ psi).real)
    occ = occ_sum / n_traj
    return EvolutionResult(times, occ[:, 0], occ[:, 1], occ[:, 2],
                           np.ones(len(times)), energy_sum / n_traj)
