"""Binary collision kernel with quantized one-way energy transfer.

Molecules are hard spheres carrying an internal harmonic mode.  A
collision may move kinetic energy into the internal modes in integer
quanta only; the transferred count N is drawn with probability
proportional to g(N) = N + 1, the number of ways to split N quanta
between the two partner oscillators.  The reverse channel is closed:
internal quanta are never converted back to kinetic energy by a
collision (they relax radiatively instead), so excitation levels never
decrease and the sampled kinetic energy is non-increasing.

All quantities are in reduced units with hbar = 1, so the energy quantum
of a mode of frequency omega is just omega.  Randomness is always an
explicit numpy Generator argument; every function is pure given the
generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# relative shrink applied per enforcement iteration, a few ulp
_SHRINK = 1.0 - 2.0**-48
_MAX_SHRINK_ITERS = 80


@dataclass
class Particle:
    """State of one molecule: position, momentum, excitation level."""

    x: np.ndarray
    p: np.ndarray
    n: int

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.x.shape != (3,) or self.p.shape != (3,):
            raise ValueError("x and p must be 3-vectors")
        if not (np.isfinite(self.x).all() and np.isfinite(self.p).all()):
            raise ValueError("particle state must be finite")
        if self.n < 0:
            raise ValueError(f"excitation level must be >= 0, got {self.n}")


@dataclass(frozen=True)
class TransferDistribution:
    """Probabilities of transferring N = 0..N_eff quanta in one collision."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("transfer probabilities must sum to 1")

    @property
    def n_eff(self) -> int:
        return len(self.probs) - 1

    def sample(self, rng: np.random.Generator) -> int:
        """Draw a transferred-quanta count."""
        return int(np.searchsorted(np.cumsum(self.probs), rng.random(), side="right"))


@dataclass(frozen=True)
class CollisionOutcome:
    p_out: np.ndarray       # post-collision momentum of particle a
    p1_out: np.ndarray      # post-collision momentum of particle b
    n_out: int
    n1_out: int
    quanta_transferred: int


def delta_q(p, p1, p_prime, p1_prime, mass: float) -> float:
    """Kinetic energy released by the pair, (p^2 + p1^2 - p'^2 - p1'^2)/2m.

    Antisymmetric under swapping the primed and unprimed momentum sets.
    """
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    p, p1 = np.asarray(p, float), np.asarray(p1, float)
    pp, p1p = np.asarray(p_prime, float), np.asarray(p1_prime, float)
    # grouped so the swap (p, p1) <-> (p', p1') negates the result exactly
    return ((p @ p + p1 @ p1) - (pp @ pp + p1p @ p1p)) / (2.0 * mass)


def relative_kinetic_energy(p, p1, mass: float) -> float:
    """Kinetic energy of relative motion, |p - p1|^2 / (4m).

    This is the part of the pair's kinetic energy available in a
    momentum-conserving collision; it is invariant under common boosts.
    """
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    q = (np.asarray(p, float) - np.asarray(p1, float)) / 2.0
    return (q @ q) / mass


def transfer_distribution(e_rel: float, omega: float, n_max: int) -> TransferDistribution:
    """Distribution of the transferred quanta count N.

    N is capped both by the configured n_max and by how many whole quanta
    fit into the relative kinetic energy: N_eff = min(n_max,
    floor(e_rel/omega)).  P(N) = (N+1) / sum_{M<=N_eff} (M+1).
    """
    if e_rel < 0:
        raise ValueError(f"relative kinetic energy must be >= 0, got {e_rel}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    n_eff = min(n_max, int(math.floor(e_rel / omega)))
    weights = np.arange(1, n_eff + 2, dtype=float)
    return TransferDistribution(weights / weights.sum())


def partition_quanta(n_quanta: int, rng: np.random.Generator) -> tuple[int, int]:
    """Split N quanta between the two partners.

    Each of the N+1 ordered compositions (0,N), (1,N-1), ..., (N,0) is
    drawn with equal probability.
    """
    if n_quanta < 0:
        raise ValueError(f"n_quanta must be >= 0, got {n_quanta}")
    dn_a = int(rng.integers(0, n_quanta + 1))
    return dn_a, n_quanta - dn_a


def isotropic_unit_vector(rng: np.random.Generator) -> np.ndarray:
    """Uniform random direction on the unit sphere."""
    z = 2.0 * rng.random() - 1.0
    phi = 2.0 * math.pi * rng.random()
    s = math.sqrt(max(0.0, 1.0 - z * z))
    return np.array([s * math.cos(phi), s * math.sin(phi), z])


def pair_kinetic(pa: np.ndarray, pb: np.ndarray, mass: float) -> float:
    # fixed evaluation order so ledger deltas are reproducible
    return (pa @ pa + pb @ pb) / (2.0 * mass)


def sample_collision(a: Particle, b: Particle, mass: float, omega: float,
                     n_max: int, rng: np.random.Generator) -> CollisionOutcome:
    """Sample one hard-sphere collision with quantized energy absorption.

    Kinematics are resolved in the center-of-mass frame: the transferred
    count N is drawn from ``transfer_distribution`` of the relative
    kinetic energy, the quanta are split by ``partition_quanta``, and the
    remaining relative kinetic energy is re-emitted along an isotropic
    random direction.  Total momentum is conserved by construction,
    levels never decrease, and the pair's kinetic energy never increases
    (enforced against round-off so energy monotonicity holds exactly).
    """
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    p_tot = a.p + b.p
    half = p_tot / 2.0
    q = (a.p - b.p) / 2.0
    e_rel = (q @ q) / mass
    ke_in = pair_kinetic(a.p, b.p, mass)

    n_quanta = transfer_distribution(e_rel, omega, n_max).sample(rng)
    dn_a, dn_b = partition_quanta(n_quanta, rng)

    e_rel_out = max(0.0, e_rel - n_quanta * omega)
    q_out = math.sqrt(mass * e_rel_out) * isotropic_unit_vector(rng)
    p_out = half + q_out
    p1_out = half - q_out

    # shave off round-off so the sampled pair never gains kinetic energy
    target = ke_in - n_quanta * omega
    for _ in range(_MAX_SHRINK_ITERS):
        if pair_kinetic(p_out, p1_out, mass) <= target:
            break
        q_out = q_out * _SHRINK
        p_out = half + q_out
        p1_out = half - q_out
    if pair_kinetic(p_out, p1_out, mass) > ke_in:
        # ulp-scale grazing contact: fall back to the identity outcome
        return CollisionOutcome(a.p.copy(), b.p.copy(), a.n, b.n, 0)

    return CollisionOutcome(p_out, p1_out, a.n + dn_a, b.n + dn_b, n_quanta)


def sample_collision_reversible(a: Particle, b: Particle, mass: float, omega: float,
                                n_max: int, rng: np.random.Generator) -> CollisionOutcome:
    """Detailed-balance control variant: internal quanta may flow back.

    The pair's pooled energy (relative kinetic plus internal) is
    redistributed by resampling the joint internal content M with weight
    g(M) = M + 1 over all levels reachable within the transfer cap, then
    splitting M uniformly.  This symmetric kernel restores detailed
    balance and is used by the engine when the one-way ordering rule is
    switched off; it is not part of the irreversible model proper.
    """
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    p_tot = a.p + b.p
    half = p_tot / 2.0
    q = (a.p - b.p) / 2.0
    e_rel = (q @ q) / mass

    m_in = a.n + b.n
    pool = e_rel + m_in * omega
    m_hi = min(m_in + n_max, int(math.floor(pool / omega)))
    m_lo = max(0, m_in - n_max)
    if m_hi < m_lo:           # cap excludes even the current content
        m_hi = m_lo = min(m_in, int(math.floor(pool / omega)))
    weights = np.arange(m_lo + 1, m_hi + 2, dtype=float)
    m_new = m_lo + int(np.searchsorted(np.cumsum(weights / weights.sum()),
                                       rng.random(), side="right"))
    n_out = int(rng.integers(0, m_new + 1))
    n1_out = m_new - n_out

    e_rel_out = max(0.0, pool - m_new * omega)
    q_out = math.sqrt(mass * e_rel_out) * isotropic_unit_vector(rng)
    p_out = half + q_out
    p1_out = half - q_out
    return CollisionOutcome(p_out, p1_out, n_out, n1_out, m_new - m_in)
