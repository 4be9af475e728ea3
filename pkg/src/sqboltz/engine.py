"""Stochastic particle engine for the semi-quantum gas.

Time-steps an ensemble of molecules under free flight in a constant
force field, randomized binary hard-sphere collisions (with quantized
one-way kinetic-to-internal energy transfer), and radiative level
jumps against a photon bath.  The gas lives in a periodic cube and is
treated as well mixed: positions are advected and wrapped but do not
gate collision partner choice.

Reduced units throughout: hbar = kB = 1, so the internal energy quantum
equals the configured omega and temperatures are energies.  Defaults
m = 1, box_length = 1.  ``UnitScales`` converts to and from the
physical CGS quantities used by the rate formulas.

Splitting order within a step is fixed: free flight, then collisions,
then radiation.  The energy ledger is updated incrementally with the
exact per-event deltas, which makes the kinetic-energy record
monotonically non-increasing under the ordering rule (force and
radiation off) with no round-off leakage; consistency between the
ledger and the particle arrays is asserted at every emitted sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import collision as col
from .constants import HBAR, K_BOLTZMANN
from .spectro import RADIATION_MODES, ladder_generator

CSV_HEADER = "t,e_kin,e_int,e_rad,e_pump,mean_n,temp_kin,entropy"

# relative tolerance for ledger-vs-particles consistency at samples
LEDGER_RTOL = 1e-9


class ConfigurationError(ValueError):
    """A run configuration violates a startup invariant."""


class LedgerError(RuntimeError):
    """The energy ledger drifted away from the particle arrays."""


@dataclass(frozen=True)
class UnitScales:
    """Conversion factors between reduced and physical (CGS) units."""

    mass_g: float
    length_cm: float
    time_s: float

    @property
    def energy_erg(self) -> float:
        return self.mass_g * self.length_cm**2 / self.time_s**2

    @classmethod
    def for_molecule(cls, mass_g: float, omega_rad_s: float) -> "UnitScales":
        """Natural oscillator units: quantum hbar*omega -> 1, 1/omega -> 1.

        The implied length scale is the oscillator length
        sqrt(hbar / (m omega)), which makes reduced hbar equal 1.
        """
        return cls(mass_g=mass_g,
                   length_cm=math.sqrt(HBAR / (mass_g * omega_rad_s)),
                   time_s=1.0 / omega_rad_s)

    def energy_to_reduced(self, erg: float) -> float:
        return erg / self.energy_erg

    def energy_from_reduced(self, e: float) -> float:
        return e * self.energy_erg

    def rate_to_reduced(self, per_s: float) -> float:
        return per_s * self.time_s

    def rate_from_reduced(self, r: float) -> float:
        return r / self.time_s

    def temperature_to_reduced(self, kelvin: float) -> float:
        return K_BOLTZMANN * kelvin / self.energy_erg

    def temperature_from_reduced(self, t: float) -> float:
        return t * self.energy_erg / K_BOLTZMANN


@dataclass(frozen=True)
class GasConfig:
    """Full description of one simulation run (reduced units)."""

    n_particles: int
    steps: int
    dt: float
    seed: int = 0
    box_length: float = 1.0
    r0: float = 0.0                    # 0 disables collisions entirely
    mass: float = 1.0
    omega: float = 1.0                 # internal quantum (hbar = 1)
    n_max: int = 1                     # transfer cap per collision
    force: tuple = (0.0, 0.0, 0.0)
    ordering_rule: bool = True
    radiation_mode: str = "off"
    bath_temperature: float = 1.0
    a_spont: float = 1.0               # reduced spontaneous 1->0 rate
    n_levels: int = 16                 # radiative ladder truncation
    init_temperature: float = 1.0      # Maxwellian initial momenta

    def __post_init__(self):
        if self.n_particles < 2:
            raise ConfigurationError(f"n_particles must be >= 2, got {self.n_particles}")
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise ConfigurationError(f"steps must be >= 0, got {self.steps}")
        if self.box_length <= 4.0 * self.r0:
            raise ConfigurationError(
                f"box_length must exceed 4*r0, got {self.box_length} <= {4 * self.r0}")
        if self.mass <= 0 or self.omega <= 0:
            raise ConfigurationError("mass and omega must be positive")
        if self.radiation_mode not in RADIATION_MODES:
            raise ConfigurationError(
                f"unknown radiation_mode {self.radiation_mode!r}, expected one of {RADIATION_MODES}")
        if self.bath_temperature <= 0 or self.init_temperature <= 0:
            raise ConfigurationError("temperatures must be positive")
        if self.n_max < 0 or self.n_levels < 2:
            raise ConfigurationError("n_max must be >= 0 and n_levels >= 2")
        if len(self.force) != 3:
            raise ConfigurationError("force must be a 3-vector")
        object.__setattr__(self, "force", tuple(float(f) for f in self.force))
        if self.radiation_mode != "off":
            kappa = radiation_generator(self)
            fastest = float(np.max(-np.diag(kappa)))
            if fastest * self.dt >= 0.1:
                raise ConfigurationError(
                    f"radiative rate * dt must stay below 0.1, got {fastest * self.dt:.3g}")

    @property
    def sigma(self) -> float:
        """Hard-sphere cross-section pi*(2 r0)^2."""
        return math.pi * (2.0 * self.r0) ** 2


def radiation_generator(config: GasConfig) -> np.ndarray:
    """Reduced-unit ladder generator for the configured bath."""
    a = config.a_spont
    k = a / math.expm1(config.omega / config.bath_temperature)
    return ladder_generator(a, k, config.n_levels, config.radiation_mode)


@dataclass
class EnergyLedger:
    """Running energy totals; balance() is a run invariant."""

    e_kin: float = 0.0
    e_int: float = 0.0
    e_rad: float = 0.0     # cumulative photon energy emitted
    e_pump: float = 0.0    # cumulative bath energy absorbed
    e_work: float = 0.0    # cumulative work by the external force
    balance0: float = 0.0

    def balance(self) -> float:
        return self.e_kin + self.e_int + self.e_rad - self.e_pump - self.e_work

    def drift(self) -> float:
        """Relative departure of balance() from its initial value."""
        return abs(self.balance() - self.balance0) / max(1.0, abs(self.balance0))


@dataclass
class SimState:
    """Ensemble arrays plus ledger, clock and the randomness stream."""

    x: np.ndarray          # (N, 3) positions
    p: np.ndarray          # (N, 3) momenta
    n: np.ndarray          # (N,) excitation levels
    time: float
    ledger: EnergyLedger
    rng: np.random.Generator

    @property
    def particles(self) -> list:
        return [col.Particle(self.x[i].copy(), self.p[i].copy(), int(self.n[i]))
                for i in range(len(self.n))]

    @property
    def rng_state(self):
        return self.rng.bit_generator.state


def kinetic_energy(p: np.ndarray, mass: float) -> float:
    return float(np.sum(p * p)) / (2.0 * mass)


def initial_state(config: GasConfig) -> SimState:
    """Uniform positions, Maxwellian momenta, all oscillators de-excited."""
    rng = np.random.default_rng(config.seed)
    x = rng.random((config.n_particles, 3)) * config.box_length
    p = rng.normal(0.0, math.sqrt(config.mass * config.init_temperature),
                   (config.n_particles, 3))
    n = np.zeros(config.n_particles, dtype=np.int64)
    ledger = EnergyLedger(e_kin=kinetic_energy(p, config.mass))
    ledger.balance0 = ledger.balance()
    return SimState(x=x, p=p, n=n, time=0.0, ledger=ledger, rng=rng)


def free_flight(state: SimState, config: GasConfig, *, dt: float | None = None,
                force=None) -> SimState:
    """Constant-force kick then periodic drift; levels untouched.

    The kick's kinetic-energy change is booked as force work, so the
    ledger balance is unaffected by construction.
    """
    dt = config.dt if dt is None else dt
    f = np.asarray(config.force if force is None else force, dtype=float)
    if f.any():
        state.p += f * dt
        e_kin_new = kinetic_energy(state.p, config.mass)
        state.ledger.e_work += e_kin_new - state.ledger.e_kin
        state.ledger.e_kin = e_kin_new
    state.x += (state.p / config.mass) * dt
    np.mod(state.x, config.box_length, out=state.x)
    return state


def select_collision_pairs(state: SimState, config: GasConfig,
                           rng: np.random.Generator) -> list:
    """No-time-counter candidate selection over the well-mixed cell.

    The candidate count is (N(N-1)/2) * sigma * v_rel_max * dt / V with
    fractional rounding, each candidate is accepted with probability
    v_rel / v_rel_max, and a pair is returned at most once.  v_rel_max
    is the exact bound 2*max|v|, so acceptance never exceeds one.
    """
    n = config.n_particles
    if n < 2 or config.sigma == 0.0:
        return []
    v = state.p / config.mass
    v_max = 2.0 * float(np.max(np.linalg.norm(v, axis=1)))
    if v_max == 0.0:
        return []
    volume = config.box_length**3
    expect = 0.5 * n * (n - 1) * config.sigma * v_max * config.dt / volume
    n_cand = int(expect) + (1 if rng.random() < expect - int(expect) else 0)
    if n_cand == 0:
        return []
    i = rng.integers(0, n, n_cand)
    j = rng.integers(0, n, n_cand)
    while True:
        clash = i == j
        if not clash.any():
            break
        j[clash] = rng.integers(0, n, int(clash.sum()))
    v_rel = np.linalg.norm(v[i] - v[j], axis=1)
    accept = rng.random(n_cand) < v_rel / v_max
    pairs = []
    seen = set()
    for a, b in zip(i[accept], j[accept]):
        key = (min(a, b), max(a, b))
        if key not in seen:
            seen.add(key)
            pairs.append((int(a), int(b)))
    return pairs


def apply_collisions(state: SimState, config: GasConfig) -> int:
    """Sample and apply this step's binary collisions; returns the count."""
    pairs = select_collision_pairs(state, config, state.rng)
    kernel = col.sample_collision if config.ordering_rule else col.sample_collision_reversible
    for i, j in pairs:
        a = col.Particle(state.x[i], state.p[i], int(state.n[i]))
        b = col.Particle(state.x[j], state.p[j], int(state.n[j]))
        ke_before = col.pair_kinetic(a.p, b.p, config.mass)
        out = kernel(a, b, config.mass, config.omega, config.n_max, state.rng)
        delta = col.pair_kinetic(out.p_out, out.p1_out, config.mass) - ke_before
        state.p[i] = out.p_out
        state.p[j] = out.p1_out
        state.n[i] = out.n_out
        state.n[j] = out.n1_out
        state.ledger.e_kin += delta
        state.ledger.e_int += out.quanta_transferred * config.omega
    return len(pairs)


def apply_radiation(state: SimState, kappa: np.ndarray, dt: float,
                    rng: np.random.Generator, *, quantum: float = 1.0) -> SimState:
    """One kinetic-Monte-Carlo radiation substep for every particle.

    Per-particle jump probabilities are rate * dt read off the ladder
    generator: kappa[m-1, m] downward and kappa[m+1, m] upward.  Levels
    at the ladder top have no upward channel (reflecting truncation);
    levels pushed above the ladder by collisions keep the analytic
    downward rate m * (A + k) and cannot climb further.  Every downward
    jump banks one quantum into e_rad, every upward jump draws one from
    the bath into e_pump.
    """
    dim = kappa.shape[0]
    if dim < 2 or not np.any(kappa):
        return state
    down_table = np.concatenate([[0.0], kappa[np.arange(dim - 1), np.arange(1, dim)]])
    up_table = np.concatenate([kappa[np.arange(1, dim), np.arange(dim - 1)], [0.0]])
    a_plus_k = down_table[1]

    n = state.n
    nc = np.minimum(n, dim - 1)
    r_down = np.where(n < dim, down_table[nc], a_plus_k * n)
    r_up = up_table[nc]
    p_down = r_down * dt
    p_up = r_up * dt
    worst = float(np.max(p_down + p_up))
    if worst >= 0.5:
        raise LedgerError(
            f"radiative jump probability reached {worst:.3g} in one step; reduce dt")

    u = rng.random(len(n))
    down = u < p_down
    up = (~down) & (u < p_down + p_up)
    n[down] -= 1
    n[up] += 1
    k_down = int(down.sum())
    k_up = int(up.sum())
    state.ledger.e_int += quantum * (k_up - k_down)
    state.ledger.e_rad += quantum * k_down
    state.ledger.e_pump += quantum * k_up
    return state


def step(state: SimState, config: GasConfig, kappa: np.ndarray | None = None) -> SimState:
    """Advance one dt: free flight, collisions, radiation."""
    free_flight(state, config)
    apply_collisions(state, config)
    if config.radiation_mode != "off":
        if kappa is None:
            kappa = radiation_generator(config)
        apply_radiation(state, kappa, config.dt, state.rng, quantum=config.omega)
    state.time += config.dt
    return state


def observables(state: SimState, bins: int = 32) -> dict:
    """Sample record: ledger energies plus ensemble statistics.

    Entropy is -sum f ln f over the joint (|p|, n) histogram of the
    ensemble, normalized to one, with 0 ln 0 = 0.  ``bins`` sets the
    momentum-magnitude binning (n is binned per integer level).
    """
    if bins < 4:
        raise ValueError(f"bins must be >= 4, got {bins}")
    n_part = len(state.n)
    speeds = np.linalg.norm(state.p, axis=1)
    p_max = float(speeds.max())
    if p_max == 0.0:
        idx_p = np.zeros(n_part, dtype=np.int64)
    else:
        idx_p = np.minimum((speeds / p_max * bins).astype(np.int64), bins - 1)
    n_top = int(state.n.max())
    counts = np.zeros((bins, n_top + 1))
    np.add.at(counts, (idx_p, state.n), 1.0)
    f = counts / n_part
    nz = f > 0
    entropy = -float(np.sum(f[nz] * np.log(f[nz])))
    led = state.ledger
    return {
        "t": state.time,
        "e_kin": led.e_kin,
        "e_int": led.e_int,
        "e_rad": led.e_rad,
        "e_pump": led.e_pump,
        "mean_n": float(state.n.mean()),
        "temp_kin": 2.0 * led.e_kin / (3.0 * n_part),
        "entropy": entropy,
    }


def level_histogram(state: SimState) -> dict:
    """JSON-ready snapshot of the excitation-level populations."""
    counts = np.bincount(state.n)
    return {"t": state.time, "counts": [int(c) for c in counts]}


def check_ledger(state: SimState, config: GasConfig) -> None:
    """Assert the incremental ledger still matches the particle arrays."""
    led = state.ledger
    e_kin = kinetic_energy(state.p, config.mass)
    e_int = config.omega * float(state.n.sum())
    scale = max(1.0, abs(e_kin), abs(e_int))
    if abs(led.e_kin - e_kin) > LEDGER_RTOL * scale:
        raise LedgerError(
            f"ledger e_kin {led.e_kin!r} vs particle arrays {e_kin!r} at t={state.time}")
    if abs(led.e_int - e_int) > LEDGER_RTOL * scale:
        raise LedgerError(
            f"ledger e_int {led.e_int!r} vs particle arrays {e_int!r} at t={state.time}")


def run_simulation(config: GasConfig, sample_stride: int = 1,
                   bins: int = 32, collect_histograms: bool = False):
    """Run the configured number of steps; returns (state, records[, hists]).

    Records start with the initial state and then one row per
    ``sample_stride`` steps; ledger consistency is checked at every
    emitted sample.
    """
    if sample_stride < 1:
        raise ConfigurationError(f"sample_stride must be >= 1, got {sample_stride}")
    state = initial_state(config)
    kappa = radiation_generator(config) if config.radiation_mode != "off" else None
    check_ledger(state, config)
    records = [observables(state, bins)]
    hists = [level_histogram(state)] if collect_histograms else None
    for k in range(1, config.steps + 1):
        step(state, config, kappa)
        if k % sample_stride == 0 or k == config.steps:
            check_ledger(state, config)
            records.append(observables(state, bins))
            if collect_histograms:
                hists.append(level_histogram(state))
    if collect_histograms:
        return state, records, hists
    return state, records


def format_csv(records: list) -> str:
    """Render sample records as the canonical CSV text."""
    keys = CSV_HEADER.split(",")
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(",".join("%.12g" % rec[key] for key in keys))
    return "\n".join(lines) + "\n"
