"""Semi-quantum kinetic gas toolkit.

Subpackages by concern:

- ``spectro``   radiative rates and the level-population generator
- ``collision`` quantized one-way binary collision kernel
- ``engine``    stochastic particle simulation with an energy ledger
- ``hierosc``   hierarchic oscillator chain, classical and quantum
- ``causal``    finite causal sites, axiom checking, cascade generator
- ``padic``     p-adic integers and their depth ordering
- ``cli``       the ``sqboltz`` command-line entry point
"""

from .collision import (CollisionOutcome, Particle, TransferDistribution,
                        delta_q, partition_quanta, relative_kinetic_energy,
                        sample_collision, transfer_distribution)
from .engine import (CSV_HEADER, ConfigurationError, EnergyLedger, GasConfig,
                     LedgerError, SimState, UnitScales, observables,
                     run_simulation, step)
from .hierosc import (ChainSpec, EvolutionResult, FockOperator, HierCoords,
                      TruncationOverflow, build_quantum_hamiltonian,
                      classical_energy, decomposed_energy, evolve,
                      from_hierarchical, interblock_energy, to_hierarchical)
from .causal import (AxiomReport, Site, SiteStructureError, Violation,
                     cascade_site, check_axioms, cutting, is_causal_path,
                     is_complete, site_from_json, site_to_json, union)
from .padic import PAdicInt, padic_compare
from .spectro import (OscillatorSpec, RateSet, boltzmann_ratio,
                      equilibrium_rate, ladder_generator, rate_set,
                      relaxation_generator, spontaneous_rate,
                      stationary_distribution)

__version__ = "0.1.0"
