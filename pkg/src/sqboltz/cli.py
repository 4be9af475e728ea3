"""Command-line entry point.

One binary, four subcommands mirroring the library modules:

    sqboltz rates      radiative-rate table for one oscillator mode
    sqboltz simulate   particle run producing the energy-ledger CSV
    sqboltz hier-osc   hierarchic-chain quantum evolution CSV
    sqboltz causal     cascade-site generation and axiom checking

Runs are configured by a flat ``key = value`` text file plus flag
overrides (flags win).  Every run is deterministic given its arguments
and seed, and all numeric output is printed with 12 significant digits
so repeated invocations are byte-identical.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import causal as causal_mod
from . import engine as engine_mod
from . import hierosc as hier_mod
from . import spectro as spectro_mod

LEDGER_TOLERANCE = 1e-9
NORM_TOLERANCE = 1e-9


def _sig12(value):
    """Round floats (recursively) to 12 significant digits for output."""
    if isinstance(value, float):
        return float("%.12g" % value)
    if isinstance(value, dict):
        return {k: _sig12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig12(v) for v in value]
    if isinstance(value, np.ndarray):
        return _sig12(value.tolist())
    return value


def _emit_json(record: dict, out: str | None):
    text = json.dumps(_sig12(record), indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


def parse_config_text(text: str) -> dict:
    """Flat key = value lines; # starts a comment; later keys override."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.ClickException(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


_CONVERTERS = {
    "int": int,
    "float": float,
    "bool": lambda s: {"true": True, "false": False}[s.lower()],
    "str": str,
    "vec3": lambda s: tuple(float(x) for x in s.split(",")),
    "ints": lambda s: tuple(int(x) for x in s.split(",")),
}


def coerce_config(values: dict, schema: dict, context: str) -> dict:
    out = {}
    for key, val in values.items():
        if key not in schema:
            raise click.ClickException(f"unknown {context} config key {key!r}")
        kind = schema[key]
        try:
            out[key] = _CONVERTERS[kind](val)
        except (ValueError, KeyError) as exc:
            raise click.ClickException(f"config key {key!r}: cannot parse {val!r} as {kind}") from exc
    return out


@click.group()
def main():
    """Semi-quantum gas simulator and causal-site tools."""


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------

@main.command()
@click.option("--omega", type=float, required=True, help="angular frequency [rad/s]")
@click.option("--dipole", type=float, required=True, help="transition dipole [esu cm]")
@click.option("--temperature", type=float, required=True, help="bath temperature [K]")
@click.option("--n-levels", type=int, default=2, show_default=True)
@click.option("--mode", type=click.Choice(spectro_mod.RADIATION_MODES), default="full",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def rates(omega, dipole, temperature, n_levels, mode, out):
    """Radiative quantities of one oscillator mode (JSON)."""
    try:
        spec = spectro_mod.OscillatorSpec(omega=omega, dipole=dipole, n_levels=n_levels)
        rs = spectro_mod.rate_set(spec, temperature, mode)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    _emit_json({
        "boltzmann": rs.boltzmann,
        "k_eq": rs.k_eq,
        "a_spont": rs.a_spont,
        "kappa": rs.kappa,
    }, out)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIM_SCHEMA = {
    "n_particles": "int", "steps": "int", "dt": "float", "seed": "int",
    "box_length": "float", "r0": "float", "mass": "float", "omega": "float",
    "n_max": "int", "force": "vec3", "ordering_rule": "bool",
    "radiation_mode": "str", "bath_temperature": "float", "a_spont": "float",
    "n_levels": "int", "init_temperature": "float",
    "sample_stride": "int", "bins": "int",
}


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--seed", type=int, default=None, help="override the config seed")
@click.option("--steps", type=int, default=None, help="override the config step count")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--sample-stride", type=int, default=None)
@click.option("--hist-out", type=click.Path(dir_okay=False), default=None,
              help="also write level-histogram snapshots (JSON lines)")
def simulate(config_path, seed, steps, out, sample_stride, hist_out):
    """Run the particle engine; exit 0 iff the energy ledger balanced."""
    with open(config_path) as fh:
        values = coerce_config(parse_config_text(fh.read()), _SIM_SCHEMA, "simulate")
    stride = values.pop("sample_stride", 1)
    bins = values.pop("bins", 32)
    if seed is not None:
        values["seed"] = seed
    if steps is not None:
        values["steps"] = steps
    if sample_stride is not None:
        stride = sample_stride
    try:
        config = engine_mod.GasConfig(**values)
    except (TypeError, engine_mod.ConfigurationError) as exc:
        raise click.ClickException(str(exc)) from exc

    try:
        if hist_out:
            state, records, hists = engine_mod.run_simulation(
                config, sample_stride=stride, bins=bins, collect_histograms=True)
        else:
            state, records = engine_mod.run_simulation(config, sample_stride=stride, bins=bins)
            hists = None
    except engine_mod.LedgerError as exc:
        raise click.ClickException(f"ledger consistency failure: {exc}") from exc

    with open(out, "w") as fh:
        fh.write(engine_mod.format_csv(records))
    if hists is not None:
        with open(hist_out, "w") as fh:
            for rec in hists:
                fh.write(json.dumps(_sig12(rec)) + "\n")

    led = state.ledger
    drift = led.drift()
    click.echo("final ledger: " + " ".join(
        f"{k}={getattr(led, k):.12g}" for k in ("e_kin", "e_int", "e_rad", "e_pump", "e_work")))
    click.echo(f"ledger drift: {drift:.3e} (tolerance {LEDGER_TOLERANCE:.0e})")
    if not math.isfinite(drift) or drift > LEDGER_TOLERANCE:
        click.echo("ledger invariant violated", err=True)
        sys.exit(3)


# ---------------------------------------------------------------------------
# hier-osc
# ---------------------------------------------------------------------------

_HIER_SCHEMA = {
    "m0": "float", "k0": "float", "k1": "float", "tilde_k0": "float",
    "n_cut": "int", "mode": "str", "coupling": "str", "t_max": "float",
    "samples": "int", "n_traj": "int", "seed": "int", "initial": "ints",
}


@main.command("hier-osc")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--mode", type=click.Choice(hier_mod.EVOLVE_MODES), default=None,
              help="override the config mode")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def hier_osc(config_path, mode, seed, out):
    """Evolve the hierarchic chain; exit 0 iff norm stayed within tolerance."""
    with open(config_path) as fh:
        values = coerce_config(parse_config_text(fh.read()), _HIER_SCHEMA, "hier-osc")
    run_mode = mode or values.pop("mode", "free")
    values.pop("mode", None)
    coupling = values.pop("coupling", "full")
    t_max = values.pop("t_max", 10.0)
    samples = values.pop("samples", 101)
    n_traj = values.pop("n_traj", 200)
    run_seed = seed if seed is not None else values.pop("seed", 0)
    values.pop("seed", None)
    initial = values.pop("initial", (1, 0, 0))
    try:
        spec = hier_mod.ChainSpec(**values)
        model = hier_mod.build_quantum_hamiltonian(spec, run_mode, coupling)
        psi0 = hier_mod.fock_state(model.basis, initial)
        times = np.linspace(0.0, t_max, samples)
        result = hier_mod.evolve(model, psi0, times,
                                 rng=np.random.default_rng(run_seed), n_traj=n_traj)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    except hier_mod.TruncationOverflow as exc:
        raise click.ClickException(f"truncation overflow (n_cut={values.get('n_cut')}): {exc}") from exc

    with open(out, "w") as fh:
        fh.write("t,occ_A,occ_0,occ_1,norm,energy\n")
        for k in range(len(result.times)):
            fh.write(",".join("%.12g" % v for v in (
                result.times[k], result.occ_a[k], result.occ_0[k],
                result.occ_1[k], result.norm[k], result.energy[k])) + "\n")

    drift = float(np.max(np.abs(result.norm - 1.0)))
    click.echo(f"norm drift: {drift:.3e} (tolerance {NORM_TOLERANCE:.0e})")
    if drift > NORM_TOLERANCE:
        click.echo("norm drift beyond tolerance", err=True)
        sys.exit(3)


# ---------------------------------------------------------------------------
# causal
# ---------------------------------------------------------------------------

@main.group()
def causal():
    """Causal-site generation and axiom checking."""


@causal.command()
@click.option("--p", "branching", type=int, required=True, help="branching factor (>= 2)")
@click.option("--depth", type=int, required=True, help="generations (>= 1)")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen(branching, depth, out):
    """Generate a cascade site as a JSON site file."""
    try:
        site = causal_mod.cascade_site(branching, depth)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    with open(out, "w") as fh:
        json.dump(causal_mod.site_to_json(site), fh, indent=2)
        fh.write("\n")
    click.echo(f"wrote {site.n_regions} regions to {out}")


@causal.command()
@click.argument("site_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def check(site_file, out):
    """Check a site file against all axioms; exit 0 iff it passes."""
    with open(site_file) as fh:
        text = fh.read()
    try:
        site = causal_mod.site_from_json(text)
    except json.JSONDecodeError as exc:
        raise click.ClickException(
            f"{site_file}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}")
    except causal_mod.SiteStructureError as exc:
        raise click.ClickException(f"{site_file}: {exc}") from exc
    report = causal_mod.check_axioms(site)
    _emit_json(report.as_json(), out)
    if not report.passed:
        sys.exit(1)


if __name__ == "__main__":
    main()
