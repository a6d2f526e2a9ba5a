"""Experiment runner behind the `qst` command.

Subcommands reproduce the figure experiments and the analytic-model checks:

    qst fig2 --config cfg.yaml --out fig2.csv
    qst fig3 --variant a --config cfg.yaml --out fig3a.csv
    qst verify-effective --config cfg.yaml --out verify.csv
    qst sweep --config cfg.yaml --out sweep.csv

Configs are YAML with a documented schema (see README); unknown keys are
rejected so a typo in a physics parameter cannot pass silently. Exit codes:
0 success, 2 config error, 3 numerical-tolerance failure in verification.
Identical config + seed produces byte-identical CSV output regardless of the
thread count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from . import __version__
from .effective import effective_spectrum, effective_three_level, resonance_check, sine_transform
from .fidelity import (
    QuditState,
    fidelity_samples,
    haar_average_exact,
    mean_and_stderr,
    reconstruct_channel,
    run_transfer,
    sample_fubini_study_batch,
)
from .propagator import eigendecompose, evolve_pure
from .spin_model import ChainParams
from .thermal import THERMAL_CHOICES, thermal_channels_by_temperature

__all__ = [
    "ConfigError",
    "VerificationError",
    "load_config",
    "run_fig2",
    "run_fig3",
    "run_verify_effective",
    "run_sweep",
    "write_csv",
    "main",
]


class ConfigError(Exception):
    """Invalid experiment configuration (exit code 2)."""


class VerificationError(Exception):
    """A verification tolerance was not met (exit code 3)."""


# ---------------------------------------------------------------------------
# config loading and validation

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing required key '{key}' in {where}")
    return cfg[key]


def _check_keys(cfg: dict, allowed, where: str) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be a mapping")
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in {where}")


def _number(cfg: dict, key: str, where: str, default=None, minimum=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}' in {where}")
        return default
    v = cfg[key]
    if not _is_number(v):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}, got {v}")
    return float(v)


def _integer(cfg: dict, key: str, where: str, default=None, minimum=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}' in {where}")
        return default
    v = cfg[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}, got {v}")
    return v


def _number_list(cfg: dict, key: str, where: str, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}' in {where}")
        return list(default)
    v = cfg[key]
    if not isinstance(v, list) or not v or not all(_is_number(x) for x in v):
        raise ConfigError(f"{where}.{key} must be a non-empty list of numbers")
    return [float(x) for x in v]


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config file {path} must hold a mapping at top level")
    return cfg


def _common_keys(cfg: dict, kind: str):
    """Validate and pull the keys every experiment shares."""
    experiment = cfg.get("experiment")
    if experiment != kind:
        raise ConfigError(
            f"config declares experiment {experiment!r} but the subcommand runs '{kind}'"
        )
    seed = cfg.get("seed")
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1)[0])
    elif not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    samples = _integer(cfg, "samples", "config", default=20000, minimum=1)
    output = cfg.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string path")
    return seed, samples, output


def _chain_block(cfg: dict, where: str, s_is_list: bool):
    chain = _require(cfg, "chain", "config")
    allowed = {"N", "d", "S", "Omega0", "omega0", "Omegaz", "omegaz", "h"}
    _check_keys(chain, allowed, where)
    out = {
        "N": _integer(chain, "N", where, minimum=1),
        "d": _integer(chain, "d", where, minimum=2),
        "Omega0": _number(chain, "Omega0", where, default=1.0),
        "omega0": _number(chain, "omega0", where, minimum=0.0),
    }
    if s_is_list:
        out["S"] = _number_list(chain, "S", where)
    else:
        out["S"] = _number(chain, "S", where)
    for key in ("Omegaz", "omegaz", "h"):
        if key in chain:
            out[key] = _number(chain, key, where, minimum=0.0)
    return out


# ---------------------------------------------------------------------------
# CSV output

def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def _config_echo(cfg: dict, prefix: str = "") -> list:
    lines = []
    for key in sorted(cfg):
        v = cfg[key]
        if isinstance(v, dict):
            lines.extend(_config_echo(v, prefix=f"{prefix}{key}."))
        else:
            lines.append(f"{prefix}{key} = {v}")
    return lines


def _header_lines(kind: str, cfg: dict, seed: int, samples: int, extra=()) -> list:
    lines = [f"qstsim {__version__}", f"experiment = {kind}", f"seed = {seed}", f"samples = {samples}"]
    lines.extend(extra)
    lines.extend(_config_echo({k: v for k, v in cfg.items() if k not in ("seed", "samples", "experiment")}))
    return lines


def write_csv(path, header_lines, columns, rows) -> None:
    text = "".join(f"# {line}\n" for line in header_lines)
    text += ",".join(columns) + "\n"
    for row in rows:
        text += ",".join(_format_cell(row[c]) for c in columns) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _run_points(points, worker, threads: int) -> list:
    """Evaluate grid points, in order, optionally on a thread pool.

    Every point owns deterministic inputs, so the thread count can never
    change the results, only the wall time.
    """
    if threads <= 1:
        return [worker(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, points))


# ---------------------------------------------------------------------------
# fig2: average fidelity vs spin number

FIG2_COLUMNS = ["S", "Omegaz", "omegaz", "mean_F", "stderr", "corrected_F", "leakage", "tau"]


def run_fig2(cfg: dict, threads: int = 1):
    """Average transfer fidelity against S for up to three z-coupling pairs.

    mean_F/stderr are the Monte Carlo literal-state fidelity; corrected_F is
    the exact Haar average after undoing the state-independent swap phase.
    One shared input sample batch pairs the comparisons across the grid.
    """
    _check_keys(cfg, {"experiment", "seed", "samples", "output", "chain", "couplings"}, "config")
    seed, samples, _ = _common_keys(cfg, "fig2")
    chain = _chain_block(cfg, "chain", s_is_list=True)
    for key in ("Omegaz", "omegaz", "h"):
        if key in chain:
            raise ConfigError(f"chain.{key} belongs in the couplings list for fig2")
    pairs_cfg = _require(cfg, "couplings", "config")
    if not isinstance(pairs_cfg, list) or not 1 <= len(pairs_cfg) <= 3:
        raise ConfigError("couplings must be a list of 1 to 3 (Omegaz, omegaz) pairs")
    pairs = []
    for i, pair in enumerate(pairs_cfg):
        where = f"couplings[{i}]"
        _check_keys(pair, {"Omegaz", "omegaz"}, where)
        pairs.append((_number(pair, "Omegaz", where, minimum=0.0), _number(pair, "omegaz", where, minimum=0.0)))

    states = sample_fubini_study_batch(chain["d"], samples, np.random.default_rng(seed))
    points = [(Oz, oz, S) for (Oz, oz) in pairs for S in chain["S"]]

    def worker(point):
        Oz, oz, S = point
        p = ChainParams(
            N=chain["N"], S=S, d=chain["d"], Omega0=chain["Omega0"],
            omega0=chain["omega0"], Omegaz=Oz, omegaz=oz,
        )
        spec = effective_spectrum(p)
        channel = reconstruct_channel(p)
        mean, stderr = mean_and_stderr(fidelity_samples(channel, states))
        return {
            "S": S,
            "Omegaz": Oz,
            "omegaz": oz,
            "mean_F": mean,
            "stderr": stderr,
            "corrected_F": haar_average_exact(channel.phase_corrected(spec.swap_phase)),
            "leakage": float(np.trace(channel.leak).real / p.d),
            "tau": spec.tau,
        }

    rows = _run_points(points, worker, threads)
    header = _header_lines("fig2", cfg, seed, samples)
    summary = _fig2_summary(pairs, chain["S"], rows)
    return header, FIG2_COLUMNS, rows, summary


def _fig2_summary(pairs, s_grid, rows) -> list:
    lines = []
    for Oz, oz in pairs:
        curve = [r for r in rows if (r["Omegaz"], r["omegaz"]) == (Oz, oz)]
        mono = all(
            b["mean_F"] >= a["mean_F"] - 2 * math.hypot(a["stderr"], b["stderr"])
            for a, b in zip(curve, curve[1:])
        )
        mono_corr = all(b["corrected_F"] >= a["corrected_F"] - 1e-12 for a, b in zip(curve, curve[1:]))
        top = curve[-1]
        in_band = 0.996 <= top["corrected_F"] <= 0.9995
        lines.append(
            f"(Omegaz={Oz:g}, omegaz={oz:g}): monotone in S within 2 stderr: "
            f"{'yes' if mono else 'no'} (corrected: {'yes' if mono_corr else 'no'}); "
            f"S={top['S']:g} corrected_F={top['corrected_F']:.6f}"
            f"{' in [0.996, 0.9995]' if in_band else ''}"
        )
    return lines


# ---------------------------------------------------------------------------
# fig3: average fidelity vs temperature

FIG3_BASE_COLUMNS = ["T_over_omega0", "mean_F", "stderr", "corrected_F", "exact_F", "leakage", "tau"]


def run_fig3(cfg: dict, variant: str, threads: int = 1):
    """Thermal-bus average fidelity against T/omega0.

    Variant a sweeps three z-coupling strengths at fixed S; variant b sweeps
    three spin numbers at omega0 = omegaz. The field offset follows
    h = omegaz * S in both. Rows carry the literal Monte Carlo fidelity plus
    the exact and phase-corrected averages so the low-temperature ordering
    crossover stays visible.
    """
    if variant not in ("a", "b"):
        raise ConfigError(f"fig3 variant must be 'a' or 'b', got {variant!r}")
    allowed = {
        "experiment", "seed", "samples", "output", "variant", "chain",
        "omegaz_values", "S_values", "temperatures_over_omega0", "thermal_hamiltonian",
    }
    _check_keys(cfg, allowed, "config")
    seed, samples, _ = _common_keys(cfg, "fig3")
    declared = cfg.get("variant")
    if declared is not None and declared != variant:
        raise ConfigError(f"config declares variant {declared!r} but --variant is {variant!r}")
    chain = _chain_block(cfg, "chain", s_is_list=False) if variant == "a" else _fig3b_chain(cfg)
    if chain["N"] % 2 == 0:
        raise ConfigError("chain.N must be odd")
    if "h" in chain:
        raise ConfigError("chain.h is fixed to omegaz * S for fig3; do not set it")
    hamiltonian = cfg.get("thermal_hamiltonian", "bus_plus_field")
    if hamiltonian not in THERMAL_CHOICES:
        raise ConfigError(f"thermal_hamiltonian must be one of {THERMAL_CHOICES}")
    t_grid = _number_list(cfg, "temperatures_over_omega0", "config")
    if any(T < 0 for T in t_grid):
        raise ConfigError("temperatures must be >= 0")

    if variant == "a":
        if "omegaz" in chain:
            raise ConfigError("chain.omegaz is swept by omegaz_values for fig3 variant a")
        if "S_values" in cfg:
            raise ConfigError("S_values belongs to variant b")
        groups = _number_list(cfg, "omegaz_values", "config")
        group_col = "omegaz"
    else:
        if "omegaz_values" in cfg:
            raise ConfigError("omegaz_values belongs to variant a")
        groups = _number_list(cfg, "S_values", "config")
        group_col = "S"

    states = sample_fubini_study_batch(chain["d"], samples, np.random.default_rng(seed))

    def worker(group):
        if variant == "a":
            S, omegaz = chain["S"], group
        else:
            S, omegaz = group, chain["omega0"]
        p = ChainParams(
            N=chain["N"], S=S, d=chain["d"], Omega0=chain["Omega0"],
            omega0=chain["omega0"], Omegaz=chain.get("Omegaz", 0.1),
            omegaz=omegaz, h=omegaz * S,
        )
        spec = effective_spectrum(p)
        temperatures = [T * p.omega0 for T in t_grid]
        channels = thermal_channels_by_temperature(p, temperatures, hamiltonian, spec.tau)
        rows = []
        for T, channel in zip(t_grid, channels):
            mean, stderr = mean_and_stderr(fidelity_samples(channel, states))
            rows.append(
                {
                    "T_over_omega0": T,
                    group_col: group,
                    "mean_F": mean,
                    "stderr": stderr,
                    "corrected_F": haar_average_exact(channel.phase_corrected(spec.swap_phase)),
                    "exact_F": haar_average_exact(channel),
                    "leakage": float(np.trace(channel.leak).real / p.d),
                    "tau": spec.tau,
                }
            )
        return rows

    rows = [row for group_rows in _run_points(groups, worker, threads) for row in group_rows]
    columns = FIG3_BASE_COLUMNS[:1] + [group_col] + FIG3_BASE_COLUMNS[1:]
    header = _header_lines("fig3", cfg, seed, samples, extra=[f"variant = {variant}"])
    return header, columns, rows, []


def _fig3b_chain(cfg: dict):
    chain = _require(cfg, "chain", "config")
    allowed = {"N", "d", "Omega0", "omega0", "Omegaz"}
    _check_keys(chain, allowed, "chain (fig3 variant b fixes omegaz = omega0 and sweeps S)")
    return {
        "N": _integer(chain, "N", "chain", minimum=1),
        "d": _integer(chain, "d", "chain", minimum=2),
        "Omega0": _number(chain, "Omega0", "chain", default=1.0),
        "omega0": _number(chain, "omega0", "chain", minimum=0.0),
        "Omegaz": _number(chain, "Omegaz", "chain", default=0.1, minimum=0.0),
    }


# ---------------------------------------------------------------------------
# verify-effective: analytic track against the full model

VERIFY_COLUMNS = [
    "N", "S", "omega0", "tau", "t_kappa", "gap", "coupling_gap_ratio", "resonant",
    "eps_kappa", "swap3_deviation", "min_basis_F", "max_basis_deviation", "corrected_avg_F",
]

W_ORTHO_TOL = 1e-12
SWAP3_TOL = 1e-12


def run_verify_effective(cfg: dict, threads: int = 1):
    """Check the resonant-model contract on a grid of (N, S, omega0/Omega0).

    Per point: optimal time, resonant coupling, gap ratio, the three-level
    swap probability, and the full-model basis-input fidelities against the
    swap prediction. The exact identities (zero mode energy, transform
    orthogonality, unit swap probability) must hold to fixed tolerances;
    a configured enforce block can additionally bound the full-model
    deviation. Violations raise VerificationError (exit code 3).
    """
    allowed = {
        "experiment", "seed", "samples", "output", "grid", "d",
        "Omegaz", "omegaz", "resonance_threshold", "enforce",
    }
    _check_keys(cfg, allowed, "config")
    seed, samples, _ = _common_keys(cfg, "verify-effective")
    grid = _require(cfg, "grid", "config")
    _check_keys(grid, {"N", "S", "omega0"}, "grid")
    n_values = _number_list(grid, "N", "grid")
    if any(int(n) != n or int(n) % 2 == 0 or n < 1 for n in n_values):
        raise ConfigError("grid.N must list odd positive integers")
    n_values = [int(n) for n in n_values]
    s_values = _number_list(grid, "S", "grid")
    w0_values = _number_list(grid, "omega0", "grid")
    d = _integer(cfg, "d", "config", default=2, minimum=2)
    Omegaz = _number(cfg, "Omegaz", "config", minimum=0.0)
    omegaz = _number(cfg, "omegaz", "config", minimum=0.0)
    threshold = _number(cfg, "resonance_threshold", "config", default=0.1, minimum=0.0)
    max_infidelity = None
    if "enforce" in cfg:
        _check_keys(cfg["enforce"], {"max_infidelity"}, "enforce")
        max_infidelity = _number(cfg["enforce"], "max_infidelity", "enforce", minimum=0.0)

    states = sample_fubini_study_batch(d, samples, np.random.default_rng(seed))
    points = [(N, S, w0) for N in n_values for S in s_values for w0 in w0_values]

    def worker(point):
        N, S, w0 = point
        p = ChainParams(N=N, S=S, d=d, Omega0=1.0, omega0=w0, Omegaz=Omegaz, omegaz=omegaz)
        spec = effective_spectrum(p)
        report = resonance_check(p, threshold)
        es3 = eigendecompose(effective_three_level(p))
        psi = evolve_pure(es3, np.array([1.0, 0.0, 0.0], dtype=complex), spec.tau)
        swap3_dev = abs(abs(psi[2]) ** 2 - 1.0)
        w = sine_transform(N)
        ortho = float(np.max(np.abs(w @ w.T - np.eye(N))))
        basis_f = []
        for u in range(d):
            amps = np.zeros(d)
            amps[u] = 1.0
            rho, _ = run_transfer(p, QuditState(d=d, amplitudes=amps), spec.tau)
            basis_f.append(float(rho[u, u].real))
        channel = reconstruct_channel(p, spec.tau)
        corrected = haar_average_exact(channel.phase_corrected(spec.swap_phase))
        mean, stderr = mean_and_stderr(
            fidelity_samples(channel.phase_corrected(spec.swap_phase), states)
        )
        failures = []
        if spec.eps[spec.kappa - 1] != 0.0:
            failures.append(f"eps_kappa = {spec.eps[spec.kappa - 1]!r} is not exactly zero")
        if ortho > W_ORTHO_TOL:
            failures.append(f"transform orthogonality residual {ortho:.3e} > {W_ORTHO_TOL}")
        if swap3_dev > SWAP3_TOL:
            failures.append(f"three-level swap probability off by {swap3_dev:.3e}")
        if max_infidelity is not None and 1.0 - min(basis_f) > max_infidelity:
            failures.append(
                f"basis-input infidelity {1.0 - min(basis_f):.3e} > enforced {max_infidelity}"
            )
        row = {
            "N": N,
            "S": S,
            "omega0": w0,
            "tau": spec.tau,
            "t_kappa": spec.t_kappa,
            "gap": report.gap,
            "coupling_gap_ratio": report.ratio,
            "resonant": report.resonant,
            "eps_kappa": float(spec.eps[spec.kappa - 1]),
            "swap3_deviation": swap3_dev,
            "min_basis_F": min(basis_f),
            "max_basis_deviation": 1.0 - min(basis_f),
            "corrected_avg_F": corrected,
        }
        summary = (
            f"N={N} S={S:g} omega0={w0:g}: tau={spec.tau:.6g} ratio={report.ratio:.4f} "
            f"resonant={'yes' if report.resonant else 'no'} min_basis_F={min(basis_f):.6f} "
            f"corrected_avg_F={corrected:.6f} (mc {mean:.6f} +- {stderr:.1e})"
        )
        return row, summary, failures

    results = _run_points(points, worker, threads)
    rows = [r for r, _, _ in results]
    summary = [s for _, s, _ in results]
    failures = [f for _, _, fs in results for f in fs]
    if failures:
        raise VerificationError("; ".join(failures))
    header = _header_lines("verify-effective", cfg, seed, samples)
    return header, VERIFY_COLUMNS, rows, summary


# ---------------------------------------------------------------------------
# sweep: free parameter grid

SWEEP_COLUMNS = [
    "N", "S", "d", "Omegaz", "omegaz", "omega0", "t",
    "mean_F", "stderr", "corrected_F", "exact_F", "leakage", "tau",
]

SWEEP_DEFAULTS = {
    "N": [3], "S": [5.0], "d": [2], "Omegaz": [0.5], "omegaz": [0.5], "omega0": [0.1],
}


def run_sweep(cfg: dict, threads: int = 1):
    """Cartesian sweep over chain parameters at t = tau or a fixed time."""
    _check_keys(cfg, {"experiment", "seed", "samples", "output", "grid", "time"}, "config")
    seed, samples, _ = _common_keys(cfg, "sweep")
    grid = cfg.get("grid", {})
    _check_keys(grid, set(SWEEP_DEFAULTS), "grid")
    axes = {}
    for key, default in SWEEP_DEFAULTS.items():
        axes[key] = _number_list(grid, key, "grid", default=default)
    for key in ("N", "d"):
        if any(int(v) != v for v in axes[key]):
            raise ConfigError(f"grid.{key} must list integers")
        axes[key] = [int(v) for v in axes[key]]
    time_spec = cfg.get("time", "tau")
    if time_spec != "tau" and not _is_number(time_spec):
        raise ConfigError("time must be the string 'tau' or a number")

    points = [
        (N, S, d, Oz, oz, w0)
        for N in axes["N"] for S in axes["S"] for d in axes["d"]
        for Oz in axes["Omegaz"] for oz in axes["omegaz"] for w0 in axes["omega0"]
    ]
    batches = {
        d: sample_fubini_study_batch(d, samples, np.random.default_rng(np.random.SeedSequence([seed, d])))
        for d in set(axes["d"])
    }

    def worker(point):
        N, S, d, Oz, oz, w0 = point
        p = ChainParams(N=N, S=S, d=d, Omegaz=Oz, omegaz=oz, omega0=w0)
        spec = effective_spectrum(p)
        t = spec.tau if time_spec == "tau" else float(time_spec)
        channel = reconstruct_channel(p, t)
        mean, stderr = mean_and_stderr(fidelity_samples(channel, batches[d]))
        return {
            "N": N, "S": S, "d": d, "Omegaz": Oz, "omegaz": oz, "omega0": w0, "t": t,
            "mean_F": mean,
            "stderr": stderr,
            "corrected_F": haar_average_exact(channel.phase_corrected(spec.swap_phase)),
            "exact_F": haar_average_exact(channel),
            "leakage": float(np.trace(channel.leak).real / d),
            "tau": spec.tau,
        }

    rows = _run_points(points, worker, threads)
    header = _header_lines("sweep", cfg, seed, samples)
    return header, SWEEP_COLUMNS, rows, []


# ---------------------------------------------------------------------------
# entry point

def _default_threads() -> int:
    env = os.environ.get("QST_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qst", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qstsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("fig2", "fig3", "verify-effective", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML experiment config")
        sp.add_argument("--out", help="output CSV path ('-' for stdout)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--samples", type=int, help="override the sample count")
        sp.add_argument("--threads", type=int, default=_default_threads())
        if name == "fig3":
            sp.add_argument("--variant", required=True, choices=("a", "b"))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.samples is not None:
            cfg["samples"] = args.samples
        if args.command == "fig2":
            header, columns, rows, summary = run_fig2(cfg, threads=args.threads)
        elif args.command == "fig3":
            header, columns, rows, summary = run_fig3(cfg, args.variant, threads=args.threads)
        elif args.command == "verify-effective":
            header, columns, rows, summary = run_verify_effective(cfg, threads=args.threads)
        else:
            header, columns, rows, summary = run_sweep(cfg, threads=args.threads)
        out = args.out or cfg.get("output")
        if not out:
            raise ConfigError("no output path: pass --out or set 'output' in the config")
        write_csv(out, header, columns, rows)
        for line in summary:
            print(line)
        if out != "-":
            print(f"wrote {len(rows)} rows to {out}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
