"""Configuration parsing, presets, file formats, and the `qstrip` CLI.

Subcommands:

- ``run``          one simulation; writes per-level observables and snapshots.
- ``compare``      a transparent-boundary run against a reference scheme on an
                   enlarged Dirichlet box; writes per-level error norms.
- ``convergence``  a refinement ladder of such comparisons with error ratios.
- ``spectra``      eigenvalue survey of the averaged operators (any dimension).
- ``kernel-dump``  the transparent-boundary convolution kernel as CSV.

Configuration is INI-style with sections [grid], [physics], [potential],
[packet], [scheme], [output]; ``--preset`` supplies a complete baseline
(`exampleA`, `exampleB`, `exampleB-barrier`) that an optional ``--config`` file
then overrides key by key.  Unknown sections or keys are hard errors.

Snapshot file format (little endian): magic ``SCHRFLD1``; u32 n; u32 J1..Jn;
f64 h1..hn; f64 t; then the closed-mesh field, row-major with axis 1 slowest,
each value as an (Re, Im) f64 pair.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import math
import struct
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import (ObservableSeries, convergence_ratios,
                          difference_norms, energies, mass2)
from .errors import ConfigError, NumericalError
from .grid_core import (NoPotential, PhysicalConstants, PoschlTellerPotential,
                        RectangularPotential, build_grid, extend_axis1,
                        gaussian_packet, sample_potential)
from .spectral import eigen_report, spectral_survey
from .stepper import (COMPARISON_DIRICHLET, DOUBLE_SPLIT_TBC, VARIANTS,
                      initial_state, make_plan, run, step)
from .tbc import kernel_coefficients, kernel_table

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = b"SCHRFLD1"

_SCHEMA = {
    "grid": {"extent1", "extent2", "count1", "count2", "levels", "tau",
             "final_time", "left_boundary"},
    "physics": {"hbar", "c_hbar", "v_inf"},
    "potential": {"type", "alpha0", "c1", "x1_star", "x1_min", "x1_max",
                  "x2_min", "x2_max", "strength", "support_tol",
                  "v_tilde_steps"},
    "packet": {"wave_number", "width", "center1", "center2"},
    "scheme": {"variant", "enlargement"},
    "output": {"observable_stride", "snapshot_stride"},
}
_POTENTIAL_KEYS = {
    "poschl_teller": {"alpha0", "c1", "x1_star"},
    "rectangular": {"x1_min", "x1_max", "x2_min", "x2_max", "strength"},
    "none": set(),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully parsed and validated simulation configuration (n = 2)."""

    extents: tuple
    counts: tuple
    levels: int
    tau: float | None
    final_time: float | None
    left_boundary: str
    hbar: float
    c_hbar: float
    v_inf: float
    potential_type: str
    potential_params: dict
    support_tol: float
    v_tilde_steps: tuple | None
    wave_number: float
    width: float
    center: tuple
    variant: str
    enlargement: int
    observable_stride: int
    snapshot_stride: int


def preset_config(name):
    """Baseline configuration dictionaries for the built-in scenarios."""
    k30 = repr(30.0 * math.sqrt(2.0))
    base = {
        "grid": {"levels": "1000", "final_time": "0.05",
                 "left_boundary": "tbc"},
        "physics": {"hbar": "1.0", "c_hbar": "1.0", "v_inf": "0.0"},
        "packet": {"wave_number": k30, "width": repr(1.0 / 120.0),
                   "center1": "1.0"},
        "scheme": {"variant": DOUBLE_SPLIT_TBC, "enlargement": "3"},
        "output": {"observable_stride": "1", "snapshot_stride": "0"},
    }
    if name == "exampleA":
        base["grid"].update(extent1="4.0", extent2="4.2", count1="400",
                            count2="64")
        base["packet"]["center2"] = "2.1"
        base["potential"] = {"type": "poschl_teller", "alpha0": "6.0",
                             "c1": "47.0", "x1_star": "2.0"}
    elif name in ("exampleB", "exampleB-barrier"):
        base["grid"].update(extent1="3.0", extent2="2.8", count1="600",
                            count2="64", levels="2400", final_time="0.027")
        base["packet"]["center2"] = "1.4"
        if name == "exampleB":
            base["potential"] = {"type": "rectangular", "x1_min": "1.6",
                                 "x1_max": "1.9", "x2_min": "0.7",
                                 "x2_max": "2.1", "strength": "-9000.0"}
        else:
            base["potential"] = {"type": "rectangular", "x1_min": "1.6",
                                 "x1_max": "1.7", "x2_min": "0.7",
                                 "x2_max": "2.1", "strength": "1500.0"}
    else:
        raise ConfigError(
            f"unknown preset {name!r}; available: exampleA, exampleB, "
            "exampleB-barrier")
    return base


def _typed(section, key, raw, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {kind.__name__}")
    return raw


def _parse_steps(raw):
    steps = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            x, val = chunk.split(":")
            steps.append((float(x), float(val)))
        except ValueError:
            raise ConfigError(
                f"v_tilde_steps entry {chunk!r} is not of the form x:value")
    return tuple(steps) or None


def parse_config(text="", preset=None):
    """Parse configuration text (optionally on top of a preset baseline)."""
    cp = configparser.ConfigParser(interpolation=None)
    if preset is not None:
        cp.read_dict(preset_config(preset))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}")

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown configuration section [{section}]")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    for required in ("grid", "packet"):
        if required not in cp:
            raise ConfigError(f"missing required configuration section [{required}]")

    g = cp["grid"]
    for key in ("extent1", "extent2", "count1", "count2", "levels"):
        if key not in g:
            raise ConfigError(f"missing [grid] key {key!r}")
    if ("tau" in g) == ("final_time" in g):
        raise ConfigError("[grid] must set exactly one of tau and final_time")
    pk = cp["packet"]
    for key in ("wave_number", "width", "center1", "center2"):
        if key not in pk:
            raise ConfigError(f"missing [packet] key {key!r}")

    pot = cp["potential"] if "potential" in cp else {"type": "none"}
    pot_type = pot.get("type", "none")
    if pot_type not in _POTENTIAL_KEYS:
        raise ConfigError(
            f"unknown potential type {pot_type!r}; expected one of "
            f"{sorted(_POTENTIAL_KEYS)}")
    needed = _POTENTIAL_KEYS[pot_type]
    extra = set(pot) - needed - {"type", "support_tol", "v_tilde_steps"}
    if extra:
        raise ConfigError(
            f"keys {sorted(extra)} do not apply to potential type {pot_type!r}")
    missing = needed - set(pot)
    if missing:
        raise ConfigError(
            f"potential type {pot_type!r} requires keys {sorted(missing)}")
    params = {key: _typed("potential", key, pot[key], float) for key in needed}

    phys = cp["physics"] if "physics" in cp else {}
    sch = cp["scheme"] if "scheme" in cp else {}
    out = cp["output"] if "output" in cp else {}
    variant = sch.get("variant", DOUBLE_SPLIT_TBC)
    if variant not in VARIANTS:
        raise ConfigError(f"unknown scheme variant {variant!r}; expected one of {VARIANTS}")

    return RunConfig(
        extents=(_typed("grid", "extent1", g["extent1"], float),
                 _typed("grid", "extent2", g["extent2"], float)),
        counts=(_typed("grid", "count1", g["count1"], int),
                _typed("grid", "count2", g["count2"], int)),
        levels=_typed("grid", "levels", g["levels"], int),
        tau=_typed("grid", "tau", g["tau"], float) if "tau" in g else None,
        final_time=(_typed("grid", "final_time", g["final_time"], float)
                    if "final_time" in g else None),
        left_boundary=g.get("left_boundary", "dirichlet"),
        hbar=_typed("physics", "hbar", phys.get("hbar", "1.0"), float),
        c_hbar=_typed("physics", "c_hbar", phys.get("c_hbar", "1.0"), float),
        v_inf=_typed("physics", "v_inf", phys.get("v_inf", "0.0"), float),
        potential_type=pot_type,
        potential_params=params,
        support_tol=_typed("potential", "support_tol",
                           pot.get("support_tol", "1e-6"), float),
        v_tilde_steps=_parse_steps(pot["v_tilde_steps"])
        if "v_tilde_steps" in pot else None,
        wave_number=_typed("packet", "wave_number", pk["wave_number"], float),
        width=_typed("packet", "width", pk["width"], float),
        center=(_typed("packet", "center1", pk["center1"], float),
                _typed("packet", "center2", pk["center2"], float)),
        variant=variant,
        enlargement=_typed("scheme", "enlargement", sch.get("enlargement", "3"),
                           int),
        observable_stride=_typed("output", "observable_stride",
                                 out.get("observable_stride", "1"), int),
        snapshot_stride=_typed("output", "snapshot_stride",
                               out.get("snapshot_stride", "0"), int),
    )


def build_scenario(cfg):
    """(grid, consts, potential, psi0) from a parsed configuration."""
    grid = build_grid(extents=cfg.extents, counts=cfg.counts, levels=cfg.levels,
                      tau=cfg.tau, final_time=cfg.final_time,
                      left_boundary=cfg.left_boundary)
    consts = PhysicalConstants(hbar=cfg.hbar, c_hbar=cfg.c_hbar)
    if cfg.potential_type == "poschl_teller":
        spec = PoschlTellerPotential(**cfg.potential_params)
    elif cfg.potential_type == "rectangular":
        spec = RectangularPotential(**cfg.potential_params)
    else:
        spec = NoPotential()
    potential = sample_potential(spec, grid, v_inf=cfg.v_inf,
                                 v_tilde_steps=cfg.v_tilde_steps,
                                 support_tol=cfg.support_tol)
    psi0 = gaussian_packet(grid, wave_number=cfg.wave_number, width=cfg.width,
                           center=cfg.center)
    return grid, consts, potential, psi0


# --- snapshot files ---------------------------------------------------------

def write_snapshot(path, values, grid, t):
    """Write one closed-mesh field in the binary snapshot format."""
    values = np.ascontiguousarray(values, dtype="<c16")
    if values.shape != grid.shape:
        raise ValueError("field does not match the mesh shape")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", grid.n))
        fh.write(struct.pack(f"<{grid.n}I", *grid.counts))
        fh.write(struct.pack(f"<{grid.n}d", *grid.steps))
        fh.write(struct.pack("<d", float(t)))
        fh.write(values.tobytes())


def read_snapshot(path):
    """Read a snapshot file back: (values, {'counts', 'steps', 't'})."""
    blob = Path(path).read_bytes()
    if blob[:8] != SNAPSHOT_MAGIC:
        raise ConfigError(f"{path}: not a field snapshot (bad magic)")
    (n,) = struct.unpack_from("<I", blob, 8)
    off = 12
    counts = struct.unpack_from(f"<{n}I", blob, off)
    off += 4 * n
    steps = struct.unpack_from(f"<{n}d", blob, off)
    off += 8 * n
    (t,) = struct.unpack_from("<d", blob, off)
    off += 8
    shape = tuple(j + 1 for j in counts)
    expected = int(np.prod(shape)) * 16
    if len(blob) - off != expected:
        raise ConfigError(
            f"{path}: payload holds {len(blob) - off} bytes, expected {expected}")
    values = np.frombuffer(blob, dtype="<c16", offset=off).reshape(shape)
    return values.astype(np.complex128), {"counts": counts, "steps": steps,
                                          "t": t}


def write_observables_csv(path, series):
    cols = series.columns()
    names = list(cols)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in zip(*(cols[name] for name in names)):
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v
                             for v in row])


# --- compare / convergence drivers ------------------------------------------

def compare_runs(grid, consts, potential, psi0, *, variant_b=COMPARISON_DIRICHLET,
                 factor=3, observable_stride=1, workers=1):
    """Run the transparent-boundary scheme against a reference variant on the
    `factor`×-enlarged Dirichlet box, in lockstep, recording per-level error
    norms E_C (max over nodes) and E_L2 (mesh norm) on the original mesh.

    Returns (ObservableSeries with e_c/e_l2 extras, summary dict).
    """
    plan_a = make_plan(grid, consts, potential, DOUBLE_SPLIT_TBC,
                       workers=workers)
    grid_b, pot_b, psi0_b, offset = extend_axis1(grid, potential, psi0, factor)
    plan_b = make_plan(grid_b, consts, pot_b, variant_b, workers=workers)
    state_a = initial_state(plan_a, psi0)
    state_b = initial_state(plan_b, psi0_b)
    j1 = grid.counts[0]
    series = ObservableSeries()

    def record(level):
        e_c, e_l2 = difference_norms(
            state_a.psi, state_b.psi[offset:offset + j1 + 1], grid)
        e_kin, e_pot = energies(state_a.psi, potential, grid, consts)
        series.record(level, level * grid.tau, mass2(state_a.psi, grid),
                      e_kin, e_pot, e_c=e_c, e_l2=e_l2)

    record(0)
    for m in range(1, grid.levels + 1):
        step(plan_a, state_a)
        step(plan_b, state_b)
        if m % observable_stride == 0 or m == grid.levels:
            record(m)
    e_c_all = series.extras["e_c"]
    e_l2_all = series.extras["e_l2"]
    summary = {
        "e_c": max(e_c_all), "e_c_level": series.levels[int(np.argmax(e_c_all))],
        "e_l2": max(e_l2_all),
        "e_l2_level": series.levels[int(np.argmax(e_l2_all))],
    }
    return series, summary


def convergence_ladder(cfg, *, ladder="joint", doublings=2, workers=1,
                       variant_b=COMPARISON_DIRICHLET):
    """Errors and ratios down a refinement ladder of `compare_runs`.

    ladder: 'axis1' doubles J1 only; 'axis2' doubles J2 only; 'joint' doubles
    J1, J2 and M together (τ halves, T fixed).  Returns a list of row dicts.
    """
    if ladder not in ("axis1", "axis2", "joint"):
        raise ConfigError(f"unknown ladder {ladder!r}")
    final_time = cfg.final_time if cfg.final_time is not None \
        else cfg.levels * cfg.tau
    rows = []
    for i in range(doublings + 1):
        f = 2 ** i
        counts = (cfg.counts[0] * f if ladder in ("axis1", "joint") else cfg.counts[0],
                  cfg.counts[1] * f if ladder in ("axis2", "joint") else cfg.counts[1])
        levels = cfg.levels * f if ladder == "joint" else cfg.levels
        scaled = RunConfig(**{**cfg.__dict__, "counts": counts,
                              "levels": levels, "tau": None,
                              "final_time": final_time})
        grid, consts, potential, psi0 = build_scenario(scaled)
        _, summary = compare_runs(
            grid, consts, potential, psi0, variant_b=variant_b,
            factor=cfg.enlargement, observable_stride=cfg.observable_stride,
            workers=workers)
        rows.append({"count1": counts[0], "count2": counts[1],
                     "levels": levels, "e_c": summary["e_c"],
                     "e_l2": summary["e_l2"]})
        logger.info("ladder %s step %d: (J1,J2,M)=(%d,%d,%d) E_C=%.3e E_L2=%.3e",
                    ladder, i, counts[0], counts[1], levels,
                    summary["e_c"], summary["e_l2"])
    for key in ("e_c", "e_l2"):
        for row, ratio in zip(rows, convergence_ratios([r[key] for r in rows])):
            row[f"ratio_{key}"] = ratio
    return rows


# --- commands ---------------------------------------------------------------

def _load_config(args):
    text = Path(args.config).read_text() if args.config else ""
    if not text and args.preset is None:
        raise ConfigError("provide --config and/or --preset")
    cfg = parse_config(text, preset=args.preset)
    if args.snapshot_stride is not None:
        cfg = RunConfig(**{**cfg.__dict__,
                           "snapshot_stride": args.snapshot_stride})
    return cfg


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args):
    cfg = _load_config(args)
    grid, consts, potential, psi0 = build_scenario(cfg)
    plan = make_plan(grid, consts, potential, cfg.variant, workers=args.workers)
    out = _out_dir(args)

    def snapshot(state):
        stride = cfg.snapshot_stride
        due = (stride > 0 and state.level % stride == 0) \
            or state.level == grid.levels
        if due:
            write_snapshot(out / f"field_{state.level:06d}.snap", state.psi,
                           grid, state.level * grid.tau)

    state, series = run(plan, psi0, observable_stride=cfg.observable_stride,
                        observers=[snapshot])
    write_observables_csv(out / "observables.csv", series)
    print(f"levels={state.level} mass2={series.mass2[-1]:.12g} "
          f"e_kin={series.e_kin[-1]:.6g} e_pot={series.e_pot[-1]:.6g}")
    print(f"wrote {out / 'observables.csv'}")
    return 0


def cmd_compare(args):
    cfg = _load_config(args)
    grid, consts, potential, psi0 = build_scenario(cfg)
    out = _out_dir(args)
    series, summary = compare_runs(
        grid, consts, potential, psi0, variant_b=args.reference_variant,
        factor=cfg.enlargement, observable_stride=cfg.observable_stride,
        workers=args.workers)
    write_observables_csv(out / "compare.csv", series)
    print(f"E_C={summary['e_c']:.6e} (level {summary['e_c_level']})  "
          f"E_L2={summary['e_l2']:.6e} (level {summary['e_l2_level']})")
    print(f"wrote {out / 'compare.csv'}")
    return 0


def cmd_convergence(args):
    cfg = _load_config(args)
    rows = convergence_ladder(cfg, ladder=args.ladder,
                              doublings=args.doublings, workers=args.workers)
    out = _out_dir(args)
    path = out / f"convergence_{args.ladder}.csv"
    names = ["count1", "count2", "levels", "e_c", "ratio_e_c", "e_l2",
             "ratio_e_l2"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in rows:
            writer.writerow(["" if row.get(k) is None else
                             (f"{row[k]:.6e}" if isinstance(row[k], float)
                              else row[k]) for k in names])
    for row in rows:
        rc = row["ratio_e_c"]
        rl = row["ratio_e_l2"]
        print(f"(J1,J2,M)=({row['count1']},{row['count2']},{row['levels']})  "
              f"E_C={row['e_c']:.3e}" + (f" R_C={rc:.2f}" if rc else "")
              + f"  E_L2={row['e_l2']:.3e}" + (f" R_L2={rl:.2f}" if rl else ""))
    print(f"wrote {path}")
    return 0


def cmd_spectra(args):
    counts = tuple(int(v) for v in args.counts.split(","))
    if args.extents:
        extents = tuple(float(v) for v in args.extents.split(","))
        if len(extents) != len(counts):
            raise ConfigError("--extents and --counts disagree on dimension")
    else:
        extents = (1.0,) * len(counts)
    steps = tuple(x / j for x, j in zip(extents, counts))
    rng = np.random.default_rng(args.seed)
    survey = spectral_survey(counts, steps, rng=rng,
                             sample_budget=args.samples)
    out = _out_dir(args)
    path = out / "spectra.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["field", "value"])
        for name in ("counts", "total_modes", "modes_checked", "enumerated",
                     "lam_sN_min", "lam_sN_argmin", "lam_sN_max",
                     "lam_sbarN_min", "lam_sbarN_max", "ratio_dhN_min",
                     "ratio_dbarN_min", "corner_lam_sN"):
            writer.writerow([name, getattr(survey, name)])
    if args.mode:
        mode = tuple(int(v) for v in args.mode.split(","))
        rep = eigen_report(mode, counts, steps)
        print(f"mode {mode}: lam_sN={rep.lam_sN:.6g} lam_sbarN={rep.lam_sbarN:.6g} "
              f"lam_dh={rep.lam_dh:.6g} lam_dhN={rep.lam_dhN:.6g} "
              f"lam_dbarN={rep.lam_dbarN:.6g}")
    print(f"lam_sN in [{survey.lam_sN_min:.6g}, {survey.lam_sN_max:.6g}] "
          f"(argmin {survey.lam_sN_argmin}); "
          f"lam_sbarN in [{survey.lam_sbarN_min:.6g}, {survey.lam_sbarN_max:.6g}]")
    print(f"wrote {path}")
    return 0


def cmd_kernel_dump(args):
    consts = PhysicalConstants(hbar=args.hbar, c_hbar=args.c_hbar)
    coeffs = kernel_coefficients(args.v_limit, args.tau, args.h1, consts)
    table = kernel_table(coeffs, args.m_max)
    out = _out_dir(args)
    path = out / "kernel.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "real", "imag"])
        for m, value in enumerate(table.values):
            writer.writerow([m, f"{value.real:.17g}", f"{value.imag:.17g}"])
    print(f"mu={coeffs.mu:.12g} arg_alpha={coeffs.arg_alpha:.12g} "
          f"c1={coeffs.c1:.12g}")
    print(f"wrote {path}")
    return 0


def _add_common(sub):
    sub.add_argument("--config", help="INI configuration file")
    sub.add_argument("--preset", help="baseline scenario: exampleA, exampleB, "
                                      "exampleB-barrier")
    sub.add_argument("--out", default="qstrip-out", help="output directory")
    sub.add_argument("--workers", type=int, default=1,
                     help="worker threads for the per-mode solves (results are "
                          "identical for any value)")
    sub.add_argument("--snapshot-stride", type=int, default=None,
                     help="override [output] snapshot_stride")


def main(argv=None):
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(
        prog="qstrip",
        description="Split higher-order finite-difference solver for the "
                    "time-dependent Schrödinger equation on a strip, with "
                    "discrete transparent boundary conditions.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="run one simulation")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = subs.add_parser("compare", help="error norms against a reference "
                                            "run on an enlarged Dirichlet box")
    _add_common(p_cmp)
    p_cmp.add_argument("--reference-variant", default=COMPARISON_DIRICHLET,
                       choices=VARIANTS)
    p_cmp.set_defaults(func=cmd_compare)

    p_conv = subs.add_parser("convergence", help="refinement ladder of compares")
    _add_common(p_conv)
    p_conv.add_argument("--ladder", default="joint",
                        choices=("axis1", "axis2", "joint"))
    p_conv.add_argument("--doublings", type=int, default=2)
    p_conv.set_defaults(func=cmd_convergence)

    p_spec = subs.add_parser("spectra", help="eigenvalue survey of the "
                                             "averaged operators")
    p_spec.add_argument("--counts", required=True,
                        help="interval counts, e.g. 64,64,64")
    p_spec.add_argument("--extents", help="axis extents (default: all 1.0)")
    p_spec.add_argument("--samples", type=int, default=100_000)
    p_spec.add_argument("--seed", type=int, default=0)
    p_spec.add_argument("--mode", help="also report one mode, e.g. 15,15,15")
    p_spec.add_argument("--out", default="qstrip-out")
    p_spec.set_defaults(func=cmd_spectra)

    p_ker = subs.add_parser("kernel-dump", help="transparent-boundary kernel "
                                                "coefficients as CSV")
    p_ker.add_argument("--v-limit", type=float, default=0.0, dest="v_limit")
    p_ker.add_argument("--tau", type=float, required=True)
    p_ker.add_argument("--h1", type=float, required=True)
    p_ker.add_argument("--hbar", type=float, default=1.0)
    p_ker.add_argument("--c-hbar", type=float, default=1.0, dest="c_hbar")
    p_ker.add_argument("--m-max", type=int, default=100, dest="m_max")
    p_ker.add_argument("--out", default="qstrip-out")
    p_ker.set_defaults(func=cmd_kernel_dump)

    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) is not None and \
            getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
