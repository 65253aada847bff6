"""Run/sweep orchestration, result files, figure presets, and the CLI.

Results go out as one CSV per sweep (plot-ready time series, column set a
function of n_sector_max only) plus one JSON with full per-point detail.
Sweep points are content-addressed by config hash under
``<outputs>/points/`` so a rerun reuses finished points byte-identically.
The ``DIRACPAIRS_OUTDIR`` environment variable overrides the output
directory.

Exit codes: 0 success, 2 validation error, 3 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import dynamics, fockoracle, multipair
from .errors import NumericalToleranceError, ValidationError
from .fieldmodel import electric_field_at, potential_vector_at
from .modebasis import Band, ModeBasis, Spin, build_basis
from .physconfig import (RunConfig, WindowParams, NumericsParams,
                         HelicityRelation, config_from_dict, config_to_dict,
                         config_hash, field_from_si, validate, with_plateau)

TOP_PAIRS_IN_ROW = 8


@dataclass
class ResultRow:
    """Flat readout of one run, mirroring the sector report."""

    sweep_value: float | None
    plateau_cycles: int
    total_cycles: int
    cv_abs2: float
    c: list
    s_plus: dict
    s_minus: dict
    h_plus: dict
    h_minus: dict
    top_pairs: list              # (electron label str, positron label str, prob)
    unitarity_defect: float
    cond_gmm: float
    discarded_mass: float
    n_retained_pairs: int
    pair_list: list = field(default_factory=list)  # full retained set (JSON only)
    error: str = ""


@dataclass
class SweepSpec:
    base: RunConfig
    sweep_axis: str              # plateau_cycles | alpha_plus | k0_z
    values: list
    outputs: str
    emit: dict = field(default_factory=lambda: {
        "sectors": True, "pairs": True, "gdump": False})


def _label_str(basis: ModeBasis, band: Band, half_index: int) -> str:
    label = (basis.electron_label(half_index) if band is Band.PLUS
             else basis.positron_label(half_index))
    spin = "u" if label.spin is Spin.UP else "d"
    return f"{label.n:+d}{spin}"


def _readout(config: RunConfig, basis: ModeBasis, u: dynamics.Propagator,
             sweep_value, with_sectors: bool = True,
             with_pairs: bool = True) -> ResultRow:
    g = dynamics.extract_g_blocks(u, basis, config)
    pairs = multipair.pair_amplitudes(g)
    vac = multipair.vacuum_amplitude(g)
    retained = multipair.single_pair_list(pairs, vac, config.numerics)
    if with_sectors:
        report = multipair.sector_observables(pairs, vac, basis, config.numerics)
    else:
        report = multipair.SectorReport(
            n_sector_max=config.numerics.n_sector_max,
            c=np.full(config.numerics.n_sector_max + 1, np.nan),
            discarded_mass_bound=float("nan"),
            n_retained_pairs=len(retained))
        report.c[0] = vac.probability
    top_pairs = [(_label_str(basis, Band.PLUS, a.electrons[0]),
                  _label_str(basis, Band.MINUS, a.positrons[0]),
                  float(abs(a.amplitude) ** 2))
                 for a in retained[:TOP_PAIRS_IN_ROW]]
    pair_list = [list(t) for t in (
        (_label_str(basis, Band.PLUS, a.electrons[0]),
         _label_str(basis, Band.MINUS, a.positrons[0]),
         float(abs(a.amplitude) ** 2)) for a in retained)] if with_pairs else []
    return ResultRow(
        sweep_value=sweep_value,
        plateau_cycles=config.window.plateau_cycles,
        total_cycles=config.window.total_cycles,
        cv_abs2=vac.probability,
        c=[float(x) for x in report.c],
        s_plus=dict(report.s_plus), s_minus=dict(report.s_minus),
        h_plus=dict(report.h_plus), h_minus=dict(report.h_minus),
        top_pairs=top_pairs,
        unitarity_defect=u.unitarity_defect,
        cond_gmm=pairs.cond_mm,
        discarded_mass=report.discarded_mass_bound,
        n_retained_pairs=report.n_retained_pairs,
        pair_list=pair_list,
    )


def run_once(config: RunConfig, sweep_value=None, with_sectors: bool = True,
             with_pairs: bool = True) -> ResultRow:
    """Propagate one configuration and read out the full pair content."""
    validate(config)
    basis = build_basis(config.numerics, config.field)
    u = dynamics.propagate(config, basis)
    return _readout(config, basis, u, sweep_value, with_sectors, with_pairs)


# ---------------------------------------------------------------------------
# CSV / JSON serialization
# ---------------------------------------------------------------------------

def csv_header(n_sector_max: int) -> str:
    cols = ["sweep_value", "plateau_cycles", "total_cycles", "cv_abs2"]
    cols += [f"c_{n}" for n in range(1, n_sector_max + 1)]
    for prefix in ("s_plus", "s_minus", "h_plus", "h_minus"):
        cols += [f"{prefix}_{n}" for n in range(1, n_sector_max + 1)]
    cols += ["top_pair_prob", "top_pair_electron", "top_pair_positron",
             "unitarity_defect", "cond_gmm", "discarded_mass",
             "n_retained_pairs", "error"]
    return ",".join(cols)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        return repr(x)
    return str(x)


def csv_row(row: ResultRow, n_sector_max: int) -> str:
    vals = [_fmt(row.sweep_value), _fmt(row.plateau_cycles),
            _fmt(row.total_cycles), _fmt(row.cv_abs2)]
    c = list(row.c) + [float("nan")] * (n_sector_max + 1)
    vals += [_fmt(float(c[n])) for n in range(1, n_sector_max + 1)]
    for obs in (row.s_plus, row.s_minus, row.h_plus, row.h_minus):
        vals += [_fmt(obs.get(n)) for n in range(1, n_sector_max + 1)]
    if row.top_pairs:
        e_lbl, p_lbl, prob = row.top_pairs[0]
        vals += [_fmt(prob), e_lbl, p_lbl]
    else:
        vals += ["", "", ""]
    vals += [_fmt(row.unitarity_defect), _fmt(row.cond_gmm),
             _fmt(row.discarded_mass), _fmt(row.n_retained_pairs), row.error]
    return ",".join(vals)


def _jsonable(x):
    """NaN -> null so the emitted JSON stays standards-compliant."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) else x
    return x


def row_to_dict(row: ResultRow) -> dict:
    return {
        "sweep_value": row.sweep_value,
        "plateau_cycles": row.plateau_cycles,
        "total_cycles": row.total_cycles,
        "cv_abs2": _jsonable(row.cv_abs2),
        "c": [_jsonable(x) for x in row.c],
        "s_plus": {str(k): v for k, v in row.s_plus.items()},
        "s_minus": {str(k): v for k, v in row.s_minus.items()},
        "h_plus": {str(k): v for k, v in row.h_plus.items()},
        "h_minus": {str(k): v for k, v in row.h_minus.items()},
        "top_pairs": [list(t) for t in row.top_pairs],
        "unitarity_defect": _jsonable(row.unitarity_defect),
        "cond_gmm": _jsonable(row.cond_gmm),
        "discarded_mass": _jsonable(row.discarded_mass),
        "n_retained_pairs": row.n_retained_pairs,
        "pair_list": [list(t) for t in row.pair_list],
        "error": row.error,
    }


def _unjson(x):
    return float("nan") if x is None else x


def row_from_dict(d: dict) -> ResultRow:
    return ResultRow(
        sweep_value=d["sweep_value"],
        plateau_cycles=d["plateau_cycles"],
        total_cycles=d["total_cycles"],
        cv_abs2=_unjson(d["cv_abs2"]),
        c=[_unjson(x) for x in d["c"]],
        s_plus={int(k): v for k, v in d["s_plus"].items()},
        s_minus={int(k): v for k, v in d["s_minus"].items()},
        h_plus={int(k): v for k, v in d["h_plus"].items()},
        h_minus={int(k): v for k, v in d["h_minus"].items()},
        top_pairs=[tuple(t) for t in d["top_pairs"]],
        unitarity_defect=_unjson(d["unitarity_defect"]),
        cond_gmm=_unjson(d["cond_gmm"]),
        discarded_mass=_unjson(d["discarded_mass"]),
        n_retained_pairs=d["n_retained_pairs"],
        pair_list=[tuple(t) for t in d.get("pair_list", [])],
        error=d.get("error", ""),
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _point_config(spec: SweepSpec, value) -> RunConfig:
    base = spec.base
    if spec.sweep_axis == "plateau_cycles":
        return with_plateau(base, int(value))
    if spec.sweep_axis == "alpha_plus":
        alpha_plus = float(value)
        if base.field.helicity_relation is HelicityRelation.SAME:
            alpha_minus = math.pi / 2.0 - alpha_plus
        else:
            alpha_minus = alpha_plus
        return replace(base, field=replace(base.field, alpha_plus=alpha_plus,
                                           alpha_minus=alpha_minus))
    if spec.sweep_axis == "k0_z":
        k0 = (base.numerics.k0_offset[0], base.numerics.k0_offset[1],
              float(value))
        return replace(base, numerics=replace(base.numerics, k0_offset=k0))
    raise ValidationError(f"sweep_axis: unknown axis {spec.sweep_axis!r}")


def _outdir(spec: SweepSpec) -> str:
    return os.environ.get("DIRACPAIRS_OUTDIR", spec.outputs)


def run_sweep(spec: SweepSpec) -> dict:
    """Run all sweep points; returns {"csv": path, "json": path}.

    Plateau sweeps reuse the ramp and one-cycle propagators across points.
    Failed points are recorded with their error string and the sweep
    continues.
    """
    if not spec.values:
        raise ValidationError("sweep: values must be non-empty")
    validate(spec.base)
    outdir = _outdir(spec)
    points_dir = os.path.join(outdir, "points")
    os.makedirs(points_dir, exist_ok=True)
    with_sectors = bool(spec.emit.get("sectors", True))

    segments = None
    basis = build_basis(spec.base.numerics, spec.base.field)
    with_pairs = bool(spec.emit.get("pairs", True))
    rows = []
    for value in spec.values:
        config = _point_config(spec, value)
        tag = config_hash(config) + ("-s" if with_sectors else "")
        cache = os.path.join(points_dir, f"{tag}.json")
        if os.path.exists(cache):
            with open(cache) as fh:
                rows.append(row_from_dict(json.load(fh)))
            continue
        try:
            if spec.sweep_axis == "plateau_cycles":
                if segments is None:
                    segments = dynamics.propagator_segments(spec.base, basis)
                u = dynamics.cycle_compose(*segments, int(value))
                row = _readout(config, basis, u, float(value), with_sectors,
                               with_pairs)
                if spec.emit.get("gdump"):
                    g = dynamics.extract_g_blocks(u, basis, config)
                    for name, matrix in (("u", u.matrix), ("gpm", g.g_pm),
                                         ("gmm", g.g_mm)):
                        dynamics.dump_complex_matrix(
                            os.path.join(points_dir, f"{tag}-{name}.bin"),
                            matrix)
            else:
                row = run_once(config, sweep_value=float(value),
                               with_sectors=with_sectors,
                               with_pairs=with_pairs)
        except (ValidationError, NumericalToleranceError) as exc:
            row = ResultRow(sweep_value=float(value),
                            plateau_cycles=config.window.plateau_cycles,
                            total_cycles=config.window.total_cycles,
                            cv_abs2=float("nan"), c=[],
                            s_plus={}, s_minus={}, h_plus={}, h_minus={},
                            top_pairs=[], unitarity_defect=float("nan"),
                            cond_gmm=float("nan"), discarded_mass=float("nan"),
                            n_retained_pairs=0,
                            error=f"{type(exc).__name__}: {exc}")
        with open(cache, "w") as fh:
            json.dump(row_to_dict(row), fh, sort_keys=True)
        rows.append(row)

    k = spec.base.numerics.n_sector_max
    csv_path = os.path.join(outdir, f"sweep_{spec.sweep_axis}.csv")
    json_path = os.path.join(outdir, f"sweep_{spec.sweep_axis}.json")
    with open(csv_path, "w") as fh:
        fh.write(csv_header(k) + "\n")
        for row in rows:
            fh.write(csv_row(row, k) + "\n")
    with open(json_path, "w") as fh:
        json.dump({"spec": sweep_spec_to_dict(spec),
                   "rows": [row_to_dict(r) for r in rows]},
                  fh, indent=1, sort_keys=True)
    return {"csv": csv_path, "json": json_path}


def sweep_spec_to_dict(spec: SweepSpec) -> dict:
    return {"base": config_to_dict(spec.base), "sweep_axis": spec.sweep_axis,
            "values": list(spec.values), "outputs": spec.outputs,
            "emit": dict(spec.emit)}


def sweep_spec_from_dict(d: dict) -> SweepSpec:
    emit = {"sectors": True, "pairs": True, "gdump": False}
    emit.update(d.get("emit", {}))
    return SweepSpec(base=config_from_dict(d["base"]),
                     sweep_axis=d["sweep_axis"], values=list(d["values"]),
                     outputs=d.get("outputs", "out"), emit=emit)


# ---------------------------------------------------------------------------
# Figure presets.  Field values are taken from the reported setups; every
# field marked "artifact-default" below is our choice, not a published one.
# ---------------------------------------------------------------------------

def figure_configs() -> dict:
    """Named reproduction presets with provenance metadata."""
    numerics = NumericsParams(n_cut=4, steps_per_cycle=1024,
                              prune_threshold=1e-6, n_sector_max=4)
    window = WindowParams(ramp_cycles=5, plateau_cycles=10)
    fig2_field = field_from_si(4.9e17, 0.746, 0.2 * math.pi / 4.0,
                               HelicityRelation.SAME)
    fig4_field = field_from_si(3.1e17, 0.4715, 0.7 * math.pi / 4.0,
                               HelicityRelation.OPPOSITE)
    meta_common = {
        "field.omega": "published setup",
        "field.e_peak": "published setup (converted from V/m)",
        "field.alpha_plus": "published setup",
        "field.helicity_relation": "published setup",
        "window.ramp_cycles": "artifact-default",
        "window.plateau_cycles": "artifact-default (sweep this axis)",
        "numerics.n_cut": "artifact-default",
        "numerics.steps_per_cycle": "artifact-default",
        "numerics.prune_threshold": "artifact-default",
        "numerics.n_sector_max": "artifact-default",
    }
    fig2 = RunConfig(field=fig2_field, window=window, numerics=numerics)
    fig4 = RunConfig(field=fig4_field, window=window, numerics=numerics)
    fig3_meta = dict(meta_common)
    fig3_meta["_note"] = "same field setup as fig2; helicity readout emphasized"
    return {
        "fig2": (fig2, dict(meta_common)),
        "fig3": (fig2, fig3_meta),
        "fig4": (fig4, dict(meta_common)),
    }


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------

def _load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return validate(config_from_dict(json.load(fh)))


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    row = run_once(config)
    outdir = os.environ.get("DIRACPAIRS_OUTDIR", args.out)
    os.makedirs(outdir, exist_ok=True)
    k = config.numerics.n_sector_max
    base = os.path.join(outdir, f"run_{config_hash(config)}")
    with open(base + ".csv", "w") as fh:
        fh.write(csv_header(k) + "\n" + csv_row(row, k) + "\n")
    with open(base + ".json", "w") as fh:
        json.dump({"config": config_to_dict(config), "row": row_to_dict(row)},
                  fh, indent=1, sort_keys=True)
    print(f"|C_v|^2 = {row.cv_abs2:.6g}")
    for n in range(1, k + 1):
        print(f"c_{n} = {row.c[n]:.6g}")
    print(f"wrote {base}.csv and {base}.json")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.spec) as fh:
        spec = sweep_spec_from_dict(json.load(fh))
    paths = run_sweep(spec)
    print(f"wrote {paths['csv']} and {paths['json']}")
    return 0


def _cmd_preset(args) -> int:
    presets = figure_configs()
    if args.name not in presets:
        raise ValidationError(f"preset: unknown name {args.name!r}; "
                              f"have {sorted(presets)}")
    config, meta = presets[args.name]
    if args.emit_config:
        text = json.dumps({**config_to_dict(config), "_meta": meta},
                          indent=2, sort_keys=True)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return 0


def _cmd_oracle_check(args) -> int:
    config = _load_config(args.config)
    basis = build_basis(config.numerics, config.field)
    u = dynamics.propagate(config, basis)
    g = dynamics.extract_g_blocks(u, basis, config)
    pairs = multipair.pair_amplitudes(g)
    vac = multipair.vacuum_amplitude(g)

    state = fockoracle.propagate_vacuum(config, basis)
    worst = abs(vac.c_v - fockoracle.vacuum_overlap(state))
    from itertools import combinations
    for n in range(1, args.nmax + 1):
        for es in combinations(range(basis.n_electron_modes), n):
            for ps in combinations(range(basis.n_positron_modes), n):
                det_amp = multipair.multi_pair_amplitude(pairs, vac, es, ps)
                fock_amp = fockoracle.read_amplitude(state, es, ps)
                worst = max(worst, abs(det_amp.amplitude - fock_amp))
    print(f"max |determinant-path - Fock-path| amplitude difference "
          f"(N <= {args.nmax}): {worst:.3e}")
    if args.dump_amplitudes:
        with open(args.dump_amplitudes, "w") as fh:
            fh.write("N,electrons,positrons,re,im\n")
            for n, es, ps, amp in fockoracle.amplitude_table(state):
                fh.write(f"{n},{'|'.join(map(str, es))},"
                         f"{'|'.join(map(str, ps))},{amp.real!r},{amp.imag!r}\n")
        print(f"wrote {args.dump_amplitudes}")
    if worst > args.tol:
        raise NumericalToleranceError(
            f"oracle-check: amplitude difference {worst:.3e} exceeds "
            f"{args.tol:.1e}")
    print("oracle check passed")
    return 0


def _cmd_dump_basis(args) -> int:
    config = _load_config(args.config)
    basis = build_basis(config.numerics, config.field)
    text = basis.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_dump_field(args) -> int:
    config = _load_config(args.config)
    field, window = config.field, config.window
    samples_per_cycle = args.per_cycle
    total = window.total_cycles
    lines = ["t_cycles,Ax,Ay,Az,Ex,Ey,Ez"]
    for i in range(total * samples_per_cycle + 1):
        t_c = i / samples_per_cycle
        t = t_c * field.cycle_duration
        a = potential_vector_at(args.z, t, field, window)
        e = electric_field_at(args.z, t, field, window)
        lines.append(",".join([repr(t_c)] + [repr(float(x)) for x in a]
                              + [repr(float(x)) for x in e]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracpairs",
        description="Pair creation in counterpropagating laser waves: "
                    "propagate, extract pair content, sweep.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="sweep from a JSON spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("preset", help="named reproduction configs")
    p.add_argument("--name", required=True)
    p.add_argument("--emit-config", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("oracle-check",
                       help="compare determinant path against exact Fock propagation")
    p.add_argument("--config", required=True)
    p.add_argument("--nmax", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--dump-amplitudes", default=None,
                   help="write the full Fock amplitude table as CSV")
    p.set_defaults(func=_cmd_oracle_check)

    p = sub.add_parser("dump-basis", help="mode table as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dump_basis)

    p = sub.add_parser("dump-field", help="A(t), E(t) samples as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--per-cycle", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dump_field)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalToleranceError as exc:
        print(f"numerical tolerance failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
