"""``arnold-cat`` command line.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import emit
from .catastrophe import (Estimator, FamilyPath, NumericOptions, PathKind,
                          locus_curve, relocalization_scan)
from .config import RunConfig, load_config, parse_config, parse_range
from .diophantine import (PUBLISHED_WEIGHTS, DEFAULT_BOUND, coupling_formulas, default_weights,
                          format_polynomial, minimal_weights)
from .errors import ArnoldError, NumericalError, ValidationError
from .figures import FIGURES, figure_config
from .perturbation import harmonic_levels, well_models
from .potential import (ShiftParameters, as_number, build_potential, couplings_to_shifts,
                        evaluate, extrema, potential_to_dict)
from .spectral import auto_grid, solve

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _numbers(text: str) -> List:
    return [as_number(t.strip()) for t in text.split(",") if t.strip()]


# -- shared pieces -----------------------------------------------------------

def _solve_config(cfg: RunConfig):
    if cfg.potential is None:
        raise ValidationError("config has no potential")
    grid = cfg.grid or auto_grid(cfg.potential, cfg.states)
    return solve(cfg.potential, grid, cfg.states)


def _curve(pot, cfg_plot, levels=()):
    """Sample V on the plot window (default: just past the outermost extremum)."""
    if "x_range" in cfg_plot:
        x0, x1 = (float(v) for v in cfg_plot["x_range"])
    else:
        try:
            recs = extrema(couplings_to_shifts(pot), pot)
            edge = max(abs(float(r.position)) for r in recs)
        except ArnoldError:
            edge = 1.0
        x1 = 1.2 * edge if edge > 0 else 1.5
        x0 = -x1
    x = np.linspace(x0, x1, 801)
    v = np.asarray(evaluate(pot, x), dtype=float)
    return x, v


def _y_range(v, levels, cfg_plot):
    if "y_range" in cfg_plot:
        return tuple(float(t) for t in cfg_plot["y_range"])
    lo = float(v.min())
    # without levels, show up to the highest interior barrier
    top = max(levels) if levels else max(float(np.max(v[len(v) // 6: 5 * len(v) // 6])), lo)
    span = top - lo or 1.0
    return lo - 0.05 * span, top + 0.15 * span


def _potential_svg(path, pot, cfg_plot, energies=()):
    x, v = _curve(pot, cfg_plot)
    levels = [(float(e), emit.allowed_segments(x, v, float(e))) for e in energies]
    emit.emit_svg(path, [(x, v)], levels, x_range=(float(x[0]), float(x[-1])),
                  y_range=_y_range(v, list(energies), cfg_plot), title=cfg_plot.get("title", ""))


def _locus_outputs(kind, rows, csv_path, svg_path, title=""):
    fixed_name = FamilyPath(kind, 1.0).fixed_name
    swept_name = FamilyPath(kind, 1.0).swept_name
    emit.emit_csv(csv_path, ["fixed_value", "branch", "critical_value", "delta_residual"],
                  [[r.fixed, r.branch or "", r.critical, r.residual] for r in rows])
    if svg_path:
        branches = sorted({r.branch for r in rows if r.branch})
        curves = []
        for b in branches:
            pts = [(r.fixed, r.critical) for r in rows if r.branch == b]
            curves.append((np.array([p[0] for p in pts]), np.array([p[1] for p in pts])))
        markers = [(r.fixed, r.critical) for r in rows if r.branch]
        if kind == PathKind.K5_ALPHA_BETA and rows:
            a = np.array([rows[0].fixed, rows[-1].fixed])
            curves.append((a, a))  # asymptote beta = alpha
        emit.emit_svg(svg_path, curves, markers=markers, title=title,
                      xlabel=fixed_name, ylabel=f"{swept_name} critical")


def well_weights(regions: np.ndarray) -> np.ndarray:
    """Fold mirror regions: entry ``j`` is the weight of well ``j`` counted from the centre."""
    k = len(regions)
    half = k // 2
    if k % 2:
        return np.array([regions[half]] + [regions[half - j] + regions[half + j]
                                           for j in range(1, half + 1)])
    return np.array([regions[half - 1 - j] + regions[half + j] for j in range(half)])


# -- subcommands -------------------------------------------------------------

def cmd_build(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        pot, shift = cfg.potential, cfg.shift
        if pot is None:
            raise ValidationError("config has no potential")
    else:
        weights = tuple(int(w) for w in _numbers(args.weights)) if args.weights else None
        if args.params:
            shift = ShiftParameters.from_params(_numbers(args.params), weights)
        elif args.params_sq:
            shift = ShiftParameters.from_squares(_numbers(args.params_sq), weights)
        else:
            raise ValidationError("build needs --params, --params-sq or --config")
        pot = build_potential(shift, as_number(args.lambda_sq))
    out = potential_to_dict(pot, shift)
    # ascending powers of x; exact values stay exact as strings
    out["coefficients"] = [emit.fmt(c) if isinstance(c, float) else str(c)
                           for c in pot.coefficients()]
    if shift is None:
        try:
            shift = couplings_to_shifts(pot)
        except ArnoldError:
            shift = None
    if shift is not None:
        out["extrema"] = [{"x": float(r.position), "V": float(r.value), "kind": r.kind.value,
                           "degenerate": r.degenerate} for r in extrema(shift, pot)]
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_weights(args) -> int:
    N = args.n
    if args.search or N not in PUBLISHED_WEIGHTS:
        cand = minimal_weights(N, args.bound)
        weights = cand.weights
        if N in PUBLISHED_WEIGHTS:
            same = "equals" if weights == PUBLISHED_WEIGHTS[N] else "differs from"
            print(f"# lexicographic minimum {same} the published tuple {_tuple(PUBLISHED_WEIGHTS[N])}",
                  file=sys.stderr)
    else:
        weights = default_weights(N)
    print(_tuple(weights))
    if args.emit_formulas:
        for m, poly in enumerate(coupling_formulas(N, weights), start=1):
            print(f"c{m}^2 = {format_polynomial(poly)}")
    return EXIT_OK


def _tuple(w) -> str:
    return "(" + ",".join(str(v) for v in w) + ")"


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    res = _solve_config(cfg)
    header, rows = emit.spectrum_rows(res)
    out = args.out or cfg.outputs.get("csv")
    if out:
        emit.emit_csv(out, header, rows)
    else:
        sys.stdout.write(emit.csv_text(header, rows))
    psi = args.dump_psi or cfg.outputs.get("psi")
    if psi:
        emit.emit_csv(psi, *emit.psi_rows(res))
    svg = args.svg or cfg.outputs.get("svg")
    if svg:
        _potential_svg(svg, cfg.potential, cfg.plot, res.energies)
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    pot = cfg.potential
    if pot is None:
        raise ValidationError("config has no potential")
    wells = well_models(pot, cfg.shift)
    n_max = cfg.n_max
    print("well\tposition\tmultiplicity\tdepth\tomega\t"
          + "\t".join(f"E{n}" for n in range(n_max + 1)))
    for i, w in enumerate(wells):
        levels = harmonic_levels(w, n_max)
        print("\t".join([str(i), emit.fmt(w.position), w.multiplicity.value, emit.fmt(w.depth),
                         emit.fmt(w.omega)] + [emit.fmt(e) for e in levels]))
    if args.with_numeric:
        res = _solve_config(cfg)
        print("\nn\tE_numeric\tparity\twell\tweight")
        for n in range(res.n_states):
            ww = well_weights(res.localization[n])
            well = int(np.argmax(ww))
            print(f"{n}\t{emit.fmt(float(res.energies[n]))}\t{res.parities[n].value}\t"
                  f"{well}\t{emit.fmt(float(ww[well]))}")
    return EXIT_OK


def cmd_locus(args) -> int:
    kind = PathKind(args.path)
    rng = parse_range(args.alpha_range)
    rows = locus_curve(kind, rng.values(), Estimator(args.estimator),
                       samples=args.samples, lambda_sq=float(as_number(args.lambda_sq)))
    if args.out:
        _locus_outputs(kind, rows, args.out, args.svg)
    else:
        sys.stdout.write(emit.csv_text(["fixed_value", "branch", "critical_value", "delta_residual"],
                                       [[r.fixed, r.branch or "", r.critical, r.residual]
                                        for r in rows]))
    return EXIT_OK


def _scan_rows(res):
    header = ["value", "ground_energy", "inner", "outer", "dominant", "parity", "ground_doublet"]
    rows = [[s.value, s.ground_energy, s.inner, s.outer, s.dominant, s.parity.value,
             s.ground_doublet] for s in res.samples]
    return header, rows


def cmd_scan(args) -> int:
    rng = parse_range(args.eta_range)
    path = FamilyPath(PathKind(args.path), args.alpha, (rng.start, rng.stop),
                      float(as_number(args.lambda_sq)))
    res = relocalization_scan(path, rng.values(), NumericOptions(args.states))
    header, rows = _scan_rows(res)
    if args.out:
        emit.emit_csv(args.out, header, rows)
    else:
        sys.stdout.write(emit.csv_text(header, rows))
    flip = "none" if res.flip_value is None else emit.fmt(res.flip_value)
    print(f"# flip at {path.swept_name} = {flip}", file=sys.stderr)
    return EXIT_OK


def reproduce(name: str, out_dir: str) -> List[str]:
    """Run a bundled figure config; returns the written paths."""
    if name not in FIGURES:
        raise ValidationError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    os.makedirs(out_dir, exist_ok=True)
    cfg = parse_config(figure_config(name))
    csv_path = os.path.join(out_dir, f"{name}.csv")
    svg_path = os.path.join(out_dir, f"{name}.svg")
    title = cfg.plot.get("title", "")
    if cfg.locus is not None:
        spec = cfg.locus
        rows = locus_curve(spec.kind, spec.fixed_range.values(), spec.estimator,
                           samples=spec.samples, lambda_sq=spec.lambda_sq)
        _locus_outputs(spec.kind, rows, csv_path, svg_path, title)
    elif cfg.grid is not None or "states" in FIGURES[name]:
        res = _solve_config(cfg)
        emit.emit_csv(csv_path, *emit.spectrum_rows(res))
        _potential_svg(svg_path, cfg.potential, cfg.plot, res.energies)
    else:
        x, v = _curve(cfg.potential, cfg.plot)
        emit.emit_csv(csv_path, ["x", "V"], [[float(a), float(b)] for a, b in zip(x, v)])
        _potential_svg(svg_path, cfg.potential, cfg.plot)
    return [csv_path, svg_path]


def cmd_reproduce(args) -> int:
    targets = sorted(FIGURES) if args.figure == "all" else [args.figure]
    for t in targets:
        for p in reproduce(t, args.out_dir):
            print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arnold-cat", description="Symmetric Arnold multi-well potentials: "
                "construction, spectra and relocalization loci.")
    p.add_argument("--seed", type=int, default=None,
                   help="accepted for reproducibility tooling; nothing is stochastic")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build", help="construct a potential and its extrema")
    b.add_argument("--params", help="comma-separated alpha,beta,...")
    b.add_argument("--params-sq", help="comma-separated squares, fractions allowed")
    b.add_argument("--weights", help="comma-separated integer weights")
    b.add_argument("--lambda-sq", default="1")
    b.add_argument("--config")
    b.set_defaults(func=cmd_build)

    w = sub.add_parser("weights", help="integer weight tuple for N")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    w.add_argument("--search", action="store_true",
                   help="run the lexicographic search even where a published tuple exists")
    w.add_argument("--emit-formulas", action="store_true")
    w.set_defaults(func=cmd_weights)

    s = sub.add_parser("solve", help="grid eigenstates")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--dump-psi")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("estimate", help="harmonic well estimates")
    e.add_argument("--config", required=True)
    e.add_argument("--with-numeric", action="store_true")
    e.set_defaults(func=cmd_estimate)

    lo = sub.add_parser("locus", help="critical curve of a path family")
    lo.add_argument("--path", required=True, choices=[k.value for k in PathKind])
    lo.add_argument("--alpha-range", "--fixed-range", dest="alpha_range", required=True,
                    help="start:stop:step of the fixed parameter (beta for k5_mu_ratio)")
    lo.add_argument("--estimator", default="harmonic", choices=[v.value for v in Estimator])
    lo.add_argument("--samples", type=int, default=400)
    lo.add_argument("--lambda-sq", default="1")
    lo.add_argument("--out")
    lo.add_argument("--svg")
    lo.set_defaults(func=cmd_locus)

    sc = sub.add_parser("scan", help="numeric relocalization scan")
    sc.add_argument("--path", required=True, choices=[k.value for k in PathKind])
    sc.add_argument("--alpha", type=float, required=True,
                    help="fixed parameter (beta for k5_mu_ratio)")
    sc.add_argument("--eta-range", "--range", dest="eta_range", required=True,
                    help="start:stop:step of the swept parameter")
    sc.add_argument("--states", type=int, default=8)
    sc.add_argument("--lambda-sq", default="1")
    sc.add_argument("--out")
    sc.set_defaults(func=cmd_scan)

    r = sub.add_parser("reproduce", help="bundled figure runs (CSV + SVG)")
    r.add_argument("figure", choices=sorted(FIGURES) + ["all"])
    r.add_argument("--out-dir", default=".")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except emit.OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
