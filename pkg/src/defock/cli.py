"""Command-line front end.

Subcommands: ``state``, ``metrics``, ``autocorr``, ``entropy-scan``,
``measure-check``.  Exit codes: 0 ok, 1 I/O failure, 2 validation
failure, 3 truncation/divergence, 4 tolerance failure.  Identical
invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import beamsplitter as bsm
from . import fock_io, measure, metrics, states
from .deform import Deformation
from .errors import (
    DefockError,
    DegenerateStateError,
    DivergenceError,
    ToleranceError,
    TruncationError,
    ValidationError,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_TRUNCATION = 3
EXIT_TOLERANCE = 4

_FAMILIES = (
    "glauber",
    "nlcs",
    "q-coherent",
    "gk",
    "nc-squeezed",
    "ho-squeezed",
    "cat",
    "pacs",
)

_FAMILY_PARAMS = {
    # family -> (needs tau, needs q)
    "glauber": (False, False),
    "nlcs": (True, False),
    "q-coherent": (False, True),
    "gk": (True, False),
    "nc-squeezed": (True, False),
    "ho-squeezed": (False, False),
    "cat": (False, True),
    "pacs": (False, True),
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--deformation", choices=("harmonic", "nc", "q"))
    p.add_argument("--tau", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha-re", type=float, default=0.0)
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--zeta", type=float, default=0.0)
    p.add_argument("--J", type=float)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--parity", choices=("even", "odd"))
    p.add_argument("--basis", choices=("bare", "perturbed"), default="perturbed")
    p.add_argument("--nmax", type=int, default=states.DEFAULT_N_MAX)
    p.add_argument("--theta", type=float, default=math.pi / 2.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=0.5)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--out", default=".")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--format",
        choices=("csv", "json", "svg", "all"),
        default="all",
        help="restrict which artifact kinds are written",
    )


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="defock",
        description="Deformed-oscillator state toolkit",
    )
    parser.add_argument("--config", help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="construct a state, dump JSON + CSV")
    p_state.add_argument("--family", choices=_FAMILIES, required=True)
    _add_common(p_state)

    p_metrics = sub.add_parser("metrics", help="nonclassicality report")
    p_metrics.add_argument("--family", choices=_FAMILIES, required=True)
    p_metrics.add_argument("--number", choices=("bare", "deformed"), default="bare")
    _add_common(p_metrics)

    p_auto = sub.add_parser("autocorr", help="Gazeau-Klauder autocorrelation trace")
    p_auto.add_argument("--tmax", type=float, required=True)
    p_auto.add_argument("--points", type=int, required=True)
    p_auto.add_argument("--nbar", type=float, help="explicit nbar for t_cl")
    _add_common(p_auto)

    p_scan = sub.add_parser("entropy-scan", help="beam-splitter entropy scan")
    p_scan.add_argument(
        "--family",
        choices=("nlcs", "nc-squeezed", "ho-squeezed", "glauber"),
        required=True,
    )
    p_scan.add_argument("--alphas", help="comma list of alpha values")
    p_scan.add_argument("--alpha-max", type=float)
    p_scan.add_argument("--alpha-steps", type=int)
    p_scan.add_argument("--taus", help="comma list of tau values")
    _add_common(p_scan)

    p_meas = sub.add_parser("measure-check", help="measure moment verification")
    p_meas.add_argument("--moments", type=int, default=10)
    p_meas.add_argument("--tol", type=float, default=1e-6)
    _add_common(p_meas)

    if defaults:
        mapped = {k.replace("-", "_"): v for k, v in defaults.items()}
        for p in (parser, p_state, p_metrics, p_auto, p_scan, p_meas):
            p.set_defaults(**mapped)
    return parser


def _alpha(args) -> complex:
    return complex(args.alpha_re, args.alpha_im)


def _require(args, attr, family):
    value = getattr(args, attr)
    if value is None:
        raise ValidationError(f"--{attr.replace('_', '-')} is required for {family}")
    return value


def _reject_contradictions(args, family):
    needs_tau, needs_q = _FAMILY_PARAMS[family]
    if needs_tau and args.q is not None:
        raise ValidationError(f"--q contradicts family {family}")
    if needs_q and args.tau is not None:
        raise ValidationError(f"--tau contradicts family {family}")
    if args.deformation == "nc" and needs_q:
        raise ValidationError(f"--deformation nc contradicts family {family}")
    if args.deformation == "q" and needs_tau:
        raise ValidationError(f"--deformation q contradicts family {family}")


def _build_state(args, family):
    _reject_contradictions(args, family)
    alpha = _alpha(args)
    n_max = args.nmax
    if family == "glauber":
        return states.glauber(alpha, n_max), Deformation.harmonic()
    if family == "nlcs":
        tau = _require(args, "tau", family)
        d = Deformation.perturbative_nc(tau)
        return states.nlcs(alpha, tau, n_max, basis=args.basis), d
    if family == "q-coherent":
        q = _require(args, "q", family)
        return states.q_coherent(alpha, q, n_max), Deformation.q_deformed(q)
    if family == "gk":
        tau = _require(args, "tau", family)
        j_val = _require(args, "J", family)
        d = Deformation.perturbative_nc(tau)
        return (
            states.gk_coherent(j_val, args.gamma, tau, n_max, basis=args.basis),
            d,
        )
    if family == "nc-squeezed":
        tau = _require(args, "tau", family)
        d = Deformation.perturbative_nc(tau)
        return (
            states.nc_squeezed(alpha, args.zeta, tau, n_max, basis=args.basis),
            d,
        )
    if family == "ho-squeezed":
        return states.ho_squeezed(alpha, args.zeta, n_max), Deformation.harmonic()
    if family == "cat":
        q = _require(args, "q", family)
        parity = _require(args, "parity", family)
        return states.cat_q(alpha, q, parity, n_max), Deformation.q_deformed(q)
    q = _require(args, "q", family)
    return states.pacs_q(alpha, q, args.m, n_max), Deformation.q_deformed(q)


def _norm_constant(args, family) -> float:
    alpha = _alpha(args)
    lam = abs(alpha) ** 2
    if family == "glauber":
        return math.exp(lam / 2.0)
    if family == "nlcs":
        return states.nlcs_normalization(alpha, args.tau)
    if family == "q-coherent":
        return math.sqrt(states.q_exponential(lam, args.q))
    if family == "gk":
        return states.gk_normalization(args.J, args.tau)
    if family == "nc-squeezed":
        d = Deformation.perturbative_nc(args.tau)
        return states.squeezed_normalization(alpha, args.zeta, d, args.nmax)
    if family == "ho-squeezed":
        d = Deformation.harmonic()
        return states.squeezed_normalization(alpha, args.zeta, d, args.nmax)
    if family == "cat":
        return math.sqrt(states.cat_norm_sq(alpha, args.q, args.parity))
    return math.sqrt(states.pacs_norm_sq(alpha, args.q, args.m))


def _wants(args, kind) -> bool:
    return args.format in ("all", kind)


def cmd_state(args) -> int:
    state, _ = _build_state(args, args.family)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if _wants(args, "json"):
        (out / "state.json").write_text(state.to_json() + "\n", encoding="utf-8")
    if _wants(args, "csv"):
        dist = metrics.photon_distribution(state)
        table = fock_io.ScanTable(
            columns=["n", "P_n"],
            provenance={"label": state.label},
        )
        for n, p in enumerate(dist):
            table.append([n, float(p)])
        fock_io.write_csv(table, out / "photon_distribution.csv")
    norm_const = _norm_constant(args, args.family)
    print(
        f"family={args.family} n_max={state.n_max} "
        f"norm_const={fock_io.format_real(norm_const)} "
        f"tail_mass={state.tail_mass:.3e} mean_n={state.mean_n():.12g}"
    )
    return EXIT_OK


def cmd_metrics(args) -> int:
    state, deformation = _build_state(args, args.family)
    report = metrics.nonclassicality_report(
        state, deformation, number_convention=args.number
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if _wants(args, "json"):
        (out / "metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")
    print(f"state      : {state.label}")
    print(f"number conv: {args.number}")
    for name, value in (
        ("var_y", report.var_y),
        ("var_z", report.var_z),
        ("gur_rhs", report.gur_rhs),
        ("mandel_q", report.mandel_q),
        ("g2_zero", report.g2_zero),
        ("mean_n", report.mean_n),
    ):
        print(f"{name:<10} : {value:.12g}")
    return EXIT_OK


def cmd_autocorr(args) -> int:
    if args.J is None:
        raise ValidationError("--J is required for autocorr")
    if args.tau is None:
        raise ValidationError("--tau is required for autocorr")
    if args.points < 2 or args.tmax <= 0:
        raise ValidationError("need --points >= 2 and --tmax > 0")
    t = np.linspace(0.0, args.tmax, args.points)
    a = metrics.gk_autocorrelation(
        args.J, args.gamma, args.tau, args.omega, t, n_max=args.nmax
    )
    if args.nbar is not None:
        times = metrics.revival_times(
            args.J, args.tau, args.omega, args.hbar,
            nbar_rule="explicit", nbar=args.nbar,
        )
    else:
        times = metrics.revival_times(
            args.J, args.tau, args.omega, args.hbar, nbar_rule="mean"
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = fock_io.ScanTable(
        columns=["t", "A"],
        provenance={
            "J": fock_io.format_real(args.J),
            "gamma": fock_io.format_real(args.gamma),
            "tau": fock_io.format_real(args.tau),
            "omega": fock_io.format_real(args.omega),
        },
    )
    for tv, av in zip(t, a):
        table.append([float(tv), float(av)])
    if _wants(args, "csv"):
        fock_io.write_csv(table, out / "autocorr.csv")
    if _wants(args, "svg"):
        fock_io.write_svg_lineplot(
            table, "t", ["A"], out / "autocorr.svg",
            style={"title": "autocorrelation", "xlabel": "t"},
        )
    peaks = metrics.detect_peaks(t, a, min_height=0.2)
    peak_str = " ".join(f"{p:.4g}" for p in peaks[:12])
    print(f"t_cl={times.t_cl:.2f} t_rev={times.t_rev:.2f}")
    print(f"peaks: {peak_str}")
    return EXIT_OK


def _parse_grid(text):
    values = [float(v) for v in text.split(",") if v.strip() != ""]
    return values


def cmd_entropy_scan(args) -> int:
    family = args.family.replace("-", "_")
    if args.alphas:
        alphas = _parse_grid(args.alphas)
    elif args.alpha_max is not None and args.alpha_steps:
        if args.alpha_steps < 1:
            raise ValidationError("--alpha-steps must be >= 1")
        alphas = list(np.linspace(0.0, args.alpha_max, args.alpha_steps))
    else:
        raise ValidationError("give --alphas or --alpha-max/--alpha-steps")
    if not alphas:
        raise ValidationError("alpha grid is empty")
    taus = _parse_grid(args.taus) if args.taus else None
    if family in ("nlcs", "nc_squeezed") and not taus:
        raise ValidationError(f"--taus is required for family {args.family}")
    bs = bsm.BeamSplitter(theta=args.theta, phi=args.phi)
    table = bsm.entropy_scan(
        family,
        alphas,
        taus,
        zeta=args.zeta,
        bs=bs,
        n_max=args.nmax,
        workers=args.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if _wants(args, "csv"):
        fock_io.write_csv(table, out / "entropy_scan.csv")
    if _wants(args, "svg"):
        fock_io.write_svg_lineplot(
            table, "alpha", ["S_direct"], out / "entropy_scan.svg",
            style={"title": f"linear entropy ({args.family})", "xlabel": "alpha"},
        )
    flagged = sum(1 for row in table.rows if row[-1])
    print(f"rows={len(table.rows)} flagged={flagged}")
    return EXIT_OK


def cmd_measure_check(args) -> int:
    if args.tau is None or args.tau <= 0:
        raise ValidationError("measure-check needs --tau > 0")
    if args.moments < 0:
        raise ValidationError("--moments must be >= 0")
    params = measure.calibrate(args.tau)
    checks = measure.moment_table(params, args.moments)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = fock_io.ScanTable(
        columns=["n", "computed", "target", "rel_err"],
        provenance={
            "tau": fock_io.format_real(args.tau),
            "mu": fock_io.format_real(params.mu),
            "beta": fock_io.format_real(params.beta),
            "norm": fock_io.format_real(params.norm),
        },
    )
    worst = 0.0
    for chk in checks:
        worst = max(worst, chk.rel_err)
        table.append([chk.n, chk.computed, chk.target, chk.rel_err])
    if _wants(args, "csv"):
        fock_io.write_csv(table, out / "measure_check.csv")
    print(f"tau={args.tau} mu={params.mu} moments<=n={args.moments} worst_rel_err={worst:.3e}")
    if worst > args.tol:
        raise ToleranceError(
            f"worst relative moment error {worst:.3e} exceeds tolerance {args.tol:.1e}"
        )
    return EXIT_OK


_DISPATCH = {
    "state": cmd_state,
    "metrics": cmd_metrics,
    "autocorr": cmd_autocorr,
    "entropy-scan": cmd_entropy_scan,
    "measure-check": cmd_measure_check,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    defaults = None
    if known.config:
        try:
            defaults = json.loads(Path(known.config).read_text(encoding="utf-8"))
        except OSError:
            print(f"cannot read config {known.config}", file=sys.stderr)
            return EXIT_IO
        except json.JSONDecodeError as exc:
            print(f"malformed config {known.config}: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        if not isinstance(defaults, dict):
            print("config must be a JSON object", file=sys.stderr)
            return EXIT_VALIDATION
    parser = build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        return _DISPATCH[args.command](args)
    except (ValidationError, DegenerateStateError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TruncationError, DivergenceError) as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except ToleranceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DefockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry():  # console-script hook
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
