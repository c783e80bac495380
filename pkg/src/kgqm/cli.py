"""
Command-line entry point: ``kgqm {verify,evolve,spectrum,localized,coherent}``.

Configs are plain ``key=value`` files. Grid keys are those of ``GridSpec``
(``d``, ``n``, ``box_len``, ``mu``, ``lambda``, ``t0``, ``hbar``); the run keys
are ``seed``, ``out`` and ``tolerance.<identity>``. Command-line flags override
the file.

Exit codes: 0 success, 1 identity failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as kio
from .errors import ConfigurationError, KGError
from .foldy import to_foldy
from .grid import CONFIG_KEYS, GridSpec, inner_l2, mode_omega
from .kg_hilbert import KGState, evaluate_at, inner_physical, norm_physical, velocity_at
from .observables import CoherentSpec, coherent_residual, coherent_state, localized_state
from .states import GENERATORS, build_state
from .symmetry import apply_C_kg, grid_summary, relative_residual

log = logging.getLogger("kgqm")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    grid: GridSpec
    seed: int = 0
    tolerance_overrides: dict[str, float] = field(default_factory=dict)
    output_dir: Path = Path(".")


def _parse_tolerance(item: str) -> tuple[str, float]:
    for sep in ("=", ":"):
        if sep in item:
            name, value = item.split(sep, 1)
            try:
                return name.strip(), float(value)
            except ValueError as exc:
                raise ConfigurationError(f"bad tolerance value in {item!r}") from exc
    raise ConfigurationError(f"tolerance override must look like NAME=VALUE, got {item!r}")


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional config file with command-line overrides and validate the grid."""
    raw = kio.read_config(args.config) if args.config else {}
    grid_keys = {k: v for k, v in raw.items() if k in CONFIG_KEYS}
    tolerances = {}
    seed, out = 0, "."
    for key, value in raw.items():
        if key in CONFIG_KEYS:
            continue
        if key == "seed":
            seed = value
        elif key == "out":
            out = value
        elif key.startswith("tolerance."):
            tolerances.update([_parse_tolerance(f"{key[len('tolerance.'):]}={value}")])
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    for flag, key in (("dim", "d"), ("n", "n"), ("mu", "mu"), ("lam", "lambda"), ("box_len", "box_len")):
        value = getattr(args, flag)
        if value is not None:
            grid_keys[key] = value
    if args.seed is not None:
        seed = args.seed
    if args.out is not None:
        out = args.out
    for item in args.tolerance or []:
        tolerances.update([_parse_tolerance(item)])
    try:
        seed = int(seed)
    except ValueError as exc:
        raise ConfigurationError(f"seed must be an integer, got {seed!r}") from exc
    grid = GridSpec.from_mapping(grid_keys)
    return RunConfig(grid, seed, tolerances, Path(out))


def _output_dir(cfg: RunConfig) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg.output_dir


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_complex(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(v.replace(" ", "")) for v in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated complex numbers, got {text!r}") from exc


# -- verbs -----------------------------------------------------------------


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    from .verify import run_verification

    report = run_verification(cfg.grid, cfg.seed, cfg.tolerance_overrides, args.only)
    path = kio.write_json(_output_dir(cfg) / "verify_report.json", report)
    for entry in report["identities"]:
        tol = entry["tolerance"]
        tol_text = "-" if tol is None else f"{tol:.1e}"
        print(f"{entry['status'].upper():8s} {entry['identity']:36s} {entry['residual']:.3e}  tol {tol_text}")
    print(f"report: {path}")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _state_from_args(cfg: RunConfig, args: argparse.Namespace) -> tuple[KGState, str]:
    if args.state:
        s = kio.read_kgstate(args.state)
        return s, str(args.state)
    z = _parse_complex(args.z) if args.z else 0.0
    mode = _parse_ints(args.mode) if args.mode else 1
    return build_state(cfg.grid, args.generator, mode=mode, eps=args.eps, z=z, k_osc=args.k_osc), args.generator


def _phase_frequency(times: np.ndarray, overlaps: np.ndarray) -> float:
    """Least-squares slope of -arg⟨ψ(t₀), ψ(t)⟩; equals ω for a single positive-frequency mode."""
    phase = np.unwrap(np.angle(overlaps))
    slope = np.polyfit(times - times[0], phase, 1)[0]
    return float(-slope)


def cmd_evolve(cfg: RunConfig, args: argparse.Namespace) -> int:
    s, source = _state_from_args(cfg, args)
    spec = s.spec
    times = spec.t0 + np.linspace(0.0, args.t_max / spec.mu, args.samples)
    out = _output_dir(cfg)
    norm0 = inner_physical(s, s).real
    overlaps, drift = [], 0.0
    axes = [f"i{a}" for a in range(spec.d)]
    with (out / "evolve.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *axes, "re_psi", "im_psi", "f_plus_sq", "f_minus_sq"])
        for t in times:
            psi = evaluate_at(s, t)
            f = to_foldy(_slice_state(s, t))
            fp, fm = np.abs(f.upper.values) ** 2, np.abs(f.lower.values) ** 2
            for idx in np.ndindex(*spec.shape):
                v = psi.values[idx]
                w.writerow([repr(float(t)), *idx, repr(float(v.real)), repr(float(v.imag)), repr(float(fp[idx])), repr(float(fm[idx]))])
            norm_t = spec.cell_volume * float(fp.sum() + fm.sum())
            drift = max(drift, abs(norm_t - norm0) / norm0)
            overlaps.append(inner_l2(s.phi, psi))
    summary = {
        "source": source,
        "grid": grid_summary(spec),
        "samples": int(args.samples),
        "t_start": float(times[0]),
        "t_end": float(times[-1]),
        "norm": float(norm0),
        "norm_drift": float(drift),
        "phase_frequency": _phase_frequency(times, np.asarray(overlaps)),
    }
    if source == "plane-wave":
        mode = _parse_ints(args.mode) if args.mode else (1,) * spec.d
        summary["omega_expected"] = mode_omega(spec, np.broadcast_to(mode, (spec.d,)))
    kio.write_json(out / "evolve_summary.json", summary)
    print(f"norm drift {drift:.3e} over {args.samples} samples; wrote {out / 'evolve.csv'}")
    return EXIT_OK


def _slice_state(s: KGState, t: float) -> KGState:
    """Cauchy data of the same solution taken at time t, re-expressed at the grid's t₀."""
    return KGState(evaluate_at(s, t), velocity_at(s, t))


def spectrum_table(spec: GridSpec, k_max: int) -> list[dict]:
    rows = []
    for m in range(0, min(k_max, spec.n // 2) + 1):
        mode = (m,) + (0,) * (spec.d - 1)
        energy = spec.hbar * mode_omega(spec, mode)
        rows.append({"mode": m, "k": float(spec.k1d[m]), "E_plus": energy, "E_minus": -energy})
    return rows


def dense_spectrum_residual(spec: GridSpec) -> float:
    """Max gap between sorted dense-oracle eigenvalues of H and ±ħω over all lattice modes."""
    from .oracle import build_all

    line = spec.with_(d=1)
    H = build_all(line).get("H").entries
    dense = np.sort(np.linalg.eigvals(H).real)
    formula = np.sort(np.concatenate([line.hbar * line.omega, -line.hbar * line.omega]))
    return float(np.abs(dense - formula).max() / np.abs(formula).max())


def cmd_spectrum(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = cfg.grid
    rows = spectrum_table(spec, args.k_max if args.k_max is not None else spec.n // 2)
    print(f"{'mode':>5s} {'k':>14s} {'E+':>20s} {'E-':>20s}")
    for r in rows:
        print(f"{r['mode']:5d} {r['k']:14.8f} {r['E_plus']:20.14f} {r['E_minus']:20.14f}")
    payload = {"grid": grid_summary(spec), "modes": rows}
    if spec.n <= 16:
        residual = dense_spectrum_residual(spec)
        payload["dense_oracle_residual"] = residual
        print(f"dense oracle eigenvalue residual (1-d line, n={spec.n}): {residual:.3e}")
    kio.write_json(_output_dir(cfg) / "spectrum.json", payload)
    return EXIT_OK


def cmd_localized(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = cfg.grid
    site = _parse_ints(args.site) if args.site else (spec.n // 2,) * spec.d
    s = localized_state(spec, args.eps, site)
    out = _output_dir(cfg)
    kio.write_foldy_csv(out / "localized_foldy.csv", to_foldy(s))
    kio.write_kgstate(out / "localized_state.csv", s)
    kio.write_json(
        out / "localized.json",
        {
            "grid": grid_summary(spec),
            "eps": args.eps,
            "site": list(site),
            "position": [float(v) for v in spec.coordinates(site)],
            "norm_squared": float(inner_physical(s, s).real),
            "expected_norm_squared": 1.0 / spec.cell_volume,
        },
    )
    print(f"localized state eps={args.eps:+d} at site {site}; wrote {out}")
    return EXIT_OK


def cmd_coherent(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = cfg.grid
    z = _parse_complex(args.z) if args.z else (0j,)
    z = tuple(np.broadcast_to(np.asarray(z), (spec.d,)))
    k_osc = args.k_osc if args.k_osc is not None else spec.hbar / (spec.box_len / 24) ** 2
    cs = CoherentSpec(z, args.eps, k_osc)
    s = coherent_state(spec, cs)
    out = _output_dir(cfg)
    kio.write_foldy_csv(out / "coherent_foldy.csv", to_foldy(s))
    kio.write_kgstate(out / "coherent_state.csv", s)
    residual = coherent_residual(s, cs)
    kio.write_json(
        out / "coherent.json",
        {
            "grid": grid_summary(spec),
            "eps": cs.eps,
            "z_re": [v.real for v in cs.z],
            "z_im": [v.imag for v in cs.z],
            "k_osc": k_osc,
            "width": cs.width(spec.hbar),
            "norm": norm_physical(s),
            "eigen_residual": residual,
            "charge_residual": relative_residual(apply_C_kg(s), cs.eps * s),
        },
    )
    print(f"coherent state eps={cs.eps:+d}, eigen-residual {residual:.3e}; wrote {out}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, help="output directory (default: current)")
    common.add_argument("--dim", type=int, help="spatial dimension d")
    common.add_argument("--n", type=int, help="points per axis (power of two)")
    common.add_argument("--mu", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--box-len", dest="box_len", type=float)
    common.add_argument(
        "--tolerance", action="append", metavar="NAME=VALUE", help="override an identity tolerance (repeatable)"
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="kgqm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("verify", parents=[common], help="run every registered identity and write a JSON report")
    p.add_argument("--only", action="append", metavar="NAME", help="restrict to these identities")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evolve", parents=[common], help="evolve a state and dump samples as CSV")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", type=Path, help="KGState file (CSV or binary)")
    src.add_argument("--generator", choices=GENERATORS, default="gaussian")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--t-max", dest="t_max", type=float, default=10.0, help="span in units of 1/mu")
    p.add_argument("--mode", help="plane-wave mode indices, comma-separated")
    p.add_argument("--eps", type=int, choices=(1, -1), default=1)
    p.add_argument("--z", help="coherent eigenvalue components, e.g. 1+0.5j")
    p.add_argument("--k-osc", dest="k_osc", type=float)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("spectrum", parents=[common], help="print E_{+-,k} for lattice modes")
    p.add_argument("--k-max", dest="k_max", type=int)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("localized", parents=[common], help="dump a localized state")
    p.add_argument("--eps", type=int, choices=(1, -1), default=1)
    p.add_argument("--site", help="lattice indices, comma-separated (default: centre)")
    p.set_defaults(func=cmd_localized)

    p = sub.add_parser("coherent", parents=[common], help="dump a charge-definite coherent state")
    p.add_argument("--eps", type=int, choices=(1, -1), default=1)
    p.add_argument("--z", help="eigenvalue components, e.g. 1+0.5j,0")
    p.add_argument("--k-osc", dest="k_osc", type=float)
    p.set_defaults(func=cmd_coherent)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_run_config(args)
        log.debug("grid %s", cfg.grid)
        return args.func(cfg, args)
    except KGError as exc:
        print(f"kgqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
