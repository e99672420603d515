"""Command line front end: figure sweeps, one-off estimates, certification.

Every subcommand resolves its parameters in a fixed order: built-in
defaults, then a flat ``key = value`` config file (``--config``), then
``--set key=value`` pairs, then explicit flags.  Unknown keys are
rejected.  Sweeps write ``<cmd>.csv`` (stable schema, byte-identical for
identical resolved parameters), ``<cmd>.svg`` (convenience chart) and
``<cmd>_meta.txt`` (the resolved parameters).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from . import __version__
from .bounds import (
    BoundCurvePoint,
    active_curve_points,
    active_lower_sum,
    active_upper_sum,
    eps_relaxed_lower_sum_mc,
    passive_lower_sum_mc,
    passive_upper_sum_mc,
    rho_limited_lower_sum_mc,
)
from .channel import SystemConfig
from .alignment import (
    achieved_dof,
    build_beamformers,
    certify,
    effective_slot_channels,
    example1_config,
    predicted_report,
)
from .errors import (
    ConfigError,
    IrsDofError,
)

CSV_HEADER = ["q", "value", "ci_low", "ci_high", "kind", "method_tag",
              "seed", "samples"]

_GEOMETRY_KEYS = {
    "wavelength_m": (float, 0.06),
    "dist_irs_m": (float, 35.35533905932738),
    "dist_direct_m": (float, 35.35533905932738),
    "snr_rho": (float, 1.0),
    "noise_n0": (float, 1.0),
}

_COMMON_MC_KEYS = {
    "samples": (int, 10000),
    "seed": (int, 1),
    "workers": (int, 1),
}

# key -> (type tag, default) per command; types: int, float, str, bool,
# int_list, float_list.
PARAM_TABLES: dict[str, dict[str, tuple]] = {
    "fig1": {
        "k": (int, 3),
        "q_grid": ("int_list", list(range(0, 9))),
    },
    "fig2": {
        "k": (int, 3),
        "q_grid": ("int_list", list(range(0, 201, 10))),
        "blockage": (float, 2.5e-7),
        **_COMMON_MC_KEYS,
        **_GEOMETRY_KEYS,
    },
    "fig3": {
        "k": (int, 3),
        "q_grid": ("int_list", [9, 18, 36, 72, 144, 288, 576, 900]),
        "eps_list": ("float_list", [0.9, 0.8, 0.7]),
        "blockage": (float, 5e-10),
        "strategy": (str, "disjoint_blocks"),
        **_COMMON_MC_KEYS,
        **_GEOMETRY_KEYS,
    },
    "fig4": {
        "k_grid": ("int_list", list(range(2, 9))),
        "q": (int, 100),
        "blockage_passive": (float, 5e-7),
        "blockage_eps": (float, 5e-10),
        "epsilon": (float, 0.9),
        "canonical_b": (bool, True),
        **_COMMON_MC_KEYS,
        **_GEOMETRY_KEYS,
    },
    "estimate": {
        "mode": (str, "passive"),
        "k": (int, 3),
        "q": (int, 30),
        "blockage": (float, 2.5e-7),
        "epsilon": (float, 0.9),
        "eps_exponent": (float, 0.3),
        "strategy": (str, "disjoint_blocks"),
        "canonical_b": (bool, False),
        **_COMMON_MC_KEYS,
        **_GEOMETRY_KEYS,
    },
    "ia-check": {
        "preset": (str, "example1"),
        "n": (int, 2),
        "seeds": (int, 1),
        "seed": (int, 1),
        "budget": (int, 4096),
        "predicted": (bool, False),
    },
}


def _coerce(key: str, kind, raw):
    """Coerce a raw string (or already-typed value) to the declared kind."""
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is str:
            return text
        if kind is bool:
            low = text.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind == "int_list":
            return [int(v) for v in text.split(",") if v.strip() != ""]
        if kind == "float_list":
            return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc
    raise ConfigError(f"unhandled type for {key}")


def load_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment, blanks ignored."""
    entries: dict[str, str] = {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = stripped.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def resolve_params(command: str, config_path: str | None,
                   set_pairs: list[str], flag_values: dict) -> dict:
    """Defaults < config file < --set < explicit flags, unknown keys fatal."""
    table = PARAM_TABLES[command]
    params = {k: default for k, (_, default) in table.items()}

    def apply(key: str, raw, source: str) -> None:
        if key not in table:
            raise ConfigError(f"unknown key {key!r} for {command} (from {source})")
        params[key] = _coerce(key, table[key][0], raw)

    if config_path:
        for key, raw in load_config_file(config_path).items():
            apply(key, raw, config_path)
    for pair in set_pairs:
        if "=" not in pair:
            raise ConfigError(f"--set needs key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        apply(key.strip(), raw, "--set")
    for key, value in flag_values.items():
        if value is not None:
            apply(key, value, "flag")
    return params


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_points_csv(path: Path, points: list[BoundCurvePoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for p in points:
            writer.writerow([
                p.q, _fmt(float(p.value)), _fmt(float(p.ci_low)),
                _fmt(float(p.ci_high)), p.kind, p.method_tag, p.seed,
                p.samples,
            ])


def write_meta(path: Path, command: str, params: dict) -> None:
    lines = [f"command = {command}", f"version = {__version__}"]
    for key in sorted(params):
        value = params[key]
        if isinstance(value, list):
            value = ",".join(_fmt(v) for v in value)
        else:
            value = _fmt(value)
        lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n")


def render_svg(path: Path, title: str, xlabel: str,
               series: list[tuple[str, list, list]]) -> None:
    """Convenience chart; numeric outputs live in the CSV next to it."""
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, xs, ys in series:
        ax.plot(xs, ys, marker="o", markersize=3, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("sum DoF")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _series_by_tag(points: list[BoundCurvePoint]) -> list[tuple[str, list, list]]:
    order: list[str] = []
    grouped: dict[str, tuple[list, list]] = {}
    for p in points:
        if p.method_tag not in grouped:
            grouped[p.method_tag] = ([], [])
            order.append(p.method_tag)
        grouped[p.method_tag][0].append(p.q)
        grouped[p.method_tag][1].append(p.value)
    return [(tag, grouped[tag][0], grouped[tag][1]) for tag in order]


def _scenario(params: dict, q: int, blockage_key: str = "blockage",
              k_key: str = "k") -> SystemConfig:
    try:
        return SystemConfig(
            K=params[k_key], Q=q,
            wavelength_m=params["wavelength_m"],
            dist_irs_m=params["dist_irs_m"],
            dist_direct_m=params["dist_direct_m"],
            blockage=params[blockage_key],
            snr_rho=params["snr_rho"],
            noise_n0=params["noise_n0"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def run_fig1(params: dict) -> list[BoundCurvePoint]:
    """Closed-form amplifying-surface bounds versus element count."""
    k = params["k"]
    if k < 2:
        raise ConfigError("fig1 needs k >= 2")
    grid = params["q_grid"]
    if any(q < 0 for q in grid):
        raise ConfigError("q_grid entries must be >= 0")
    return active_curve_points(k, grid)


def run_fig2(params: dict) -> list[BoundCurvePoint]:
    """Passive-surface Monte Carlo bounds versus element count."""
    if params["k"] < 2:
        raise ConfigError("fig2 needs k >= 2")
    points: list[BoundCurvePoint] = []
    for q in params["q_grid"]:
        if q < 0:
            raise ConfigError("q_grid entries must be >= 0")
        cfg = _scenario(params, q)
        points.append(passive_lower_sum_mc(
            cfg, params["samples"], params["seed"], workers=params["workers"]))
        points.append(passive_upper_sum_mc(
            cfg, params["samples"], params["seed"], workers=params["workers"]))
        points.append(BoundCurvePoint(
            q=q, value=params["k"] / 2.0, ci_low=params["k"] / 2.0,
            ci_high=params["k"] / 2.0, kind="ClosedForm",
            method_tag="no-surface/closed-form", seed=0, samples=0))
    return points


def run_fig3(params: dict) -> list[BoundCurvePoint]:
    """Near-unit-band Monte Carlo lower bounds versus element count."""
    k = params["k"]
    if k < 2:
        raise ConfigError("fig3 needs k >= 2")
    block = k * k
    for q in params["q_grid"]:
        if q < block or q % block != 0:
            raise ConfigError(
                f"fig3 q_grid entries must be positive multiples of {block}, got {q}"
            )
    for eps in params["eps_list"]:
        if not 0.0 < eps < 1.0:
            raise ConfigError(f"eps_list entries must be in (0, 1), got {eps}")
    points: list[BoundCurvePoint] = []
    for eps in params["eps_list"]:
        for q in params["q_grid"]:
            cfg = _scenario(params, q)
            points.append(eps_relaxed_lower_sum_mc(
                cfg, eps, params["samples"], params["seed"],
                workers=params["workers"], strategy=params["strategy"]))
    return points


def run_fig4(params: dict) -> list[BoundCurvePoint]:
    """Bounds versus user count at a fixed element budget.

    The q column of the output rows carries the user count (the sweep
    variable); the fixed element count is recorded in the meta file.
    """
    q = params["q"]
    if q < 0:
        raise ConfigError("q must be >= 0")
    if any(k < 2 for k in params["k_grid"]):
        raise ConfigError("k_grid entries must be >= 2")
    points: list[BoundCurvePoint] = []
    for k in params["k_grid"]:
        cfg = _scenario({**params, "k": k}, q, blockage_key="blockage_passive")
        lower = passive_lower_sum_mc(
            cfg, params["samples"], params["seed"],
            workers=params["workers"], canonical_b=params["canonical_b"])
        points.append(dataclasses.replace(lower, q=k))
        if k * k <= q:
            cfg_eps = _scenario({**params, "k": k}, q,
                                blockage_key="blockage_eps")
            eps_pt = eps_relaxed_lower_sum_mc(
                cfg_eps, params["epsilon"], params["samples"],
                params["seed"], workers=params["workers"])
            points.append(dataclasses.replace(eps_pt, q=k))
        points.append(BoundCurvePoint(
            q=k, value=active_lower_sum(k, q), ci_low=active_lower_sum(k, q),
            ci_high=active_lower_sum(k, q), kind="ClosedForm",
            method_tag="active-lower/closed-form", seed=0, samples=0))
        points.append(BoundCurvePoint(
            q=k, value=active_upper_sum(k, q), ci_low=active_upper_sum(k, q),
            ci_high=active_upper_sum(k, q), kind="ClosedForm",
            method_tag="active-upper/closed-form", seed=0, samples=0))
    return points


def run_estimate(params: dict) -> list[BoundCurvePoint]:
    mode = params["mode"]
    if mode == "active":
        k, q = params["k"], params["q"]
        if k < 2 or q < 0:
            raise ConfigError("active mode needs k >= 2 and q >= 0")
        return [
            BoundCurvePoint(q=q, value=active_lower_sum(k, q),
                            ci_low=active_lower_sum(k, q),
                            ci_high=active_lower_sum(k, q), kind="ClosedForm",
                            method_tag="active-lower/closed-form",
                            seed=0, samples=0),
            BoundCurvePoint(q=q, value=active_upper_sum(k, q),
                            ci_low=active_upper_sum(k, q),
                            ci_high=active_upper_sum(k, q), kind="ClosedForm",
                            method_tag="active-upper/closed-form",
                            seed=0, samples=0),
        ]
    if params["k"] < 2:
        raise ConfigError("estimate needs k >= 2")
    cfg = _scenario(params, params["q"])
    if mode == "passive":
        return [
            passive_lower_sum_mc(cfg, params["samples"], params["seed"],
                                 workers=params["workers"],
                                 canonical_b=params["canonical_b"]),
            passive_upper_sum_mc(cfg, params["samples"], params["seed"],
                                 workers=params["workers"]),
        ]
    if mode == "eps":
        if not 0.0 < params["epsilon"] < 1.0:
            raise ConfigError("epsilon must be in (0, 1)")
        return [eps_relaxed_lower_sum_mc(
            cfg, params["epsilon"], params["samples"], params["seed"],
            workers=params["workers"], strategy=params["strategy"])]
    if mode == "rho":
        if not 0.0 < params["eps_exponent"] < 1.0:
            raise ConfigError("eps_exponent must be in (0, 1)")
        return [rho_limited_lower_sum_mc(
            cfg, params["eps_exponent"], params["samples"], params["seed"],
            workers=params["workers"])]
    raise ConfigError(f"unknown mode {mode!r} (active, passive, eps, rho)")


def run_ia_check(params: dict, out) -> int:
    if params["preset"] != "example1":
        raise ConfigError(f"unknown preset {params['preset']!r}")
    cfg = example1_config(params["n"])
    budget = params["budget"]
    print(f"preset example1, n={params['n']}, slots={cfg.slots}", file=out)
    if params["predicted"]:
        report = predicted_report(cfg)
        _print_report(report, "counted", out)
        dof = achieved_dof(cfg, report)
        _print_dof(dof, out)
        return 0
    if cfg.slots > budget:
        raise ConfigError(
            f"{cfg.slots} slots exceed budget {budget}; rerun with "
            f"predicted = true for the counting-only report"
        )
    all_ok = True
    for s in range(params["seed"], params["seed"] + params["seeds"]):
        slot_channels = effective_slot_channels(cfg, s, budget=budget)
        beams = build_beamformers(cfg, slot_channels, budget=budget)
        report = certify(cfg, slot_channels, beams, budget=budget)
        _print_report(report, f"seed {s}", out)
        all_ok = all_ok and report.all_decodable
    if not all_ok:
        return 3
    dof = achieved_dof(cfg, report)
    _print_dof(dof, out)
    return 0


def _print_report(report, label: str, out) -> None:
    for j, r in enumerate(report.receivers):
        status = "ok" if r.decodable else "OVERLAP"
        print(
            f"  [{label}] receiver {j}: message {r.dim_message}, "
            f"interference {r.dim_interference}, joint {r.joint_rank} "
            f"/ {report.slots} slots ({status})",
            file=out,
        )


def _print_dof(dof, out) -> None:
    per_user = ", ".join(str(f) for f in dof.per_user)
    print(f"  achieved DoF per user: {per_user}", file=out)
    print(f"  achieved sum DoF: {dof.total} = {float(dof.total):.4f}", file=out)


_FIG_RUNNERS = {
    "fig1": (run_fig1, "surface elements Q"),
    "fig2": (run_fig2, "surface elements Q"),
    "fig3": (run_fig3, "surface elements Q"),
    "fig4": (run_fig4, "users K"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsdof",
        description="Sum-DoF bounds for surface-assisted interference networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_mc: bool = True) -> None:
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--config", default=None, help="flat key = value file")
        p.add_argument("--set", dest="set_pairs", action="append", default=[],
                       metavar="KEY=VALUE", help="override one parameter")
        if with_mc:
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--workers", type=int, default=None)

    for name in ("fig1", "fig2", "fig3", "fig4"):
        p = sub.add_parser(name, help=f"write {name} curves (CSV + SVG)")
        add_common(p, with_mc=(name != "fig1"))

    p = sub.add_parser("estimate", help="one bound at one operating point")
    add_common(p)
    p.add_argument("--mode", choices=["active", "passive", "eps", "rho"],
                   default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("ia-check", help="certify the alignment preset")
    add_common(p, with_mc=False)
    p.add_argument("--preset", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--predicted", action="store_true", default=None)
    return parser


def _flag_values(args, command: str) -> dict:
    keys = {
        "estimate": ("samples", "seed", "workers", "mode", "q", "k", "epsilon"),
        "ia-check": ("preset", "n", "seeds", "seed", "predicted"),
        "fig1": (),
        "fig2": ("samples", "seed", "workers"),
        "fig3": ("samples", "seed", "workers"),
        "fig4": ("samples", "seed", "workers"),
    }[command]
    return {k: getattr(args, k.replace("-", "_")) for k in keys}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        params = resolve_params(command, args.config, args.set_pairs,
                                _flag_values(args, command))
        if command == "ia-check":
            return run_ia_check(params, sys.stdout)
        if command == "estimate":
            points = run_estimate(params)
            for p in points:
                print(
                    f"{p.method_tag}: q={p.q} value={p.value:.4f} "
                    f"ci=[{p.ci_low:.4f}, {p.ci_high:.4f}] "
                    f"(kind={p.kind}, samples={p.samples}, seed={p.seed})"
                )
            if args.out is not None:
                out_dir = Path(args.out)
                out_dir.mkdir(parents=True, exist_ok=True)
                write_points_csv(out_dir / "estimate.csv", points)
                write_meta(out_dir / "estimate_meta.txt", command, params)
            return 0
        runner, xlabel = _FIG_RUNNERS[command]
        points = runner(params)
        out_dir = Path(args.out) if args.out is not None else Path(".")
        out_dir.mkdir(parents=True, exist_ok=True)
        write_points_csv(out_dir / f"{command}.csv", points)
        write_meta(out_dir / f"{command}_meta.txt", command, params)
        render_svg(out_dir / f"{command}.svg", command, xlabel,
                   _series_by_tag(points))
        print(f"wrote {out_dir / (command + '.csv')}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IrsDofError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
