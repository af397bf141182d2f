"""Scenario runner: parse a TOML scenario, evaluate analytic and/or simulated
coverage over a sweep, and write a CSV plus a JSON run manifest.

The CSV is byte-reproducible for a fixed scenario and seed (modulo the
runtime_ms column): every sweep point draws its Monte Carlo randomness from a
substream keyed by (seed, point index, association, path loss), independent
of evaluation order or worker count.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .coverage import (
    CoverageResult,
    InvalidConfig,
    NetworkConfig,
    PathLossModel,
    Tier,
    coverage_maxsinr_bounded,
    coverage_maxsinr_unbounded,
    coverage_rss_bounded,
    coverage_rss_unbounded,
)
from .fading import (
    EGK,
    AlphaMu,
    FisherF,
    Nakagami,
    RawH,
    Rayleigh,
    make_distribution,
)
from .foxh import FoxHError, HOrder
from .sim import Association, SimConfig, estimate_coverage

__all__ = ["ParseError", "ValidationError", "Scenario", "load_scenario",
           "run", "main"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4


class ParseError(Exception):
    pass


class ValidationError(Exception):
    pass


@dataclasses.dataclass
class Scenario:
    network: NetworkConfig
    sweep_variable: str  # "density" | "beta" | "alpha"
    sweep_tier: int
    sweep_grid: list[float]
    methods: list[str]
    associations: list[str]
    pathloss_models: list[PathLossModel]
    seed: int
    trials: int
    tol: float
    output: str
    window_radius: Optional[float] = None
    raw: dict = dataclasses.field(default_factory=dict)


_FADING_KINDS = {
    "rayleigh": lambda d: Rayleigh(),
    "nakagami": lambda d: Nakagami(m=float(d["m"])),
    "alphamu": lambda d: AlphaMu(alpha=float(d["alpha"]), mu=float(d["mu"])),
    "fisherf": lambda d: FisherF(m=float(d["m"]), ms=float(d["ms"])),
    "egk": lambda d: EGK(m=float(d["m"]), zeta=float(d["zeta"]),
                         ks=float(d["ks"])),
    "rawh": lambda d: RawH(
        order=HOrder(*[int(v) for v in d["order"]]),
        kappa=float(d["kappa"]),
        c=float(d["c"]),
        a=tuple(float(v) for v in d.get("a", ())),
        A=tuple(float(v) for v in d.get("A", ())),
        b=tuple(float(v) for v in d.get("b", ())),
        B=tuple(float(v) for v in d.get("B", ())),
    ),
}


def _parse_fading(d: dict):
    kind = d.get("kind")
    if kind not in _FADING_KINDS:
        raise ValidationError(
            f"unknown fading kind {kind!r}; expected one of {sorted(_FADING_KINDS)}")
    try:
        spec = _FADING_KINDS[kind](d)
    except KeyError as e:
        raise ValidationError(f"fading kind {kind!r} is missing field {e}") from e
    allow = kind == "rawh"
    return make_distribution(spec, allow_unnormalized=allow)


def _parse_tier(d: dict, thresholds_db: bool) -> Tier:
    for key in ("density", "power", "beta"):
        if key not in d:
            raise ValidationError(f"tier is missing required field {key!r}")
    if "fading" not in d:
        raise ValidationError("tier is missing its fading table")
    beta = float(d["beta"])
    if thresholds_db:
        beta = 10.0 ** (beta / 10.0)
    return Tier(
        density=float(d["density"]),
        power=float(d["power"]),
        beta=beta,
        fading=_parse_fading(d["fading"]),
        noise=float(d.get("noise", 0.0)),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as e:
        raise ParseError(f"cannot read scenario file {path}: {e}") from e
    try:
        doc = tomllib.loads(text.decode("utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ParseError(f"{path}: {e}") from e

    try:
        net = doc["network"]
        tiers_doc = net["tiers"]
    except KeyError as e:
        raise ValidationError(f"scenario is missing section {e}") from e
    if not tiers_doc:
        raise ValidationError("network.tiers must be nonempty")
    thresholds_db = bool(doc.get("thresholds_db", False))
    try:
        tiers = tuple(_parse_tier(t, thresholds_db) for t in tiers_doc)
        network = NetworkConfig(tiers, float(net["alpha"]))
    except (InvalidConfig, ValueError) as e:
        raise ValidationError(str(e)) from e

    sweep = doc.get("sweep", {})
    grid = [float(v) for v in sweep.get("grid", [])]
    if not grid:
        raise ValidationError("sweep.grid must be a nonempty list")
    if grid != sorted(grid):
        raise ValidationError("sweep.grid must be sorted ascending")
    variable = sweep.get("variable", "tier-density")
    if variable == "tier-density":
        variable = "density"
    if variable not in ("density", "beta", "alpha"):
        raise ValidationError(f"unknown sweep variable {variable!r}")
    tier_idx = int(sweep.get("tier", 0))
    if variable != "alpha" and not 0 <= tier_idx < len(tiers):
        raise ValidationError(f"sweep.tier {tier_idx} out of range")

    methods = list(doc.get("methods", ["analytic"]))
    for m in methods:
        if m not in ("analytic", "simulate"):
            raise ValidationError(f"unknown method {m!r}")
    assoc = doc.get("association", "both")
    if assoc == "both":
        associations = [Association.MAX_SINR, Association.RSS]
    elif assoc in (Association.RSS, Association.MAX_SINR):
        associations = [assoc]
    else:
        raise ValidationError(f"unknown association {assoc!r}")
    pl = doc.get("pathloss", "unbounded")
    if pl == "both":
        pls = [PathLossModel.UNBOUNDED, PathLossModel.BOUNDED]
    elif pl in ("unbounded", "bounded"):
        pls = [PathLossModel(pl)]
    else:
        raise ValidationError(f"unknown pathloss {pl!r}")

    return Scenario(
        network=network,
        sweep_variable=variable,
        sweep_tier=tier_idx,
        sweep_grid=grid,
        methods=methods,
        associations=associations,
        pathloss_models=pls,
        seed=int(doc.get("seed", 0)),
        trials=int(doc.get("trials", 100_000)),
        tol=float(doc.get("tol", 1e-5)),
        output=str(doc.get("output", "coverage.csv")),
        window_radius=(float(doc["window_radius"])
                       if "window_radius" in doc else None),
        raw=doc,
    )


def _apply_sweep(sc: Scenario, value: float,
                 pathloss: PathLossModel) -> NetworkConfig:
    net = sc.network
    tiers = list(net.tiers)
    alpha = net.alpha
    if sc.sweep_variable == "alpha":
        alpha = value
    else:
        t = tiers[sc.sweep_tier]
        if sc.sweep_variable == "density":
            t = dataclasses.replace(t, density=value)
        else:
            t = dataclasses.replace(t, beta=value)
        tiers[sc.sweep_tier] = t
    return NetworkConfig(tuple(tiers), alpha, pathloss)


def _analytic(cfg: NetworkConfig, assoc: str, tol: float) -> CoverageResult:
    if assoc == Association.MAX_SINR:
        if cfg.pathloss is PathLossModel.BOUNDED:
            return coverage_maxsinr_bounded(cfg, tol)
        return coverage_maxsinr_unbounded(cfg)
    if cfg.pathloss is PathLossModel.BOUNDED:
        return coverage_rss_bounded(cfg, tol)
    return coverage_rss_unbounded(cfg, tol)


def run(sc: Scenario) -> Path:
    rows = []
    for pi, value in enumerate(sc.sweep_grid):
        for ai, assoc in enumerate(sc.associations):
            for li, pl in enumerate(sc.pathloss_models):
                cfg = _apply_sweep(sc, value, pl)
                for method in sc.methods:
                    t0 = time.perf_counter()
                    if method == "analytic":
                        res = _analytic(cfg, assoc, sc.tol)
                        cov, err = res.value, res.abs_error_estimate
                    else:
                        point_seed = int(
                            (sc.seed * 1_000_003 + pi * 101 + ai * 11 + li)
                            % (1 << 62))
                        est = estimate_coverage(SimConfig(
                            cfg, trials=sc.trials, seed=point_seed,
                            association=assoc,
                            window_radius=sc.window_radius))
                        cov, err = est.coverage, est.ci99_halfwidth
                    ms = (time.perf_counter() - t0) * 1e3
                    rows.append((value, assoc, pl.value, method,
                                 float(cov), float(err), ms))

    out = Path(sc.output)
    with out.open("w", encoding="utf-8", newline="\n") as f:
        f.write("sweep_value,association,pathloss,method,coverage,error,"
                "runtime_ms\n")
        for value, assoc, pl, method, cov, err, ms in rows:
            f.write(f"{value!r},{assoc},{pl},{method},{cov!r},{err!r},"
                    f"{ms:.1f}\n")

    manifest = {
        "scenario": sc.raw,
        "resolved": {
            "seed": sc.seed,
            "trials": sc.trials,
            "tol": sc.tol,
            "methods": sc.methods,
            "associations": sc.associations,
            "pathloss_models": [p.value for p in sc.pathloss_models],
            "sweep": {
                "variable": sc.sweep_variable,
                "tier": sc.sweep_tier,
                "grid": sc.sweep_grid,
            },
            "alpha": sc.network.alpha,
            "tiers": [
                {
                    "density": t.density,
                    "power": t.power,
                    "beta": t.beta,
                    "noise": t.noise,
                    "fading": repr(t.fading.spec),
                }
                for t in sc.network.tiers
            ],
        },
    }
    out.with_suffix(out.suffix + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="hetcov",
        description="Multi-tier network coverage: analytic vs Monte Carlo.")
    ap.add_argument("scenario", help="TOML scenario file")
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--window-radius", type=float, default=None)
    ap.add_argument("--only", choices=["analytic", "simulate"], default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    try:
        sc = load_scenario(args.scenario)
        if args.tol is not None:
            sc.tol = args.tol
        if args.trials is not None:
            sc.trials = args.trials
        if args.seed is not None:
            sc.seed = args.seed
        if args.window_radius is not None:
            sc.window_radius = args.window_radius
        if args.only is not None:
            if args.only not in sc.methods:
                sc.methods = [args.only]
            else:
                sc.methods = [m for m in sc.methods if m == args.only]
        if args.out is not None:
            sc.output = args.out
        out = run(sc)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, InvalidConfig) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except FoxHError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
