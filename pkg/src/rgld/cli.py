"""Command-line entry point.

Subcommands
-----------
run <preset|config.json>
    Execute a benchmark preset or a custom JSON experiment spec and
    write chain/aggregate CSVs. Flags override preset and file values.
oracle <preset>
    Build the quadrature oracle paired with a preset (dimension <= 2)
    and export its cells as CSV.
check
    Run a compact invariant battery (geometry, gradients, determinism,
    oracle normalization) and exit non-zero on any failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from rgld import harness
from rgld.dynamics import ChainConfig, ChainConfigError, run_chain
from rgld.geometry import Ball, SphericalShell
from rgld.measure import GibbsOracle, export_cells_csv
from rgld.objectives import Quadratic, Rastrigin, Rosenbrock, make_grid_gaussian_mixture

PRESET_DIM_DEFAULTS = {"rosenbrock": 4, "rastrigin": 2}


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Accept ``a..b`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(tok) for tok in text.split(",") if tok)


def _resolve_spec(args) -> harness.ExperimentSpec:
    target = args.target
    if target in harness.PRESETS:
        factory = harness.PRESETS[target]
        kwargs = {}
        if target in PRESET_DIM_DEFAULTS:
            kwargs["dim"] = args.dim if args.dim else PRESET_DIM_DEFAULTS[target]
        elif args.dim:
            raise SystemExit(f"--dim is not applicable to preset {target!r}")
        spec = factory(**kwargs)
    elif Path(target).exists():
        spec = harness.spec_from_file(target)
    else:
        known = ", ".join(sorted(harness.PRESETS))
        raise SystemExit(f"unknown preset or missing file {target!r} (presets: {known})")

    overrides = {}
    if args.eta is not None:
        overrides["eta"] = args.eta
    if args.beta is not None:
        overrides["beta"] = args.beta
    if args.steps is not None:
        overrides["steps"] = args.steps
        if spec.tv_prefixes:
            prefixes = tuple(p for p in spec.tv_prefixes if p < args.steps)
            overrides["tv_prefixes"] = prefixes + (args.steps,)
    if args.seeds is not None:
        overrides["seeds"] = args.seeds
    if overrides:
        from dataclasses import replace

        spec = replace(spec, **overrides)
    return spec


def _cmd_run(args) -> int:
    spec = _resolve_spec(args)
    try:
        paths = harness.run_experiment(spec, args.out, workers=args.workers)
    except ChainConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(f"{spec.name}: wrote {len(paths)} files to {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    spec = _resolve_spec(args)
    if spec.domain.dim > 2:
        print("oracle requires a preset of dimension <= 2", file=sys.stderr)
        return 2
    bins = args.bins or spec.oracle_bins or 256
    oracle = GibbsOracle(spec.objective, spec.domain, spec.beta, bins)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{spec.name}_oracle_{bins}.csv"
    export_cells_csv(path, oracle)
    print(f"{spec.name}: oracle with {oracle.n_cells} cells, "
          f"Z={oracle.normalizing_constant:.12g}, wrote {path}")
    return 0


def _cmd_check(_args) -> int:
    failures = 0

    def report(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"{status} {name}{suffix}")
        if not ok:
            failures += 1

    rng = np.random.default_rng(7)
    domains = [Ball(np.zeros(2), 2.0), SphericalShell(np.zeros(2), 0.9, 4.0)]
    ok = True
    for dom in domains:
        for _ in range(2000):
            x = dom.center + rng.uniform(-1.2, 1.2, size=dom.dim) * dom.bounding_radius
            if dom.distance_to_set(x) > dom.reflection_margin:
                continue
            p = dom.project(x)
            ok &= bool(dom.contains(p))
            ok &= float(np.linalg.norm(dom.project(p) - p)) <= 1e-12
            r, moved = dom.reflect(x)
            ok &= bool(dom.contains(r))
            ok &= abs(
                np.linalg.norm(r - p) - np.linalg.norm(np.asarray(x) - p)
            ) <= 1e-12
    report("geometry projection/reflection invariants", ok)

    objs = [
        Quadratic(1.0, 2),
        make_grid_gaussian_mixture(harness.GM_OBJECTIVE_SEED),
        Rosenbrock(4),
        Rastrigin(2),
    ]
    ok = True
    h = 1e-5
    for obj in objs:
        for _ in range(20):
            x = rng.uniform(-1.5, 1.5, size=obj.dim)
            g = obj.gradient(x)
            for i in range(obj.dim):
                e = np.zeros(obj.dim)
                e[i] = h
                fd = (obj.value(x + e) - obj.value(x - e)) / (2 * h)
                tol = max(1e-5 * abs(fd), 1e-7)
                ok &= abs(fd - g[i]) <= max(tol, 1e-5 * np.linalg.norm(g))
    report("analytic gradients vs finite differences", ok)

    cfg = ChainConfig(method="rgld", eta=0.05, beta=1.0, steps=500, seed=3,
                      enforce_step_bound=False)
    gm = objs[1]
    dom = SphericalShell(np.zeros(2), 0.9, 4.0)
    rec1 = run_chain(cfg, gm, dom)
    rec2 = run_chain(cfg, gm, dom)
    report(
        "chain determinism",
        bool(np.array_equal(rec1.f_value, rec2.f_value))
        and np.array_equal(rec1.final_point, rec2.final_point),
    )

    oracle = GibbsOracle(Quadratic(1.0, 1), Ball(np.zeros(1), 1.0), 2.0, 256)
    report(
        "oracle probabilities normalized",
        abs(float(np.sum(oracle.probabilities)) - 1.0) <= 1e-10,
        f"sum={float(np.sum(oracle.probabilities)):.3e}",
    )

    print("all checks passed" if failures == 0 else f"{failures} check(s) failed")
    return 0 if failures == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rgld",
        description="Constrained Langevin optimization benchmarks "
                    "(reflected and projected chains).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a preset or a JSON experiment spec")
    p_run.add_argument("target", help="preset name or path to a JSON spec")
    p_run.add_argument("--seeds", type=_parse_seeds, default=None,
                       help="seed range a..b (inclusive) or comma list")
    p_run.add_argument("--eta", type=float, default=None)
    p_run.add_argument("--beta", type=float, default=None)
    p_run.add_argument("--steps", type=int, default=None)
    p_run.add_argument("--dim", type=int, default=None,
                       help="dimension for rosenbrock/rastrigin presets")
    p_run.add_argument("--out", default="results")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_or = sub.add_parser("oracle", help="export the Gibbs quadrature oracle")
    p_or.add_argument("target", help="preset name or path to a JSON spec")
    p_or.add_argument("--bins", type=int, default=None)
    p_or.add_argument("--dim", type=int, default=None)
    p_or.add_argument("--eta", type=float, default=None)
    p_or.add_argument("--beta", type=float, default=None)
    p_or.add_argument("--steps", type=int, default=None)
    p_or.add_argument("--seeds", type=_parse_seeds, default=None)
    p_or.add_argument("--out", default="results")
    p_or.set_defaults(func=_cmd_oracle)

    p_chk = sub.add_parser("check", help="run the invariant battery")
    p_chk.set_defaults(func=_cmd_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
