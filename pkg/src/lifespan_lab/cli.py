"""Command-line entry points for simulations, sweeps and property suites."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bounds import lifespan_bound
from .config import RunConfig, load_config, parse_config
from .grids import Grid1D
from .matching import residual_budget
from .profile import (
    AnalyticProfile,
    matching_horizon,
    prepare_profile,
    profile_residual,
    eval_profile,
    resolve_profile,
    rk4_profile_oracle,
)
from .solver import SolverConfig, evolve
from .suites import run_property_suites
from .sweep import CSV_COLUMNS, measure_lifespan, sweep_lifespan


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config({})
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "eps", None):
        ladder = tuple(float(e) for e in args.eps.split(","))
        cfg = replace(cfg, sweep_ladder=ladder, residual_ladder=ladder)
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _grid_or_default(cfg: RunConfig) -> Grid1D:
    return cfg.grid if cfg.grid is not None else Grid1D(32.0, 2048)


def cmd_bound(args) -> int:
    # p = 3 routes to the logarithmic bound, which ModelParams cannot carry;
    # read the critical exponent straight from the document in that case
    raw = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text()).get("model", {})
    if float(raw.get("p", 2.0)) == 3.0:
        prof = resolve_profile(raw.get("profile", "gaussian"))
        if not isinstance(prof, AnalyticProfile):
            raise ValueError("p = 3 bound needs a named analytic profile")
        lam = raw.get("lam", [0.0, 1.0])
        lam = complex(lam[0], lam[1]) if isinstance(lam, list) else complex(lam)
        report = lifespan_bound(3.0, lam, prof.sup_transform)
        p_val, eps_val = 3.0, raw.get("epsilon")
    else:
        cfg = _load(args)
        params = cfg.model
        prof = resolve_profile(params.profile)
        if isinstance(prof, AnalyticProfile):
            sup = prof.sup_transform
        else:
            data = prepare_profile(params, _grid_or_default(cfg))
            sup = data.sup_amp ** (1.0 / (params.p - 1.0))
        horizon = params.horizon
        if horizon is None:
            base = lifespan_bound(params.p, params.lam, sup)
            horizon = (
                params.horizon_fraction * base.s_blowup
                if np.isfinite(base.s_blowup)
                else None
            )
        report = lifespan_bound(
            params.p, params.lam, sup, epsilon=params.epsilon, horizon=horizon
        )
    doc = {
        "p": report.p,
        "im_lambda": report.im_lambda,
        "sup_transform": report.sup_transform,
        "A": report.s_blowup,
        "liminf_const": report.liminf_const,
        "scaling_exponent": report.scaling_exponent,
        "p3_log_bound": report.log_bound,
        "T_B": report.t_matching,
    }
    print(json.dumps(doc, default=lambda x: repr(x)))
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    grid = _grid_or_default(cfg)
    solver_kwargs = dict(cfg.solver)
    solver_kwargs.setdefault("t_end", 5.0)
    if "record_times" not in solver_kwargs:
        solver_kwargs["record_times"] = tuple(
            np.linspace(0.0, solver_kwargs["t_end"], 11)[1:]
        )
    run = SolverConfig(params=cfg.model, grid=grid, **solver_kwargs)
    traj = evolve(run)
    out = _out_dir(args)
    rows = ["t,l2,l_inf,h1,x_norm"]
    for t, rep in zip(traj.times, traj.reports):
        rows.append(f"{t!r},{rep.l2!r},{rep.l_inf!r},{rep.h1!r},{rep.x_norm!r}")
    (out / "simulate_norms.csv").write_text("\n".join(rows) + "\n")
    _say(args, f"terminated: {traj.termination.kind} at t={traj.termination.t:.6g}")
    _say(args, f"wrote {out / 'simulate_norms.csv'}")
    return 0


def cmd_lifespan(args) -> int:
    cfg = _load(args)
    model = cfg.model
    if args.eps:
        model = replace(model, epsilon=float(args.eps.split(",")[0]))
    record, est = measure_lifespan(model, cfg.solver or None)
    doc = {
        "eps": record.eps,
        "T_num": record.t_num,
        "scaled": record.scaled,
        "bound_const": record.bound_const,
        "ratio": record.ratio,
        "termination": record.termination,
        "bracket": [est.t_low, est.t_high],
    }
    print(json.dumps(doc, default=lambda x: repr(x)))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    result = sweep_lifespan(cfg.model, cfg.sweep_ladder, cfg.solver or None)
    csv_path = out / "lifespan_sweep.csv"
    csv_path.write_text(result.to_csv())
    summary = {
        "slope": result.slope,
        "intercept": result.intercept,
        "expected_slope": result.expected_slope,
        "rows": len(result.records),
        "partial": result.partial_reason,
    }
    (out / "sweep_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    _say(args, f"wrote {csv_path}")
    _say(args, json.dumps(summary))
    return 1 if result.partial else 0


def cmd_residual(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    from .grids import fourier_transform, scaled_grid, spectral_radius
    from .solver import initial_field

    rows = ["eps,I_free,I_blend,I_profile,I_total,T_B"]
    for eps in cfg.residual_ladder:
        params = replace(cfg.model, epsilon=eps)
        desk = Grid1D(32.0, 2048)
        xi_eff = spectral_radius(
            fourier_transform(initial_field(replace(params, epsilon=1.0), desk)), 0.999
        )
        probe = prepare_profile(params, desk)
        grid = scaled_grid(xi_eff, matching_horizon(probe), dx=0.0625)
        data = prepare_profile(params, grid)
        budget = residual_budget(data, nodes_per_region=cfg.residual_nodes)
        rows.append(
            f"{eps!r},{budget.i_free!r},{budget.i_blend!r},"
            f"{budget.i_profile!r},{budget.i_total!r},{matching_horizon(data)!r}"
        )
        _say(args, rows[-1])
    (out / "residual_budget.csv").write_text("\n".join(rows) + "\n")
    _say(args, f"wrote {out / 'residual_budget.csv'}")
    return 0


def cmd_profile_check(args) -> int:
    cfg = _load(args)
    rng = np.random.default_rng(cfg.seed)
    grid = Grid1D(16.0, 256)
    worst_gap = 0.0
    n_trials = 40
    for _ in range(n_trials):
        p = rng.uniform(2.0, 2.9)
        lam = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2.0))
        amp = rng.uniform(0.5, 1.5)
        params = replace(
            cfg.model, p=p, lam=lam, delta=0.7,
            profile={"name": "gaussian", "amplitude": amp},
        )
        data = prepare_profile(params, grid)
        s = 0.9 * data.s_blowup
        closed = eval_profile(s, data, mollified=False).values
        oracle = rk4_profile_oracle(s, data)
        worst_gap = max(worst_gap, float(np.max(np.abs(closed - oracle))))
    base = prepare_profile(replace(cfg.model, delta=0.7), grid)
    ident = profile_residual(0.5 * base.horizon, base)
    ident_gap = float(np.max(np.abs(ident.lhs - ident.rhs)))
    doc = {"oracle_gap": worst_gap, "trials": n_trials, "identity_gap": ident_gap,
           "passed": bool(worst_gap <= 1e-8)}
    print(json.dumps(doc))
    return 0 if doc["passed"] else 1


def cmd_props(args) -> int:
    cfg = _load(args)
    results = run_property_suites(seed=cfg.seed)
    doc = {"passed": all(r.passed for r in results),
           "suites": [r.to_dict() for r in results]}
    out = _out_dir(args)
    (out / "property_suites.json").write_text(json.dumps(doc, indent=2) + "\n")
    _say(args, json.dumps({"passed": doc["passed"],
                           "suites": [(r.name, r.passed) for r in results]}))
    return 0 if doc["passed"] else 1


def cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = _out_dir(args)
    src = Path(args.csv)
    rows = [ln for ln in src.read_text().strip().splitlines() if not ln.startswith("#")]
    header = rows[0].split(",")
    cols = {name: [] for name in header}
    for line in rows[1:]:
        for name, val in zip(header, line.split(",")):
            try:
                cols[name].append(float(val))
            except ValueError:
                cols[name].append(np.nan)

    fig, ax = plt.subplots(figsize=(5, 4))
    if set(CSV_COLUMNS).issubset(header):
        ax.loglog(cols["eps"], cols["T_num"], "o-", label="measured")
        ax.set_xlabel("eps")
        ax.set_ylabel("T_num")
        ax.legend()
    else:
        xname, ynames = header[0], header[1:]
        for name in ynames:
            ax.loglog(cols[xname], cols[name], "o-", label=name)
        ax.set_xlabel(xname)
        ax.legend()
    fig.tight_layout()
    target = out / (src.stem + ".png")
    fig.savefig(target, dpi=150)
    _say(args, f"wrote {target}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lifespan-lab",
        description="Blow-up life-span experiments for the 1-D focusing Schrodinger model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, eps=False):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--quiet", action="store_true")
        if eps:
            p.add_argument("--eps", help="comma-separated ladder override")

    common(sub.add_parser("bound", help="closed-form life-span constants"))
    common(sub.add_parser("simulate", help="one time integration with norm records"))
    common(sub.add_parser("lifespan", help="life span for one data size"), eps=True)
    common(sub.add_parser("sweep", help="life-span sweep over the ladder"), eps=True)
    common(sub.add_parser("residual", help="residual budget scan"), eps=True)
    common(sub.add_parser("profile-check", help="profile ODE oracle checks"))
    common(sub.add_parser("props", help="run the property suites"))
    plot = sub.add_parser("plot", help="render static figures from a CSV")
    common(plot)
    plot.add_argument("csv", help="CSV produced by sweep or residual")

    return parser


_COMMANDS = {
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "lifespan": cmd_lifespan,
    "sweep": cmd_sweep,
    "residual": cmd_residual,
    "profile-check": cmd_profile_check,
    "props": cmd_props,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
