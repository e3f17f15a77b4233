"""Command-line entry point: ``outflowlab <command> --config run.yaml``.

Commands write CSV/JSON artifacts, a ``resolved_config.yaml`` and a
``summary.json`` with one entry per check; the exit status is 0 only when
every check passes (1 config error, 2 physics/admissibility, 3 numerical
failure or a failed check).
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import eos, harness, stationary, transient
from .config import RunConfig, parse_config, resolve
from .errors import OutflowError
from .io import write_csv, write_json

COMMANDS = ("analyze-eos", "stationary", "simulate", "stability", "sweep")


def check(value, passed, threshold=None):
    return {"value": value, "threshold": threshold, "pass": bool(passed)}


def _finish(out: Path, command: str, checks: dict, extra: dict | None = None) -> int:
    ok = all(c["pass"] for c in checks.values())
    summary = {"command": command, "checks": checks, "all_pass": ok}
    if extra:
        summary.update(extra)
    write_json(out / "summary.json", summary)
    for name, c in checks.items():
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {name}")
    return 0 if ok else 3


# --- profile construction shared by several commands --------------------------

def build_profile(rc: RunConfig, spec=None, **over):
    spec = spec or rc.far_field_spec()
    st = dict(rc.data["stationary"], **{k: v for k, v in over.items() if v is not None})
    _, reg = stationary.jacobian_plus(spec)
    if reg.kind == stationary.TRANSONIC:
        return stationary.build_transonic_profile(spec, st["y10"], L=st["L"], N=st["N"],
                                                  method=st["method"], delta0=st["delta0"])
    return stationary.build_nondegenerate_profile(spec, st["eps"], L=st["L"], N=st["N"],
                                                  weights=st["weights"], delta0=st["delta0"])


def profile_checks(prof, rep) -> dict:
    sp = prof.spec
    scale = abs(sp.fluxes()[1])
    checks = {
        "mass_flux_constant": check(rep.mass_residual, rep.mass_residual <= 1e-8 * max(1.0, abs(sp.fluxes()[0])), 1e-8),
        "momentum_residual_rel": check(rep.momentum_residual_rel, rep.momentum_residual <= 1e-6 * scale, 1e-6),
        "monotone_approach": check(rep.monotone, rep.monotone),
    }
    if "step_halving_change" in prof.meta:
        d = prof.meta["step_halving_change"]
        checks["step_halving_change"] = check(d, d < 1e-7, 1e-7)
    if prof.delta == 0:
        return checks
    if prof.regime.kind == stationary.TRANSONIC:
        if rep.decay:
            for k, target in (("slope_k0", -1.0), ("slope_k1", -2.0)):
                s = rep.decay[k]
                checks[f"decay_{k}"] = check(s, abs(s - target) <= 0.1 * abs(target), [target, 0.1])
        if rep.asymptotics:
            a = rep.asymptotics
            checks["u_x_over_z2_variation"] = check(a["a1_variation"], a["a1_variation"] < 0.1 and a["a1_positive"], 0.1)
            checks["theta_x_over_z2_variation"] = check(a["a2_variation"], a["a2_variation"] < 0.1 and a["a2_positive"], 0.1)
            checks["z_bounds_positive"] = check([a["z_lower_c"], a["z_upper_C"]],
                                                0 < a["z_lower_c"] <= a["z_upper_C"] < math.inf)
    elif rep.decay:
        checks["exponential_rate"] = check(rep.decay["rate"], rep.decay["rate_rel_error"] <= 0.05, 0.05)
    return checks


# --- commands -------------------------------------------------------------------

def cmd_analyze_eos(rc: RunConfig, out: Path, args) -> int:
    spec = rc.far_field_spec()
    model = spec.model
    rep = eos.check_conditions(model, spec.state, spec.u_plus,
                               method="chain" if model.analytic else "fd")
    _, reg = stationary.jacobian_plus(spec)
    fd = eos.second_tilde_derivatives(model, spec.state, "fd")
    chain = eos.second_tilde_derivatives(model, spec.state, "chain")
    d = model.partials(spec.v_plus, spec.theta_plus)
    maxwell = abs(d.e_v - (spec.theta_plus * d.p_theta - d.p)) / (1 + abs(d.p))
    checks = {
        "basic_conditions": check(rep.basic_ok, rep.basic_ok),
        "transonic_sign_conditions": check(rep.transonic_signs, rep.transonic_extra_ok),
        "beta_conditions": check([rep.beta1, rep.beta2, rep.beta3], rep.beta_ok),
        "maxwell_relation": check(maxwell, maxwell < 1e-6, 1e-6),
        "second_tilde_fd_vs_chain": check(
            abs(fd.p_vv - chain.p_vv) / max(abs(chain.p_vv), 1e-300),
            abs(fd.p_vv - chain.p_vv) <= 1e-5 * max(abs(chain.p_vv), 1e-300), 1e-5),
    }
    out_data = {"conditions": rep.to_dict(), "regime": reg.to_dict(),
                "second_tilde_fd": fd.__dict__, "second_tilde_chain": chain.__dict__}
    if reg.kind == stationary.TRANSONIC:
        q = harness.quadratic_form_check(rep, seed=args.seed or 0)
        out_data["quadratic_form"] = q.to_dict()
        checks["minors_positive"] = check(list(q.minors), q.minors_positive)
        checks["f_positive_on_samples"] = check(q.min_f_ratio, q.all_positive)
        checks["minor3_closed_form"] = check(q.minor3_rel_diff, q.minor3_rel_diff < 1e-10, 1e-10)
    write_json(out / "conditions.json", out_data)
    return _finish(out, "analyze-eos", checks)


def cmd_stationary(rc: RunConfig, out: Path, args) -> int:
    checks = {}
    extra = {}
    if args.sweep:
        st = rc.data["far_field"]
        regs = stationary.classify_sweep(rc.model(), rc.phys(), st["v_plus"], st["theta_plus"],
                                         rc.data["stationary"]["sweep_factors"])
        write_csv(out / "regimes.csv",
                  ["factor", "mach", "detJ", "trace_b", "lambda1", "lambda2", "discriminant", "transonic"],
                  [rc.data["stationary"]["sweep_factors"], [r.mach for r in regs], [r.detJ for r in regs],
                   [r.trace_b for r in regs], [r.eigenvalues[0] for r in regs],
                   [r.eigenvalues[1] for r in regs], [r.discriminant for r in regs],
                   [1.0 if r.kind == stationary.TRANSONIC else 0.0 for r in regs]])
        extra["regimes"] = [r.kind for r in regs]
        checks["regime_signs"] = check(extra["regimes"], all(_regime_consistent(r) for r in regs))
    prof = build_profile(rc)
    rep = stationary.verify_profile(prof)
    prof.write(out, extra_header={"residuals": rep.to_dict()})
    checks.update(profile_checks(prof, rep))
    return _finish(out, "stationary", checks, extra)


def _regime_consistent(r) -> bool:
    l1, l2 = r.eigenvalues
    if r.kind == stationary.TRANSONIC:
        return abs(r.detJ) < 1e-8 * max(1.0, abs(r.trace_b) ** 2)
    if r.kind == stationary.SUPERSONIC:
        return r.detJ > 0 and l1 < l2 < 0
    return r.detJ < 0 and l1 < 0 < l2


def cmd_simulate(rc: RunConfig, out: Path, args) -> int:
    prof = build_profile(rc)
    cfg = rc.solver_config()
    grid = transient.Grid1D(prof.L, prof.N)
    solver = transient.Solver(prof.spec.model, grid, cfg, transient.boundary_from_profile(prof, cfg.far_field))
    base = transient.state_from_profile(prof)
    pert = harness.with_random_phase(rc.perturbation(), rc.data["perturbation"]["seed"])
    init, info = harness.make_initial(base, grid, pert)
    tracker = harness.Tracker(prof.spec.model, grid, base)
    res = solver.run(init, observers=[tracker], keep_snapshots=1)
    _write_run(out, grid, res, tracker, rc.data["transient"]["snapshots"])
    drift = transient.relative_drift(res.final, base)
    write_json(out / "run.json", {"run": res.summary(), "initial": info, "relative_drift": drift,
                                  "backend": solver.kern.__name__.rsplit(".", 1)[-1]})
    checks = {"mass_audit": check(res.mass_audit_error, res.mass_audit_error <= 1e-6, 1e-6),
              "positivity": check(True, bool(np.all(res.final.rho > 0) and np.all(res.final.theta > 0)))}
    return _finish(out, "simulate", checks)


def _write_run(out, grid, res, tracker, n_frames):
    frames = res.snapshots or [res.initial]
    if n_frames > 0 and len(frames) > n_frames:
        # evenly spaced frames, always including the first and the last
        pick = np.unique(np.round(np.linspace(0, len(frames) - 1, n_frames)).astype(int))
        frames = [frames[i] for i in pick]
    transient.write_snapshots(out / "snapshots.csv", grid, frames)
    tracker.series.write_csv(out / "series.csv")
    tracker.energy.write_csv(out / "energy.csv")


def cmd_stability(rc: RunConfig, out: Path, args) -> int:
    prof = build_profile(rc)
    cfg = rc.solver_config()
    pert = harness.with_random_phase(rc.perturbation(), rc.data["perturbation"]["seed"])
    r = harness.stability_run(prof.spec.model, prof, pert, cfg)
    grid = transient.Grid1D(prof.L, prof.N)
    _write_series(out, r)
    write_json(out / "run.json", r.summary())
    checks = {
        "verdict_converging": check(r.verdict.verdict, r.verdict.verdict == "converging"),
        "sup_reduction": check(r.sup_ratio, r.sup_ratio < 0.1, 0.1),
        "mass_audit": check(r.run.mass_audit_error, r.run.mass_audit_error <= 1e-6, 1e-6),
    }
    transient.write_snapshots(out / "snapshots.csv", grid, [r.run.initial, r.run.final])
    return _finish(out, "stability", checks)


def _write_series(out, r):
    r.series.write_csv(out / "series.csv")
    r.energy.write_csv(out / "energy.csv")


def _sweep_task(task):
    data, mach, amp, sub = task
    rc = RunConfig(data)
    spec = rc.far_field_spec(mach=mach)
    prof = build_profile(rc, spec)
    pert = harness.with_random_phase(rc.perturbation(), data["perturbation"]["seed"])
    pert = pert.scaled(amp / pert.amplitude) if pert.amplitude > 0 else pert
    sub = Path(sub)
    sub.mkdir(parents=True, exist_ok=True)
    try:
        r = harness.stability_run(prof.spec.model, prof, pert, rc.solver_config())
    except OutflowError as err:
        row = {"mach": mach, "amplitude": amp, "verdict": "failed", "error": str(err)}
        write_json(sub / "run.json", row)
        return row
    _write_series(sub, r)
    write_json(sub / "run.json", r.summary())
    return {"mach": mach, "amplitude": amp, "verdict": r.verdict.verdict, "sup_ratio": r.sup_ratio,
            "apriori_ratio_max": r.apriori_max, "c1": r.energy.c1[0], "regime": prof.regime.kind}


def cmd_sweep(rc: RunConfig, out: Path, args) -> int:
    sw = rc.data["sweep"]
    tasks = [(rc.data, m, a, str(out / f"mach_{m:.6g}" / f"amp_{a:.6g}"))
             for m in sw["mach"] for a in sw["amplitudes"]]
    threads = max(1, args.threads or 1)
    if threads == 1:
        rows = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_sweep_task, tasks))
    write_json(out / "sweep.json", {"runs": rows})
    checks = {}
    for m in sw["mach"]:
        sel = [r for r in rows if r["mach"] == m]
        conv = [r for r in sel if r["verdict"] == "converging"]
        checks[f"mach_{m:.6g}_all_converging"] = check([r["verdict"] for r in sel], len(conv) == len(sel))
        ratios = [r["apriori_ratio_max"] for r in conv]
        if ratios:
            med = float(np.median(ratios))
            dev = max(abs(x - med) / med for x in ratios)
            checks[f"mach_{m:.6g}_apriori_ratio_stable"] = check(dev, dev <= 0.5, 0.5)
        amps = [r["amplitude"] for r in conv]
        checks[f"mach_{m:.6g}_largest_converging_amplitude"] = check(max(amps) if amps else None, True)
    return _finish(out, "sweep", checks)


HANDLERS = {"analyze-eos": cmd_analyze_eos, "stationary": cmd_stationary, "simulate": cmd_simulate,
            "stability": cmd_stability, "sweep": cmd_sweep}


def build_parser():
    ap = argparse.ArgumentParser(prog="outflowlab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="YAML run configuration")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=int, help="seed for randomized perturbation phases")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for sweep")
    g = ap.add_argument_group("stationary")
    g.add_argument("--sweep", action="store_true", help="also classify a sweep of u_+ around -c")
    g.add_argument("--y10", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--L", type=float)
    g.add_argument("--N", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = None
    try:
        rc = parse_config(args.config)
        over = {f"stationary.{k}": getattr(args, k) for k in ("y10", "eps", "L", "N")
                if getattr(args, k) is not None}
        if args.seed is not None:
            over["perturbation.seed"] = args.seed
        if args.out:
            over["output.dir"] = args.out
        if over:
            rc = resolve(rc.data, over)
        out = rc.out_dir
        out.mkdir(parents=True, exist_ok=True)
        (out / "resolved_config.yaml").write_text(rc.dump())
        return HANDLERS[args.command](rc, out, args)
    except OutflowError as err:
        return _fail(out, err, err.exit_code)
    except (FloatingPointError, ArithmeticError) as err:
        return _fail(out, err, 3)


def _fail(out, err, code):
    diag = {"error": type(err).__name__, "message": str(err), "exit_code": code}
    for k in ("time", "node"):
        if getattr(err, k, None) is not None:
            diag[k] = getattr(err, k)
    print(f"error ({type(err).__name__}): {err}", file=sys.stderr)
    if out is not None:
        write_json(Path(out) / "error.json", diag)
    return code


if __name__ == "__main__":
    sys.exit(main())
