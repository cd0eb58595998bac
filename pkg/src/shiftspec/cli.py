"""Command-line surface: simulate, audit, mincount, cmnist.

Exit codes: 0 success, 2 input error (bad arguments, files, environments),
3 numeric or degeneracy error (degenerate sweeps, non-PSD covariances).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .aline import (AccuracyPair, classify_split, correlation_epsilon,
                    fit_probit_line, min_model_count, probit_points)
from .cmnist import CmnistSpec, DEFAULT_NOISE_SIGMAS, cmnist_model_table
from .conditions import (condition_report, gaussian_kappa, kappa_of_mixture,
                         lipschitz_of_linear, shift_moments)
from .config import default_config, load_config
from .core import IdentityShift, LinearShift, Mask, MixtureShift
from .ingest import (dump_accuracy_table, leave_one_out_pairs,
                     load_accuracy_table, pairwise_pairs)
from .report import write_json_report
from .svgplot import ScatterPlot
from .synthgen import interpolation_mixture, random_shift, sample_domain
from .trainer import OptimizerSettings, evaluate_accuracy, fit_logistic
from .util import parallel_map

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


def _out_dir(path_text: str) -> Path:
    out = Path(path_text)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt_row(values) -> str:
    cells = []
    for v in values:
        if isinstance(v, bool):
            cells.append("true" if v else "false")
        elif isinstance(v, float):
            cells.append(f"{v:.17g}")
        else:
            cells.append(str(v))
    return ",".join(cells)


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else default_config()
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _out_dir(args.out)
    seed = args.seed

    spec = cfg.domain
    sweep = cfg.sweep
    if sweep.ood_mode == "interpolation":
        if sweep.base_components:
            components = sweep.components_or_default(spec.l)
        elif isinstance(spec.shift, MixtureShift):
            # reweight the ID mixture's own components
            components = spec.shift.matrices(spec.l)
        else:
            components = sweep.components_or_default(spec.l)
        if isinstance(spec.shift, IdentityShift):
            weight = 1.0 / len(components)
            spec = spec.with_shift(MixtureShift(tuple((weight, m) for m in components)))
    else:
        components = None

    opt = cfg.optimizer
    fit_opts = OptimizerSettings(tol=opt.tol, max_iters=opt.max_iters, bias=opt.bias)
    try:
        train = sample_domain(spec, sweep.n_per_domain, seed)
        full = fit_logistic(train, Mask.FULL, opt.l2, fit_opts)
        dg = fit_logistic(train, Mask.DOMAIN_GENERAL, opt.l2, fit_opts)
        if isinstance(spec.shift, MixtureShift):
            kappa = kappa_of_mixture([(w, m @ spec.mu_e, m @ spec.sigma_e @ m.T)
                                      for w, m in spec.shift.components])
        else:
            kappa = gaussian_kappa(spec.sigma_e)

        def run_shift(index: int) -> dict:
            if sweep.ood_mode == "interpolation":
                ood_shift = interpolation_mixture(components, seed=seed * 31 + 1000 + index)
                m_mean, sigma_phi = shift_moments(ood_shift, spec.mu_e, spec.sigma_e)
                l_phi = max(lipschitz_of_linear(m) for m in ood_shift.matrices(spec.l))
            else:
                m_mean = random_shift(spec.l, sweep.shift_scale,
                                      seed=seed * 31 + 1000 + index)
                ood_shift = LinearShift(m_mean)
                sigma_phi = None
                l_phi = lipschitz_of_linear(m_mean)
            rep = condition_report(full, spec, m_mean, delta=cfg.bounds.delta,
                                   kappa=kappa, l_phi=l_phi, sigma_phi=sigma_phi)
            test = sample_domain(spec.with_shift(ood_shift), sweep.n_per_domain,
                                 seed=seed * 31 + 7_000_000 + index)
            acc_dg = evaluate_accuracy(dg, test)
            acc_full = evaluate_accuracy(full, test)
            return {"index": index, "report": rep,
                    "acc_dg": acc_dg, "acc_full": acc_full}

        results = parallel_map(run_shift, list(range(sweep.n_shifts)))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    header = ["shift_index", "reversal_term", "theorem1_margin",
              "theorem1_well_specified", "snr_id", "snr_ood",
              "theorem2_well_specified", "acc_ood_domain_general",
              "acc_ood_full", "acc_gap"]
    lines = [",".join(header)]
    for r in results:
        rep = r["report"]
        lines.append(_fmt_row([r["index"], rep.reversal_term, rep.theorem1_margin,
                               rep.theorem1_well_specified, rep.snr_id,
                               rep.snr_ood, rep.theorem2_well_specified,
                               r["acc_dg"], r["acc_full"],
                               r["acc_dg"] - r["acc_full"]]))
    (out / "simulate.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    margins_neg = [r for r in results if r["report"].theorem1_margin < 0.0]
    dg_wins = sum(1 for r in margins_neg if r["acc_dg"] > r["acc_full"])
    agreement = sum(1 for r in margins_neg if r["report"].theorem2_well_specified)
    gaps = [abs(r["acc_dg"] - r["acc_full"]) for r in results]
    payload = {
        "seed": seed,
        "n_shifts": sweep.n_shifts,
        "ood_mode": sweep.ood_mode,
        "delta": cfg.bounds.delta,
        "mean_abs_gap": float(np.mean(gaps)),
        "margin_negative_count": len(margins_neg),
        "dg_wins_given_margin_negative": dg_wins,
        "theorem2_agreement_count": agreement,
    }
    write_json_report(payload, out / "simulate_report.json",
                      "simulate_report.schema.json")

    plot = ScatterPlot(title="OOD accuracy gap vs. spurious reversal term",
                       xlabel="w_e . M mu_e (dark points: reversal margin < 0)",
                       ylabel="OOD accuracy: domain-general minus full")
    certified = [r for r in results if r["report"].theorem1_margin < 0.0]
    rest = [r for r in results if r["report"].theorem1_margin >= 0.0]
    plot.add_points([r["report"].reversal_term for r in rest],
                    [r["acc_dg"] - r["acc_full"] for r in rest])
    plot.add_points([r["report"].reversal_term for r in certified],
                    [r["acc_dg"] - r["acc_full"] for r in certified],
                    color="#7d2181")
    plot.add_line(0.0, -1.0, 0.0, 1.0, color="#888888", dash="4,3")
    x_vals = [r["report"].reversal_term for r in results]
    plot.add_line(min(x_vals), 0.0, max(x_vals), 0.0, color="#888888", dash="4,3")
    (out / "simulate.svg").write_text(plot.render(), encoding="utf-8")
    print(f"simulate: wrote {out / 'simulate.csv'} "
          f"({len(results)} shifts, {len(margins_neg)} with negative margin)")
    return EXIT_OK


def _audit_pairs(args) -> tuple[list[AccuracyPair], str | None]:
    table = load_accuracy_table(args.table)
    if args.mode == "loo":
        return leave_one_out_pairs(table, args.ood_env), None
    if not args.id_env:
        raise InputError("pairwise mode requires --id-env")
    return pairwise_pairs(table, args.id_env, args.ood_env), args.id_env


def cmd_audit(args) -> int:
    try:
        pairs, id_env = _audit_pairs(args)
    except (OSError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _out_dir(args.out)

    try:
        fit = fit_probit_line(pairs, clip_alpha=args.clip_alpha)
        verdict = classify_split(fit, threshold=args.threshold)
        x, y = probit_points(pairs, args.clip_alpha)
        syy = float(y @ y)
        a6 = float(x @ y) / syy if syy > 0.0 else 0.0
        eps6 = correlation_epsilon(pairs, a6, clip_alpha=args.clip_alpha)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    payload = {
        "mode": args.mode,
        "ood_env": args.ood_env,
        "threshold": args.threshold,
        "n_models": len(pairs),
        "fit": fit.to_dict(),
        "verdict": verdict.value,
        "definition6": {"a": a6, "epsilon": eps6},
    }
    if id_env:
        payload["id_env"] = id_env
    write_json_report(payload, out / "audit_report.json", "audit_report.schema.json")

    # Table-1 column order: slope, offset, R, p-value, std error
    csv = ("slope,offset,R,p-value,std error\n"
           + _fmt_row([fit.slope, fit.intercept, fit.pearson_r,
                       fit.p_value, fit.std_err]) + "\n")
    (out / "audit_row.csv").write_text(csv, encoding="utf-8")

    plot = ScatterPlot(title=f"ID vs OOD accuracy (probit scale), OOD={args.ood_env}",
                       xlabel="ID accuracy (probit)",
                       ylabel="OOD accuracy (probit)", probit_axes=True)
    plot.add_points(x, y)
    plot.line_over_x(fit.slope, fit.intercept, color="#c23b22")
    lo = float(min(x.min(), y.min()))
    hi = float(max(x.max(), y.max()))
    plot.add_line(lo, lo, hi, hi, color="#888888", dash="4,3")
    (out / "audit_scatter.svg").write_text(plot.render(), encoding="utf-8")
    print(f"audit: R={fit.pearson_r:.4f} verdict={verdict.value} "
          f"({len(pairs)} models)")
    return EXIT_OK


def cmd_mincount(args) -> int:
    try:
        table = load_accuracy_table(args.table)
        pairs = leave_one_out_pairs(table, args.ood_env)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _out_dir(args.out)
    try:
        minimum = min_model_count(pairs, rel_tol=args.rel_tol,
                                  resamples=args.resamples,
                                  confidence=args.confidence,
                                  start=args.start, step=args.step,
                                  clip_alpha=args.clip_alpha, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if "need at least" in str(exc) else EXIT_NUMERIC

    payload = {
        "ood_env": args.ood_env,
        "rel_tol": args.rel_tol,
        "resamples": args.resamples,
        "confidence": args.confidence,
        "total_models": len(pairs),
        "reached": minimum is not None,
    }
    if minimum is not None:
        payload["minimum_models"] = minimum
    write_json_report(payload, out / "mincount_report.json",
                      "mincount_report.schema.json")

    min_text = str(minimum) if minimum is not None else "not_reached"
    (out / "mincount.csv").write_text(
        "minimum_models,total_models\n" + f"{min_text},{len(pairs)}\n",
        encoding="utf-8")
    print(f"mincount: minimum={min_text} total={len(pairs)}")
    return EXIT_OK


def _parse_grid(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    grid = tuple(float(p) for p in parts)
    if any(not 0.0 <= g <= 1.0 for g in grid):
        raise InputError("test grid probabilities must lie in [0, 1]")
    return grid


def cmd_cmnist(args) -> int:
    try:
        if not 0.0 <= args.train_pe <= 1.0:
            raise InputError("--train-pe must lie in [0, 1]")
        if not 0.0 <= args.label_noise <= 1.0:
            raise InputError("--label-noise must lie in [0, 1]")
        grid = _parse_grid(args.test_grid)
        spec = CmnistSpec(label_noise=args.label_noise, p_e=(args.train_pe,))
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _out_dir(args.out)

    try:
        table = cmnist_model_table(spec, train_env=0, test_grid=grid,
                                   n_train=args.n_train,
                                   noise_sigmas=DEFAULT_NOISE_SIGMAS,
                                   seeds_per_sigma=args.seeds_per_sigma,
                                   seed=args.seed)
        (out / "cmnist_table.csv").write_text(dump_accuracy_table(table),
                                              encoding="utf-8")

        per_env = []
        pooled_pairs: list[AccuracyPair] = []
        for env, p_test in zip(table.env_names[1:], grid):
            env_pairs = pairwise_pairs(table, "env_id", env)
            pooled_pairs.extend(env_pairs)
            fit = fit_probit_line(env_pairs, clip_alpha=args.clip_alpha)
            per_env.append({
                "env": env,
                "test_p_e": p_test,
                "pearson_r": fit.pearson_r,
                "slope": fit.slope,
                "verdict": classify_split(fit, args.threshold).value,
            })
        pooled_fit = fit_probit_line(pooled_pairs, clip_alpha=args.clip_alpha)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    payload = {
        "train_p_e": args.train_pe,
        "label_noise": args.label_noise,
        "n_models": len(table.rows),
        "per_env": per_env,
        "pooled": {
            "pearson_r": pooled_fit.pearson_r,
            "slope": pooled_fit.slope,
            "verdict": classify_split(pooled_fit, args.threshold).value,
        },
    }
    write_json_report(payload, out / "cmnist_report.json",
                      "cmnist_report.schema.json")

    x, y = probit_points(pooled_pairs, args.clip_alpha)
    plot = ScatterPlot(title=f"ColoredMNIST sweep: train p_e={args.train_pe:g}",
                       xlabel="ID accuracy (probit)",
                       ylabel="OOD accuracy (probit)", probit_axes=True)
    plot.add_points(x, y)
    plot.line_over_x(pooled_fit.slope, pooled_fit.intercept)
    (out / "cmnist_scatter.svg").write_text(plot.render(), encoding="utf-8")
    rs = ", ".join(f"{e['env']}:{e['pearson_r']:.2f}" for e in per_env)
    print(f"cmnist: pooled R={pooled_fit.pearson_r:.4f}; per-env [{rs}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftspec",
        description="Simulate spurious-correlation shifts and audit "
                    "accuracy tables for accuracy on the line.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the shift-sweep simulation")
    sim.add_argument("--config", default=None, help="INI config path")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default="out_simulate")
    sim.set_defaults(func=cmd_simulate)

    aud = sub.add_parser("audit", help="audit an accuracy table")
    aud.add_argument("--table", required=True, help="accuracy-table CSV path")
    aud.add_argument("--mode", choices=("loo", "pairwise"), default="loo")
    aud.add_argument("--ood-env", required=True)
    aud.add_argument("--id-env", default=None)
    aud.add_argument("--threshold", type=float, default=0.3)
    aud.add_argument("--clip-alpha", type=float, default=1e-4)
    aud.add_argument("--out", default="out_audit")
    aud.set_defaults(func=cmd_audit)

    mc = sub.add_parser("mincount", help="minimum models for a stable R")
    mc.add_argument("--table", required=True)
    mc.add_argument("--ood-env", required=True)
    mc.add_argument("--rel-tol", type=float, default=0.01)
    mc.add_argument("--resamples", type=int, default=1000)
    mc.add_argument("--confidence", type=float, default=0.95)
    mc.add_argument("--start", type=int, default=10)
    mc.add_argument("--step", type=int, default=100)
    mc.add_argument("--clip-alpha", type=float, default=1e-4)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--out", default="out_mincount")
    mc.set_defaults(func=cmd_mincount)

    cm = sub.add_parser("cmnist", help="ColoredMNIST sweep and audit")
    cm.add_argument("--train-pe", type=float, default=0.9)
    cm.add_argument("--test-grid", default="0.8,0.85,0.9,0.95,0.99")
    cm.add_argument("--label-noise", type=float, default=0.25)
    cm.add_argument("--n-train", type=int, default=4000)
    cm.add_argument("--seeds-per-sigma", type=int, default=2)
    cm.add_argument("--threshold", type=float, default=0.3)
    cm.add_argument("--clip-alpha", type=float, default=1e-4)
    cm.add_argument("--seed", type=int, default=0)
    cm.add_argument("--out", default="out_cmnist")
    cm.set_defaults(func=cmd_cmnist)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
