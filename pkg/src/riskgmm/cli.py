"""Command-line entry point: analyze / design / reproduce / verify.

Exit codes: 0 on success, 2 on infeasible or unstable inputs, 3 when a
verification suite fails. Every command that writes files writes its manifest
first; outputs are pure functions of the manifest.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import reports
from .objectives import (
    make_figure1_quadratic,
    make_paper_quadratic,
    objective_from_descriptor,
)
from .quad import (
    GmmParams,
    QuadDesignSpec,
    design_ra_gmm_quad,
    entropic_risk_exact,
    evar_bound,
    evar_exact,
    evar_exact_grid,
    in_stable_set,
    mode_cd,
    modes,
    quad_grid_sweep,
    spectral_radius,
)
from .simulate import NoiseModel, RunConfig, lyapunov_fixpoint_oracle, run_gmm
from .smooth import (
    SmoothDesignSpec,
    ThetaPsi,
    certify_smooth_params,
    classify_theta_psi,
    design_ra_gmm_smooth,
    evar_bound_gaussian,
    risk_bound_gaussian,
    smooth_params,
    smooth_sweep_rows,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RISKGMM_THREADS", "1")))
    except ValueError:
        return 1


def _load_objective(args):
    if getattr(args, "objective", None):
        with open(args.objective) as fh:
            return objective_from_descriptor(json.load(fh))
    quad = getattr(args, "quad", None)
    if quad == "figure1":
        return make_figure1_quadratic()
    if quad == "paper":
        return make_paper_quadratic()
    if quad is not None:
        raise SystemExit(f"unknown quadratic name: {quad}")
    raise SystemExit("an objective is required (--quad or --objective)")


def _parse_value(token: str, obj, role: str) -> float:
    """Parse numeric flags that may reference objective constants.

    Accepts plain floats, 'c/L' fractions, '2/(mu+L)', and 'agd' for the
    classic momentum value.
    """
    token = token.strip()
    if token == "agd":
        sl, sm = math.sqrt(obj.lsmooth), math.sqrt(obj.mu)
        return (sl - sm) / (sl + sm)
    if token == "2/(mu+L)":
        return 2.0 / (obj.mu + obj.lsmooth)
    if token.endswith("/L"):
        return float(token[:-2]) / obj.lsmooth
    return float(token)


def _quad_instability_diagnostic(params, obj) -> str:
    c, d, _, u = modes(params, obj)
    for i in range(c.size):
        if not abs(c[i]) < abs(1.0 - d[i]):
            return (
                f"mode {i} violates |c| < |1-d|: |c|={abs(c[i]):.6g}, "
                f"|1-d|={abs(1.0 - d[i]):.6g}"
            )
        if not u[i] > 0:
            return f"mode {i} violates u > 0: u={u[i]:.6g}"
    return "stable"


def cmd_analyze(args) -> int:
    obj = _load_objective(args)
    if args.out:
        manifest = {
            "command": "analyze",
            "objective": obj.descriptor(),
            "smooth": args.smooth,
            "alpha": args.alpha,
            "beta": args.beta,
            "gamma": args.gamma,
            "vartheta": args.vartheta,
            "psi": args.psi,
            "theta": args.theta,
            "zeta": args.zeta,
            "phi": args.phi,
            "sigma2": args.sigma2,
        }
        reports.write_json(os.path.join(args.out, "manifest.json"), manifest)
    out = {"objective": obj.descriptor(), "mu": obj.mu, "lsmooth": obj.lsmooth}
    if args.smooth:
        tp = ThetaPsi(args.vartheta, args.psi)
        member = classify_theta_psi(tp, obj.mu, obj.lsmooth)
        out["sets"] = {
            "in_s0": member.in_s0,
            "in_splus": member.in_splus,
            "in_sminus": member.in_sminus,
            "in_s1": member.in_s1,
            "in_sc": member.in_sc,
        }
        if not (member.in_s0 or member.in_sc):
            print(json.dumps(out, indent=2, sort_keys=True))
            print(
                "infeasible: (vartheta, psi) outside the certified set S_c + S_0",
                file=sys.stderr,
            )
            return EXIT_INFEASIBLE
        alpha = _parse_value(args.alpha, obj, "alpha") if args.alpha else None
        sp = smooth_params(tp, obj.mu, obj.lsmooth, alpha_s0=alpha)
        out["params"] = {"alpha": sp.alpha, "beta": sp.base.beta, "gamma": sp.base.gamma}
        out["rate2"] = sp.rate2
        cert = certify_smooth_params(sp)
        out["mi_certificate"] = {"certified": cert.certified, "max_eig_lhs": cert.max_eig_lhs}
        if args.theta is not None:
            rep = risk_bound_gaussian(sp, obj.dim, args.sigma2, args.theta, z0_lyap=0.0)
            out["risk_bound"] = {
                "theta": rep.theta,
                "theta_upper": rep.theta_upper,
                "rho_bar2": rep.rho_bar2,
                "stationary_bound": rep.stationary_bound,
                "finite": rep.finite,
            }
        erep = evar_bound_gaussian(sp, obj.dim, args.sigma2, args.zeta, args.phi)
        out["evar_bound"] = {
            "value": erep.asymptotic_bound,
            "condition_branch": 1 if erep.condition_holds else 2,
            "theta_phi": erep.theta_phi,
            "rho_barbar": erep.rho_barbar,
        }
    else:
        if args.alpha is None:
            raise SystemExit("quadratic analysis requires --alpha")
        alpha = _parse_value(args.alpha, obj, "alpha")
        beta = _parse_value(args.beta, obj, "beta") if args.beta else 0.0
        gamma = _parse_value(args.gamma, obj, "gamma") if args.gamma else beta if args.beta == "agd" else 0.0
        params = GmmParams(alpha, beta, gamma)
        out["params"] = {"alpha": alpha, "beta": beta, "gamma": gamma}
        out["rho"] = spectral_radius(params, obj)
        out["in_stable_set"] = in_stable_set(params, obj)
        if not out["in_stable_set"]:
            print(json.dumps(out, indent=2, sort_keys=True))
            print(f"infeasible: {_quad_instability_diagnostic(params, obj)}", file=sys.stderr)
            return EXIT_INFEASIBLE
        if args.theta is not None:
            rep = entropic_risk_exact(params, obj, args.sigma2, args.theta)
            out["entropic_risk"] = {
                "theta": rep.theta,
                "value": rep.entropic_risk,
                "feasible": rep.feasible,
                "per_mode_variance": rep.per_mode_variance.tolist(),
            }
        exact = evar_exact(params, obj, args.sigma2, args.zeta)
        bound = evar_bound(params, obj, args.sigma2, args.zeta)
        out["evar_exact"] = {"value": exact.value, "theta_star": exact.theta_star}
        out["evar_bound"] = {"value": bound.value, "theta_star": bound.theta_star}
    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out:
        reports.write_json(os.path.join(args.out, "analyze.json"), out)
    return EXIT_OK


def _design_quad(args, obj) -> int:
    spec = QuadDesignSpec(
        zeta=args.zeta,
        epsilon=args.epsilon,
        sigma2=args.sigma2,
        agd_constraint=args.agd,
        n_alpha=args.grid_alpha,
        n_beta=args.grid_beta,
        n_gamma=args.grid_gamma,
    )
    try:
        params, bound, rho = design_ra_gmm_quad(obj, spec)
    except ValueError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    exact = evar_exact(params, obj, args.sigma2, args.zeta)
    from .quad import agd_optimal_rate2

    result = {
        "params": {"alpha": params.alpha, "beta": params.beta, "gamma": params.gamma},
        "rate": rho,
        "rate_benchmark": math.sqrt(agd_optimal_rate2(obj.kappa)),
        "evar_bound": bound.value,
        "evar_exact": exact.value,
        "zeta": args.zeta,
        "epsilon": args.epsilon,
        "grid_meta": {
            "n_alpha": args.grid_alpha,
            "n_beta": args.grid_beta,
            "n_gamma": args.grid_gamma,
            "agd_constraint": args.agd,
        },
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    if args.out:
        reports.write_json(os.path.join(args.out, "design.json"), result)
        if args.sweep:
            sweep = quad_grid_sweep(obj, spec, threads=_threads())
            theta_list = args.theta_list or [0.01, 1.0, 2.0]
            cols = ["alpha", "beta", "gamma", "rho"]
            cols += [f"risk_theta_{t:g}" for t in theta_list]
            cols += ["evar_exact", "evar_bound"]
            stable_idx = np.flatnonzero(sweep["stable"])
            lam = obj.eigenvalues
            u_rows = np.empty((stable_idx.size, lam.size))
            for j, i in enumerate(stable_idx):
                p = GmmParams(sweep["alpha"][i], sweep["beta"][i], sweep["gamma"][i])
                c, d = mode_cd(p, lam)
                u_rows[j] = (1.0 + d) * ((1.0 - d) ** 2 - c * c) / (lam * (1.0 - d) * p.alpha**2)
            ev_vals = np.full(sweep["alpha"].size, np.inf)
            if stable_idx.size:
                vals, _ = evar_exact_grid(u_rows, args.sigma2, args.zeta)
                ev_vals[stable_idx] = vals
            risks = {}
            for t in theta_list:
                with np.errstate(invalid="ignore", divide="ignore"):
                    ratio = t / (2.0 * u_rows)
                    ok = np.all(ratio < 1.0, axis=1)
                    rv = np.where(
                        ok, -(args.sigma2 / t) * np.sum(np.log1p(-np.minimum(ratio, 1 - 1e-15)), axis=1), np.inf
                    )
                col = np.full(sweep["alpha"].size, np.inf)
                col[stable_idx] = rv
                risks[t] = col
            rows = []
            for i in range(sweep["alpha"].size):
                row = [sweep["alpha"][i], sweep["beta"][i], sweep["gamma"][i], sweep["rho"][i]]
                row += [risks[t][i] for t in theta_list]
                row += [ev_vals[i], sweep["evar_bound"][i]]
                rows.append(row)
            reports.write_csv(os.path.join(args.out, "sweep.csv"), cols, rows)
    return EXIT_OK


def _design_smooth(args, obj) -> int:
    spec = SmoothDesignSpec(
        zeta=args.zeta,
        epsilon=args.epsilon,
        phi=args.phi,
        sigma2=args.sigma2,
        d=obj.dim,
        n_vartheta=args.grid_vartheta,
        n_psi=args.grid_psi,
        n_alpha=args.grid_alpha,
        agd_only=args.agd,
        global_benchmark=args.global_benchmark,
    )
    try:
        sp, rep = design_ra_gmm_smooth(obj.mu, obj.lsmooth, spec)
    except ValueError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    result = {
        "params": {"alpha": sp.base.alpha, "beta": sp.base.beta, "gamma": sp.base.gamma},
        "vartheta": sp.vartheta,
        "psi": sp.psi,
        "rate2": sp.rate2,
        "evar_bound": rep.asymptotic_bound,
        "condition_branch": 1 if rep.condition_holds else 2,
        "zeta": args.zeta,
        "epsilon": args.epsilon,
        "phi": args.phi,
        "grid_meta": {
            "n_vartheta": args.grid_vartheta,
            "n_psi": args.grid_psi,
            "n_alpha": args.grid_alpha,
            "agd_only": args.agd,
            "global_benchmark": args.global_benchmark,
        },
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    if args.out:
        reports.write_json(os.path.join(args.out, "design.json"), result)
        if args.sweep:
            rows = smooth_sweep_rows(obj.mu, obj.lsmooth, spec)
            cols = [
                "vartheta", "psi", "alpha", "beta", "gamma",
                "rate2", "rate_rel", "evar_bound", "condition_branch",
            ]
            reports.write_csv(os.path.join(args.out, "sweep.csv"), cols, rows)
    return EXIT_OK


def cmd_design(args) -> int:
    obj = _load_objective(args)
    if args.out:
        manifest = {
            "command": "design",
            "mode": args.mode,
            "objective": obj.descriptor(),
            "zeta": args.zeta,
            "epsilon": args.epsilon,
            "phi": args.phi,
            "sigma2": args.sigma2,
            "agd": args.agd,
            "threads": _threads(),
        }
        reports.write_json(os.path.join(args.out, "manifest.json"), manifest)
    if args.mode == "quad":
        return _design_quad(args, obj)
    return _design_smooth(args, obj)


def cmd_reproduce(args) -> int:
    from .experiments import run_logreg_experiment, run_quad_experiment

    out = args.out or "."
    if args.experiment == "quad":
        run_quad_experiment(
            out, seed=args.seed, n_paths=args.paths, k_max=args.k, theta=args.theta
        )
    else:
        run_logreg_experiment(
            out,
            seed=args.seed,
            desk=not args.paper_scale,
            n_paths=args.paths,
            k_max=args.k,
            theta=args.theta,
        )
    return EXIT_OK


def _verify_oracles(seed: int):
    rng = np.random.default_rng(seed)
    checks = []
    # closed-form mode radius vs numeric eigenvalues of the companion block
    worst = 0.0
    for _ in range(2000):
        p = GmmParams(float(rng.uniform(1e-3, 3.0)), float(rng.uniform(0, 1.5)), float(rng.uniform(0, 1.5)))
        lam = float(rng.uniform(1e-2, 10.0))
        c, d = mode_cd(p, lam)
        numeric = float(np.max(np.abs(np.linalg.eigvals(np.array([[c, d], [1.0, 0.0]])))))
        from .quad import _rho_from_cd

        worst = max(worst, abs(float(_rho_from_cd(c, d)) - numeric))
    checks.append(("mode radius vs companion eigensolve", worst <= 1e-10, f"max err {worst:.2e}"))
    # stationary variance closed form vs fixpoint iteration
    obj = make_figure1_quadratic()
    worst = 0.0
    count = 0
    while count < 200:
        p = GmmParams(float(rng.uniform(1e-3, 1.0)), float(rng.uniform(0, 1.0)), float(rng.uniform(0, 1.0)))
        if not in_stable_set(p, obj):
            continue
        count += 1
        _, _, _, u = modes(p, obj)
        closed = 1.0 / (2.0 * u)
        fix = lyapunov_fixpoint_oracle(p, obj, sigma2=1.0, tol=1e-14)
        worst = max(worst, float(np.max(np.abs(closed - fix))))
    checks.append(("stationary variance vs Lyapunov fixpoint", worst <= 1e-8, f"max err {worst:.2e}"))
    return checks


def _verify_bounds(seed: int):
    checks = []
    obj = make_paper_quadratic()
    rng = np.random.default_rng(seed)
    # EV@R bound dominates exact EV@R
    bad = 0
    count = 0
    while count < 200:
        p = GmmParams(float(rng.uniform(1e-3, 1.0 / obj.lsmooth * 2)), float(rng.uniform(0, 1.0)), float(rng.uniform(0, 1.0)))
        if not in_stable_set(p, obj):
            continue
        count += 1
        zeta = float(rng.uniform(0.05, 0.99))
        if evar_bound(p, obj, 1.0, zeta).value < evar_exact(p, obj, 1.0, zeta).value - 1e-9:
            bad += 1
    checks.append(("EV@R bound >= exact EV@R", bad == 0, f"{bad} violations"))
    # simulated expected suboptimality within the certified bound
    sp = smooth_params(ThetaPsi(1.0, 1.0), obj.mu, obj.lsmooth, alpha_s0=1.0 / obj.lsmooth)
    x0 = np.ones(obj.dim)
    from .smooth import expected_subopt_bound, lyapunov_value

    v0 = float(lyapunov_value(sp, obj, x0, x0))
    cfg = RunConfig(params=sp.base, k_max=200, n_paths=2000, x0=x0, seed=seed)
    ens = run_gmm(obj, cfg, NoiseModel.gaussian(1.0))
    ok = True
    for k in (10, 100, 200):
        col = ens.column(k)
        mc = float(np.mean(col))
        slack = 3.0 * float(np.std(col)) / math.sqrt(col.size)
        if mc > expected_subopt_bound(sp, obj.dim, 1.0, v0, k) + slack:
            ok = False
    checks.append(("expected-suboptimality bound coverage", ok, ""))
    return checks


def _verify_mi(seed: int):
    rng = np.random.default_rng(seed)
    mu, L = 1.0, 10.0
    bad = 0
    count = 0
    while count < 50:
        t = float(rng.uniform(0.0, 2.0))
        p = float(rng.uniform(0.0, 2.5))
        tp = ThetaPsi(t, p)
        if not classify_theta_psi(tp, mu, L).in_sc:
            continue
        count += 1
        sp = smooth_params(tp, mu, L)
        if not certify_smooth_params(sp).certified:
            bad += 1
    sp_agd = smooth_params(ThetaPsi(1.0, 1.0), mu, L, alpha_s0=1.0 / L)
    agd_ok = certify_smooth_params(sp_agd).certified
    return [
        ("matrix-inequality certificates on admissible set", bad == 0, f"{bad} failures"),
        ("matrix-inequality certificate for AGD", agd_ok, ""),
    ]


def cmd_verify(args) -> int:
    suites = {"oracles": _verify_oracles, "bounds": _verify_bounds, "mi": _verify_mi}
    names = [args.suite] if args.suite else list(suites)
    failed = 0
    for name in names:
        for label, ok, detail in suites[name](args.seed):
            status = "PASS" if ok else "FAIL"
            suffix = f" ({detail})" if detail and not ok else ""
            print(f"{status} [{name}] {label}{suffix}")
            failed += 0 if ok else 1
    return EXIT_OK if failed == 0 else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riskgmm")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_objective_flags(p):
        p.add_argument("--quad", choices=["figure1", "paper"], help="named quadratic objective")
        p.add_argument("--objective", help="path to an objective descriptor JSON")

    pa = sub.add_parser("analyze", help="rates, set membership, risk and EV@R for given parameters")
    add_objective_flags(pa)
    pa.add_argument("--alpha")
    pa.add_argument("--beta")
    pa.add_argument("--gamma")
    pa.add_argument("--smooth", action="store_true", help="use the (vartheta, psi) certified analysis")
    pa.add_argument("--vartheta", type=float)
    pa.add_argument("--psi", type=float)
    pa.add_argument("--theta", type=float)
    pa.add_argument("--zeta", type=float, default=0.95)
    pa.add_argument("--phi", type=float, default=0.99)
    pa.add_argument("--sigma2", type=float, default=1.0)
    pa.add_argument("--out")
    pa.set_defaults(func=cmd_analyze)

    pd = sub.add_parser("design", help="risk-averse parameter design by grid search")
    add_objective_flags(pd)
    pd.add_argument("--mode", choices=["quad", "smooth"], required=True)
    pd.add_argument("--zeta", type=float, default=0.95)
    pd.add_argument("--epsilon", type=float, default=0.25)
    pd.add_argument("--phi", type=float, default=0.99)
    pd.add_argument("--sigma2", type=float, default=1.0)
    pd.add_argument("--agd", action="store_true", help="restrict to the AGD family")
    pd.add_argument("--global-benchmark", action="store_true",
                    help="benchmark the smooth rate against alpha = 1/L instead of per-candidate alpha")
    pd.add_argument("--grid-alpha", type=int, default=60)
    pd.add_argument("--grid-beta", type=int, default=60)
    pd.add_argument("--grid-gamma", type=int, default=60)
    pd.add_argument("--grid-vartheta", type=int, default=200)
    pd.add_argument("--grid-psi", type=int, default=200)
    pd.add_argument("--theta-list", type=float, nargs="*", default=None,
                    help="theta columns for the sweep CSV")
    pd.add_argument("--sweep", action="store_true", help="also export the full grid sweep CSV")
    pd.add_argument("--out")
    pd.set_defaults(func=cmd_design)

    pr = sub.add_parser("reproduce", help="run the packaged experiments")
    pr.add_argument("--experiment", choices=["quad", "logreg"], required=True)
    pr.add_argument("--desk", action="store_true", help="desk-scale logistic instance (default)")
    pr.add_argument("--paper-scale", action="store_true", help="full-size logistic instance")
    pr.add_argument("--paths", type=int)
    pr.add_argument("--k", type=int)
    pr.add_argument("--theta", type=float)
    pr.add_argument("--seed", type=int, default=7)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_reproduce)

    pv = sub.add_parser("verify", help="run oracle-comparison suites")
    pv.add_argument("--suite", choices=["oracles", "bounds", "mi"])
    pv.add_argument("--seed", type=int, default=20240)
    pv.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, SystemExit) as err:
        if isinstance(err, SystemExit):
            raise
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    raise SystemExit(main())
