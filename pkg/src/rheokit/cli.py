"""Command-line surface: JSON models in, CSV curve data out.

Commands
--------
rheokit curve       effective viscosity and stress over a rate range
rheokit compare     rigorous vs harmonic-mean serial creep curves
rheokit equivalence three-element equivalence check and empirical gap
rheokit simulate    0D generalized Maxwell time integration
rheokit conjugate   conjugate of a single potential

Exit codes: 0 ok, 2 input/schema error, 3 solver/integrator failure,
4 equivalence regression.  Output is deterministic: 17 significant
digits, ``\\n`` line endings, ``inf`` as the literal token.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import (
    InvalidInputError,
    NonConvergenceError,
    SchemaError,
    UnsupportedModeError,
)
from .maxwell0d import simulate
from .potentials import QuadPlusBall, conjugate_analytic, value
from .rheology import (
    Formula,
    Leaf,
    ThreeElementParams,
    map_serial_parallel_params,
    mu_eff_formula,
    mu_eff_rigorous,
    serial_dif_dsl_stress,
    stress_curve,
    three_element_parallel_serial,
    three_element_serial_parallel,
)
from .schema import dump_model, dump_simulation, parse_model, parse_simulation

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_EQUIVALENCE = 4

FIG6_PRESET = {
    "d_dif": 1.0,
    "d_dsl": 1.0,
    "n_list": "2,3,inf",
    "eps_min": 3.4 / 200.0,
    "eps_max": 3.4,
    "samples": 200,
}


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def _write(out_path, text: str) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header, columns) -> str:
    lines = [",".join(header)]
    n = len(columns[0])
    for i in range(n):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    return "\n".join(lines) + "\n"


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError("", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _eps_grid(eps_min, eps_max, samples):
    if eps_min < 0 or not (eps_max > eps_min) or samples < 2:
        raise InvalidInputError(
            "need eps_min >= 0, eps_max > eps_min and samples >= 2"
        )
    return np.linspace(eps_min, eps_max, int(samples))


def cmd_curve(args) -> int:
    expr = parse_model(_load_json(args.model))
    if args.dump_model:
        _write(args.out, _dump_json(dump_model(expr)))
        return EXIT_OK
    eps = _eps_grid(args.eps_min, args.eps_max, args.samples)
    sigma = stress_curve(expr, eps)
    mu = np.empty_like(eps)
    pos = eps > 0
    mu[pos] = sigma[pos] / eps[pos]
    for i in np.nonzero(~pos)[0]:
        mu[i] = mu_eff_rigorous(expr, 0.0, limit=True)
    _write(args.out, _csv(["eps", "mu_eff", "sigma"], [eps, mu, sigma]))
    return EXIT_OK


def _parse_n_list(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok == "inf":
            out.append(math.inf)
        elif tok in ("2", "3"):
            out.append(float(tok))
        else:
            raise InvalidInputError(f"n-list entries must be 2, 3 or inf, got {tok!r}")
    if not out:
        raise InvalidInputError("n-list must not be empty")
    return out


def _n_suffix(n) -> str:
    return "inf" if math.isinf(n) else f"n{int(n)}"


def compare_columns(d_dif, d_dsl, n_list, eps):
    """Rigorous and harmonic-mean curves of the serial creep pair."""
    mus_rig, mus_emp, sig_rig, sig_emp = [], [], [], []
    for n in n_list:
        if math.isinf(n):
            sig = eps * mu_eff_formula(Formula.VP_MIN, (d_dsl, d_dif), eps)
        else:
            try:
                sig = serial_dif_dsl_stress(d_dif, d_dsl, n, eps, mode="closed")
            except UnsupportedModeError:
                sig = serial_dif_dsl_stress(d_dif, d_dsl, n, eps, mode="numeric")
        mu_emp = mu_eff_formula(Formula.EMP_DIF_DSL, (d_dif, d_dsl, n), eps)
        mus_rig.append(sig / eps)
        sig_rig.append(sig)
        mus_emp.append(mu_emp)
        sig_emp.append(mu_emp * eps)
    return mus_rig, mus_emp, sig_rig, sig_emp


def cmd_compare(args) -> int:
    if args.preset == "fig6":
        for key, val in FIG6_PRESET.items():
            if getattr(args, key) is None:
                setattr(args, key, val)
    defaults = {"d_dif": 1.0, "d_dsl": 1.0, "n_list": "2,3,inf",
                "eps_min": 0.017, "eps_max": 3.4, "samples": 200}
    for key, val in defaults.items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    n_list = _parse_n_list(args.n_list)
    if not (args.d_dif > 0 and args.d_dsl > 0):
        raise InvalidInputError("moduli must be positive")
    if args.eps_min <= 0:
        raise InvalidInputError("compare needs eps_min > 0")
    eps = _eps_grid(args.eps_min, args.eps_max, args.samples)
    mus_rig, mus_emp, sig_rig, sig_emp = compare_columns(
        args.d_dif, args.d_dsl, n_list, eps
    )
    header = ["eps"]
    header += [f"mu_rig_{_n_suffix(n)}" for n in n_list]
    header += [f"mu_emp_{_n_suffix(n)}" for n in n_list]
    header += [f"sig_rig_{_n_suffix(n)}" for n in n_list]
    header += [f"sig_emp_{_n_suffix(n)}" for n in n_list]
    _write(args.out, _csv(header, [eps, *mus_rig, *mus_emp, *sig_rig, *sig_emp]))
    return EXIT_OK


def equivalence_report(sigma_a, d2, d3, n_grid=1000):
    """Rigorous three-element equivalence data and the empirical gap."""
    base = ThreeElementParams(sigma_a, d2, d3)
    tilde = map_serial_parallel_params(sigma_a, d2, d3)
    tree_a = three_element_parallel_serial(base)
    tree_b = three_element_serial_parallel(tilde)
    eps_max = 5.0 * base.sigma_a / base.D2
    eps = np.linspace(eps_max / n_grid, eps_max, n_grid)
    dev = np.max(np.abs(stress_curve(tree_a, eps) - stress_curve(tree_b, eps)))
    tol = 1e-10 * (base.sigma_a + base.D2 + base.D3)
    emp = {}
    for e in (0.5, 1.0, 2.0):
        v1 = mu_eff_formula(Formula.EMP_VAR1, (base.sigma_a, base.D2, base.D3), e)
        v2 = mu_eff_formula(Formula.EMP_VAR2, (tilde.sigma_a, tilde.D2, tilde.D3), e)
        emp[e] = abs(v1 - v2)
    return tilde, float(dev), tol, emp


def cmd_equivalence(args) -> int:
    if not (args.sigma_a > 0 and args.d2 > 0 and args.d3 > 0):
        raise InvalidInputError("sigma_a, d2, d3 must be positive")
    tilde, dev, tol, emp = equivalence_report(args.sigma_a, args.d2, args.d3)
    ok = dev < tol
    lines = [
        f"sigma_a_tilde={_fmt(tilde.sigma_a)}",
        f"D2_tilde={_fmt(tilde.D2)}",
        f"D3_tilde={_fmt(tilde.D3)}",
        f"rigorous_max_dev={_fmt(dev)}",
        f"rigorous_tol={_fmt(tol)}",
    ]
    for e in sorted(emp):
        lines.append(f"empirical_dev_eps{_fmt(e)}={_fmt(emp[e])}")
    lines.append(f"status={'equivalent' if ok else 'BREACH'}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_EQUIVALENCE


def cmd_simulate(args) -> int:
    model, drive, e_el0 = parse_simulation(_load_json(args.model))
    if args.dump_model:
        _write(args.out, _dump_json(dump_simulation(model, drive, e_el0)))
        return EXIT_OK
    if not (args.dt > 0 and args.t_end >= args.dt):
        raise InvalidInputError("need dt > 0 and t_end >= dt")
    ts = simulate(model, drive, args.dt, args.t_end, e_el0)
    _write(args.out, _csv(["t", "eps", "e_el", "sigma"], [ts.t, ts.eps, ts.e_el, ts.sigma]))
    return EXIT_OK


def cmd_conjugate(args) -> int:
    expr = parse_model(_load_json(args.model))
    if args.dump_model:
        _write(args.out, _dump_json(dump_model(expr)))
        return EXIT_OK
    if not isinstance(expr, Leaf):
        raise SchemaError(
            "node", "conjugate takes a leaf model; curve data covers composites"
        )
    conj = conjugate_analytic(expr.p)
    sigma_max = args.sigma_max
    if sigma_max is None:
        sigma_max = 2.0 * conj.sigma_a if isinstance(conj, QuadPlusBall) else 10.0
    if not (sigma_max > 0) or args.samples < 2:
        raise InvalidInputError("need sigma_max > 0 and samples >= 2")
    s = np.linspace(0.0, sigma_max, int(args.samples))
    vals = value(conj, s)
    _write(args.out, _csv(["sigma", "zeta_star"], [s, vals]))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rheokit",
        description="Viscoplastic network models: curves, comparisons, 0D simulation.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="mu_eff and stress over a rate range")
    curve.add_argument("--model", required=True, help="model JSON path")
    curve.add_argument("--eps-min", dest="eps_min", type=float, default=0.01)
    curve.add_argument("--eps-max", dest="eps_max", type=float, default=10.0)
    curve.add_argument("--samples", type=int, default=200)
    curve.add_argument("--out", default=None, help="output CSV (default stdout)")
    curve.add_argument("--dump-model", dest="dump_model", action="store_true")
    curve.set_defaults(fn=cmd_curve)

    comp = sub.add_parser("compare", help="rigorous vs harmonic-mean serial creep")
    comp.add_argument("--preset", choices=["fig6"], default=None)
    comp.add_argument("--d-dif", dest="d_dif", type=float, default=None)
    comp.add_argument("--d-dsl", dest="d_dsl", type=float, default=None)
    comp.add_argument("--n-list", dest="n_list", default=None, help="subset of 2,3,inf")
    comp.add_argument("--eps-min", dest="eps_min", type=float, default=None)
    comp.add_argument("--eps-max", dest="eps_max", type=float, default=None)
    comp.add_argument("--samples", type=int, default=None)
    comp.add_argument("--out", default=None)
    comp.set_defaults(fn=cmd_compare)

    eq = sub.add_parser("equivalence", help="three-element equivalence check")
    eq.add_argument("--sigma-a", dest="sigma_a", type=float, required=True)
    eq.add_argument("--d2", type=float, required=True)
    eq.add_argument("--d3", type=float, required=True)
    eq.add_argument("--out", default=None)
    eq.set_defaults(fn=cmd_equivalence)

    sim = sub.add_parser("simulate", help="0D Maxwell time integration")
    sim.add_argument("--model", required=True, help="simulation JSON path")
    sim.add_argument("--dt", type=float, default=1e-3)
    sim.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    sim.add_argument("--out", default=None)
    sim.add_argument("--dump-model", dest="dump_model", action="store_true")
    sim.set_defaults(fn=cmd_simulate)

    conj = sub.add_parser("conjugate", help="conjugate of a leaf potential")
    conj.add_argument("--model", required=True)
    conj.add_argument("--sigma-max", dest="sigma_max", type=float, default=None)
    conj.add_argument("--samples", type=int, default=256)
    conj.add_argument("--out", default=None)
    conj.add_argument("--dump-model", dest="dump_model", action="store_true")
    conj.set_defaults(fn=cmd_conjugate)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"rheokit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidInputError as exc:
        print(f"rheokit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonConvergenceError as exc:
        print(f"rheokit: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def entry() -> None:
    sys.exit(main())
