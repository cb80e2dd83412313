"""Command-line front end: JSON in, JSON report out.

Exit status: 0 on success, 1 when the report carries a negative verdict
(Refuted, Incompatible, Obstruction, NotAChambar), 2 on malformed input, and 3
when a numerical or internal consistency guard fires.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from fractions import Fraction
from typing import Any, Optional

from . import catalog, core, diffeo, homogeneous, linear, ode4
from .errors import ChambarError, InputError
from .scalars import Cyclo, imag_unit, scalar_from_json, scalar_to_json
from .series import Jet, jet_from_json, jet_to_json

NEGATIVE = {"Refuted", "Incompatible", "Obstruction", "NotAChambar"}
DEFAULT_SEED = 20240601


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def to_jsonable(obj: Any) -> Any:
    """Recursive conversion of reports (dataclasses, scalars, jets, fields) to JSON values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (Cyclo, complex)):
        return scalar_to_json(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Jet):
        return jet_to_json(obj)
    if isinstance(obj, core.VectorField):
        return core.field_to_json(obj)
    if isinstance(obj, core.Chambar):
        return core.chambar_to_json(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    try:
        import numpy as np

        if isinstance(obj, np.generic):
            return to_jsonable(obj.item())
        if isinstance(obj, np.ndarray):
            return to_jsonable(obj.tolist())
    except ImportError:  # pragma: no cover
        pass
    return str(obj)


def dumps(report: Any) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, ensure_ascii=False)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


_NAMED = {
    "j": lambda: Cyclo.zeta(3),
    "j2": lambda: Cyclo.zeta(3, 2),
    "j^2": lambda: Cyclo.zeta(3, 2),
    "i": lambda: imag_unit(4),
}


def parse_scalar(v):
    """JSON scalar, or the names j, j^2 (cube roots of unity) and i, optionally negated."""
    if isinstance(v, str):
        s = v.strip()
        neg = s.startswith("-")
        key = s[1:] if neg else s
        if key in _NAMED:
            val = _NAMED[key]()
            return -val if neg else val
    return scalar_from_json(v)


def parse_json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"argument is not valid JSON: {exc}") from exc


def _scalars(obj):
    if isinstance(obj, list) and not (len(obj) == 2 and all(isinstance(x, float) for x in obj)):
        return [_scalars(x) for x in obj]
    return parse_scalar(obj)


def read_input(args) -> Any:
    path = getattr(args, "input", None)
    try:
        if path and path != "-":
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = sys.stdin.read()
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    if not text.strip():
        raise InputError("no JSON input given (use --input or standard input)")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from exc


def _scalar_mode(args):
    """('exact', m) or ('approx', None) from --scalar."""
    spec = getattr(args, "scalar", None) or "exact:1"
    if spec == "approx":
        return "approx", None
    if spec.startswith("exact"):
        _, _, m = spec.partition(":")
        try:
            return "exact", int(m) if m else 1
        except ValueError as exc:
            raise InputError(f"bad --scalar value {spec!r}") from exc
    raise InputError(f"bad --scalar value {spec!r}; use exact:m or approx")


def _load_chambar(args) -> core.Chambar:
    obj = read_input(args)
    ch = core.chambar_from_json(obj)
    mode, _ = _scalar_mode(args)
    if mode == "approx":
        ch = core.Chambar([X.to_approx() for X in ch.fields], list(ch.weights), ch.expected)
    return ch


def _load_fields(args) -> list:
    obj = read_input(args)
    if isinstance(obj, dict) and "fields" in obj:
        return [core.field_from_json(f) for f in obj["fields"]]
    if isinstance(obj, dict) and "components" in obj:
        return [core.field_from_json(obj)]
    raise InputError("expected a vector field or a chambar")


def _load_jets(obj) -> list:
    if isinstance(obj, dict) and "components" in obj:
        obj = obj["components"]
    if not isinstance(obj, list):
        raise InputError("expected a list of jets")
    return [jet_from_json(j) for j in obj]


def _kind(report) -> Optional[str]:
    if isinstance(report, dict):
        for key in ("certificate_kind", "kind"):
            if key in report and isinstance(report[key], str):
                return report[key]
        if "verdict" in report:
            return _kind(report["verdict"])
    return None


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def cmd_verify(args):
    ch = _load_chambar(args)
    K = args.order if args.order is not None else 8
    v = core.check_barycentric(ch, K, args.spatial_order, args.tol)
    report = v.to_dict()
    if ch.expected is not None:
        report["expected"] = ch.expected
        report["matches_expected"] = ch.expected.get("certificate_kind") == report["certificate_kind"]
    return report


def cmd_degree(args):
    bound = args.order if args.order is not None else 16
    return {"fields": [to_jsonable(core.t_poly_degree(X, bound)) for X in _load_fields(args)]}


def cmd_classify1d(args):
    return core.classify_1d(_load_chambar(args), args.tol)


def cmd_straight(args):
    return {"fields": [core.straightness_test(X, args.tol or 0.0) for X in _load_fields(args)]}


def cmd_pfaff(args):
    r = core.pfaffian_integrability(_load_chambar(args))
    return {
        "omega": r.omega,
        "coefficient": r.coefficient,
        "pair": list(r.pair),
        "annihilates_all": r.annihilates_all,
        "contact": r.contact,
    }


def cmd_semirigid(args):
    ch = _load_chambar(args)
    if ch.p != 3:
        raise InputError("semi-rigid analysis takes three fields")
    return core.semi_rigid_analyze(*ch.fields, tol=args.tol or 0.0)


def _arg(args, name, default=None):
    v = getattr(args, name, None)
    return parse_json_arg(v) if v is not None else default


def cmd_gen(args):
    fam = args.family
    mode, m = _scalar_mode(args)
    if fam == "constant":
        ch = catalog.gen_constant(_scalars(_arg(args, "vectors")))
    elif fam in ("rigid-root", "rigid"):
        name = args.field or "Z2"
        if name.upper().startswith("Z"):
            nu = int(name[1:])
            base = parse_scalar(_arg(args, "basepoint", 1)).as_fraction()
            order = args.order if args.order is not None else 20
            X = catalog.z_nu_field(nu, base, order, m if m and m > 1 else None)
            ch = catalog.gen_rigid_root_of_unity(X, args.m, nu)
        elif name.upper().startswith("J"):
            X = catalog.jordan_field(int(name[1:]))
            ch = catalog.gen_rigid_root_of_unity(X, args.m)
        else:
            raise InputError(f"unknown field {name!r}; use Z<nu> or J<n>")
    elif fam == "translations":
        order = args.order if args.order is not None else 12
        ch = catalog.gen_conjugated_translations(catalog.parabola_map(), _scalars(_arg(args, "vectors")), order)
    elif fam == "polyfamily":
        a = _scalars(_arg(args, "a"))
        coeffs = _arg(args, "coeffs")
        if coeffs is None:
            sol = catalog.solve_polynomial_family(a)
            nu = 2
            vec = sol["kernel_basis"][0] if sol["kernel_basis"] else [Cyclo.rational(0)] * (len(a) * (nu + 1))
            coeffs = [vec[k * (nu + 1) : (k + 1) * (nu + 1)] for k in range(len(a))]
        else:
            coeffs = _scalars(coeffs)
        ch = catalog.polynomial_family_chambar(a, coeffs)
    elif fam == "blowup":
        base = _arg(args, "basepoint")
        order = args.order if args.order is not None else 12
        ch = catalog.gen_blowup_birational(_scalars(_arg(args, "a")), _scalars(base) if base else None, order)
    elif fam == "exponential":
        order = args.order if args.order is not None else 12
        ch = catalog.gen_exponential(
            _scalars(_arg(args, "a")), _scalars(_arg(args, "b")), _scalars(_arg(args, "lam")), order=order
        )
    elif fam == "heisenberg":
        ch = catalog.gen_linear_heisenberg(
            _scalars(_arg(args, "alpha")), _scalars(_arg(args, "beta")), _scalars(_arg(args, "gamma"))
        )
    elif fam == "homog2":
        ch = catalog.gen_homogeneous_deg2(_scalars(_arg(args, "a")))
    else:
        raise InputError(f"unknown family {fam!r}")
    return ch


def cmd_linear(args):
    if args.action == "sample":
        params = _arg(args, "params", {})
        C = linear.sample_family(args.family, params, args.seed, args.beta_form)
        out = linear.matrix_chambar_to_json(C)
        out["params"] = {k: scalar_to_json(v) for k, v in sorted(C.params.items())} if hasattr(C, "params") else {}
        return out
    C = linear.matrix_chambar_from_json(read_input(args))
    if args.action == "verify":
        return linear.verify_linear(C)
    if args.action == "heisenberg":
        r = linear.heisenberg_embed_test(C.matrices)
        return r
    if args.action == "rank":
        return {"rank": linear.chambar_rank(C), "nilpotency_indices": [linear.nilpotency_index(M) for M in C.matrices]}
    raise InputError(f"unknown linear action {args.action!r}")


def cmd_diffeo(args):
    if args.action == "kernel":
        names = [s.strip() for s in (args.ops or "S,T").split(",") if s.strip()]
        ops = []
        for name in names:
            if name.startswith("T_"):
                ops.append(diffeo.make_operator("T_k", args.n, int(name[2:]), m=args.m or 3))
            else:
                ops.append(diffeo.make_operator(name, args.n, m=args.m or 3))
        D = args.degree if args.degree is not None else 6
        basis = diffeo.kernel_basis(ops, args.n, D, args.m or 3)
        return {"dimension": len(basis), "basis": basis, "ops": names, "D": D}
    if args.action == "check":
        if args.random:
            F = diffeo.random_compatible_map(random.Random(args.seed))
        else:
            F = _load_jets(read_input(args))
        r = diffeo.check_compatible(F)
        out = to_jsonable(r)
        out["map"] = [jet_to_json(f) for f in F]
        return out
    if args.action == "ideal":
        p = args.p if args.p is not None else 3
        r = diffeo.mn_power_membership(args.n, p, args.degree)
        return r
    raise InputError(f"unknown diffeo action {args.action!r}")


def _complex_list(obj) -> list:
    out = []
    for v in obj:
        s = parse_scalar(v)
        out.append(complex(s))
    return out


def cmd_ode4(args):
    if args.action == "build":
        chi = ode4.build_chi()
        out = chi.to_dict()
        out["identities"] = ode4.structural_identities(chi)
        return out
    if args.action == "verify":
        chi = ode4.build_chi()
        D = args.degree if args.degree is not None else 6
        names = [s.strip() for s in args.ideals.split(",")] if args.ideals else None
        ideals = [ode4.standard_ideal(n, chi) for n in names] if names else ode4.all_standard_ideals(chi)
        results = [ode4.verify_invariance(chi, I, D) for I in ideals]
        ok = all(r.kind == "Invariant" for r in results)
        return {
            "certificate_kind": "ExactCertificate" if ok else "Undetermined",
            "ideals": results,
            "note": "the embedded 4-chambars satisfy the six Sigma equations, so they sit in a subvariety of dimension at most six",
        }
    if args.action == "residual":
        ys = _load_jets(read_input(args))
        return ode4.ode_residual(ys, args.order)
    if args.action == "integrate":
        ini = _read_json_file(args.initial)
        if isinstance(ini, dict):
            state = _complex_list(ini["y"]) + _complex_list(ini["z"]) + _complex_list(ini["w"])
        else:
            state = _complex_list(ini)
        path_obj = _read_json_file(args.path)
        pts = path_obj["points"] if isinstance(path_obj, dict) else path_obj
        path = _complex_list(pts)
        tol = args.tol if args.tol is not None else 1e-10
        traj = ode4.integrate(state, path, tol, guard=args.guard)
        if args.csv:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(traj.to_csv())
        end = traj.endpoint()
        return {
            "certificate_kind": "Numerical",
            "tol": tol,
            "steps": len(traj.steps),
            "rejected_steps": traj.rejected,
            "endpoint": {"x": path[-1], "state": [complex(c) for c in end]},
            "max_sigma_residual": traj.max_sigma_residual(),
            "trajectory": traj.to_dict(),
        }
    if args.action == "equalpair":
        return ode4.equal_pair_analysis(_load_chambar(args))
    raise InputError(f"unknown ode4 action {args.action!r}")


def _read_json_file(path):
    if not path:
        raise InputError("a JSON file path is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def cmd_homog(args):
    ch = _load_chambar(args)
    if args.action == "classify":
        return homogeneous.classify_homog2(ch)
    if args.action == "cone":
        out = []
        for X in ch.fields:
            tc = homogeneous.tangent_cone_data(X)
            rel = homogeneous.verify_euler_relations(X, tc.f, tc.h, tc.degree)
            out.append({"tangent_cone": tc.to_dict(), "relations": rel})
        return {"fields": out}
    if args.action == "loci":
        # generators of the colinearity locus with R next to those of the singular locus
        out = []
        for X in ch.fields:
            X0 = homogeneous._at_origin(X)
            R = core.VectorField.radial(X0.nvars, X0.base)
            out.append({"colinear_with_R": core.colinearity_locus(X0, R), "singular": X0.components})
        return {"fields": out}
    raise InputError(f"unknown homog action {args.action!r}")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", type=int, default=None, help="time order K_t or jet order")
    p.add_argument("--scalar", default=None, help="exact:m or approx")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--emit", default=None, help="also write the JSON report to this path")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--input", default=None, help="input JSON file (default: standard input)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="chambar", description="Barycentric tuples of vector fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="barycentric check of a chambar")
    p.add_argument("--spatial-order", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    for name, fn, text in (
        ("degree", cmd_degree, "t-degree of exact polynomial fields"),
        ("classify1d", cmd_classify1d, "shape of a 3- or 4-chambar on the line"),
        ("straight", cmd_straight, "straight flow / straight foliation test"),
        ("pfaff", cmd_pfaff, "annihilating 1-form and omega ^ d omega"),
        ("semirigid", cmd_semirigid, "analysis of a colinear triple"),
    ):
        sub.add_parser(name, parents=[common], help=text).set_defaults(func=fn)

    p = sub.add_parser("gen", parents=[common], help="generate a catalogued family")
    p.add_argument("family", choices=["constant", "rigid-root", "rigid", "translations", "polyfamily",
                                      "blowup", "exponential", "heisenberg", "homog2"])
    for opt in ("vectors", "a", "b", "lam", "coeffs", "alpha", "beta", "gamma", "basepoint"):
        p.add_argument(f"--{opt}", default=None, help="JSON value")
    p.add_argument("--field", default=None, help="Z<nu> or J<n> for rigid-root")
    p.add_argument("--m", type=int, default=None, help="order of the root of unity")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("linear", parents=[common], help="linear chambars")
    p.add_argument("action", choices=["verify", "heisenberg", "rank", "sample"])
    p.add_argument("--family", default="first")
    p.add_argument("--params", default=None, help="JSON object of family parameters")
    p.add_argument("--beta-form", default="printed", choices=["printed", "entries"])
    p.set_defaults(func=cmd_linear)

    p = sub.add_parser("diffeo", parents=[common], help="compatible diffeomorphisms")
    p.add_argument("action", choices=["kernel", "check", "ideal"])
    p.add_argument("--ops", default=None, help="comma list among S, T, T_k")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--degree", type=int, default=None, help="degree bound D (kernel) or K (ideal)")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--random", action="store_true", help="check a seeded random compatible map")
    p.set_defaults(func=cmd_diffeo)

    p = sub.add_parser("ode4", parents=[common], help="the 4-chambar ODE and its lifted field")
    p.add_argument("action", choices=["build", "verify", "residual", "integrate", "equalpair"])
    p.add_argument("--degree", type=int, default=None, help="cofactor degree bound")
    p.add_argument("--ideals", default=None, help="comma list, e.g. Sigma_12,Sigma1")
    p.add_argument("--initial", default=None)
    p.add_argument("--path", default=None)
    p.add_argument("--csv", default=None, help="also write the trajectory as CSV")
    p.add_argument("--guard", type=float, default=1e-8)
    p.set_defaults(func=cmd_ode4)

    p = sub.add_parser("homog", parents=[common], help="homogeneous planar fields")
    p.add_argument("action", choices=["classify", "cone", "loci"])
    p.set_defaults(func=cmd_homog)
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
        code = 0
    except InputError as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        code = 2
    except ChambarError as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("residual", "x", "delta"):
            if getattr(exc, attr, None) is not None:
                report[attr] = getattr(exc, attr)
        code = 3
    text = dumps(report)
    if code == 0 and _kind(to_jsonable(report)) in NEGATIVE:
        code = 1
    if args.emit:
        ode_traj = args.command == "ode4" and getattr(args, "action", "") == "integrate" and code == 0
        payload = dumps(report["trajectory"]) if ode_traj else text
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    stdout.write(text + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
