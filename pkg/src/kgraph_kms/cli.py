"""Command-line front end: ``kgraph-kms <subcommand> <graph> [options]``.

``<graph>`` is a JSON graph file or the name of a bundled fixture.  Exit
status is 0 on success, 1 for invalid graph input, 2 when a precondition
fails (wrong temperature, reducible matrices, bad vectors) and 3 when a
result contradicts a guaranteed property.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path as FSPath

import numpy as np

from . import fixtures, kms, repsim, spectral
from .errors import InvariantBreach, PreconditionError, ValidationError
from .kgraph import KGraph, graph_hash, load_graph

SUBCOMMANDS = ("validate", "spectra", "kms", "simplex", "critical", "ground", "verify", "report")


def _tolerance() -> float:
    raw = os.environ.get("KGK_TOL")
    if raw is None:
        return kms.STRUCT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise PreconditionError(f"KGK_TOL must be a number, got {raw!r}") from None
    if not (tol > 0 and math.isfinite(tol)):
        raise PreconditionError(f"KGK_TOL must be positive, got {raw!r}")
    return tol


def _clean(obj):
    """Round floats to 12 significant digits and make the tree JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    if obj is kms.INF:
        return "inf"
    return obj


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def render(report: dict, fmt: str) -> str:
    report = _clean(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = list(_flatten(report))
    if fmt == "csv":
        import csv
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in rows:
            w.writerow([k, json.dumps(v) if isinstance(v, list) else v])
        return buf.getvalue()
    lines = []
    if "summary" in report:
        lines.append(report["summary"])
    lines.extend(f"{k}: {json.dumps(v) if isinstance(v, (list, bool)) or v is None else v}"
                 for k, v in rows if k != "summary")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def load_input(arg: str) -> KGraph:
    p = FSPath(arg)
    if not p.exists() and arg in fixtures.BUNDLED:
        return fixtures.load(arg)
    if not p.exists():
        raise ValidationError(f"no such file or bundled fixture: {arg}")
    return load_graph(p)


def parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise PreconditionError(f"{what} must be comma-separated numbers, got {text!r}") from None


def parse_beta(text):
    if text is None:
        return None
    if text in ("critical", "inf"):
        return kms.INF if text == "inf" else "critical"
    try:
        beta = float(text)
    except ValueError:
        raise PreconditionError(f"--beta must be a number, 'critical' or 'inf', got {text!r}") from None
    if not (beta >= 0 and math.isfinite(beta)):
        raise PreconditionError(f"--beta must be finite and >= 0, got {text!r}")
    return beta


def parse_dynamics(g: KGraph, text: str) -> kms.Dynamics:
    if text in (None, "preferred"):
        return kms.Dynamics.preferred_for(g)
    r = parse_floats(text, "--r")
    if len(r) != g.k:
        raise PreconditionError(f"--r needs {g.k} entries, got {len(r)}")
    pref = kms.Dynamics.preferred_for(g).r if all(x > 1 for x in spectral.spectral_radii(g)) else None
    return kms.Dynamics(tuple(r), preferred=pref is not None and np.allclose(r, pref, atol=kms.TEMP_TOL))


def parse_degree(g: KGraph, text: str | None, default: int) -> tuple[int, ...]:
    if text is None:
        return (default,) * g.k
    try:
        d = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise PreconditionError(f"degree must be comma-separated ints, got {text!r}") from None
    if len(d) == 1:
        d = d * g.k
    if len(d) != g.k or min(d) < 0:
        raise PreconditionError(f"degree needs {g.k} non-negative entries, got {text!r}")
    return d


def parse_eps(g: KGraph, text: str | None):
    """Returns ``(vector, explicit)``; symbolic choices are scaled later."""
    n = len(g.vertices)
    if text in (None, "uniform"):
        return np.full(n, 1.0 / n), False
    if text.startswith("vertex:"):
        v = text.split(":", 1)[1]
        if v not in g.vertex_index:
            raise PreconditionError(f"unknown vertex {v!r}")
        e = np.zeros(n)
        e[g.vertex_index[v]] = 1.0
        return e, False
    e = np.array(parse_floats(text, "--eps"))
    if len(e) != n:
        raise PreconditionError(f"--eps needs {n} entries, got {len(e)}")
    return e, True


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kgraph-kms", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("graph", help="graph JSON file or bundled fixture name")
    ap.add_argument("--beta", help="inverse temperature: a number, 'critical' or 'inf'")
    ap.add_argument("--r", default="preferred", help="'preferred' or r_1,...,r_k")
    ap.add_argument("--eps", help="'uniform', 'vertex:ID' or e_1,...,e_n")
    ap.add_argument("--depth", help="degree bound for verification sweeps (d or d_1,...,d_k)")
    ap.add_argument("--N", dest="cutoff", help="truncation cutoff for the path representation")
    ap.add_argument("--format", default="text", choices=("json", "csv", "text"))
    ap.add_argument("--rescale", action="store_true", help="divide an explicit eps by eps . y")
    ap.add_argument("--max-denominator", type=int, default=10**6)
    return ap


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_validate(g, args, tol):
    cube = "ok" if g.k >= 3 else "n/a"
    nv = len(g.vertices)
    summary = (f"k={g.k}, {nv} {'vertex' if nv == 1 else 'vertices'}, {len(g.edges)} edges, "
               f"{len(g.squares)} squares, cube: {cube}")
    spectral.check_commuting(g)
    return {"summary": summary, "k": g.k, "vertices": nv, "edges": len(g.edges),
            "squares": len(g.squares), "cube": cube, "commuting": True}


def cmd_spectra(g, args, tol):
    out = {"matrices": spectral.spectral_report(g)}
    try:
        sd = spectral.common_pf_eigenvector(g)
    except PreconditionError as exc:
        out.update({"coordinatewise_irreducible": False, "x": None, "rho": None,
                    "independence": None, "note": str(exc)})
        return out
    out.update({"coordinatewise_irreducible": True, "rho": list(sd.rho), "x": sd.x,
                "residuals": list(sd.residuals), "log_rho": sd.log_rho,
                "independence": kms.independence_dict(
                    kms.rational_independence(sd.log_rho, args.max_denominator))})
    if max(sd.residuals) > tol:
        raise InvariantBreach(f"common eigenvector residuals {sd.residuals} exceed {tol}")
    return out


def _numeric_beta(args, default=None):
    beta = parse_beta(args.beta)
    if beta is None:
        beta = default
    if beta is None:
        raise PreconditionError("--beta is required")
    if beta == "critical":
        raise PreconditionError("the simplex construction needs a subcritical beta; "
                                "use the 'critical' subcommand for beta_c")
    if beta is kms.INF:
        raise PreconditionError("beta = inf is handled by the 'ground' subcommand")
    return beta


def _state_from_args(g, dyn, beta, args, tol):
    eps, explicit = parse_eps(g, args.eps)
    y = kms.y_vector(g, dyn, beta)
    if not explicit:
        eps = eps / float(eps @ y)
    st = kms.kms_state_from_eps(g, dyn, beta, eps, rescale=args.rescale, tol=tol)
    return st, y


def _temperature(g, dyn, beta):
    rep = kms.classify_temperature(g, dyn, beta)
    return {"regime": rep.regime.value, "beta_c": list(rep.beta_c), "gaps": list(rep.gaps)}


def cmd_kms(g, args, tol):
    dyn = parse_dynamics(g, args.r)
    beta = _numeric_beta(args)
    temp = _temperature(g, dyn, beta)
    st, y = _state_from_args(g, dyn, beta, args, tol)
    depth = parse_degree(g, args.depth, 2)
    rep = kms.state_report(st, dyn, depth)
    rep["residuals"]["gamma_invariance"] = kms.gamma_invariance_defect(st, depth)
    rep["residuals"]["normalization"] = abs(float(st.m.sum()) - float(st.eps @ y))
    rep["residuals"]["round_trip"] = float(np.max(np.abs(kms.eps_from_state(g, dyn, beta, st.m) - st.eps)))
    if rep["residuals"]["kms"] > tol:
        raise InvariantBreach(f"KMS residual {rep['residuals']['kms']} exceeds {tol}")
    return {"temperature": temp, "y": y, "depth": list(depth), "state": rep,
            "preferred": dyn.preferred}


def cmd_simplex(g, args, tol):
    dyn = parse_dynamics(g, args.r)
    beta = _numeric_beta(args, default=2.0)
    out = kms.simplex_summary(g, dyn, beta)
    depth = parse_degree(g, args.depth, 2)
    for pt, eps in zip(out["extreme_points"], kms.extreme_eps(g, dyn, beta)):
        st = kms.kms_state_from_eps(g, dyn, beta, eps, tol=tol)
        pt["kms_residual"] = kms.verify_kms_condition(st, dyn, beta, depth)
    out["temperature"] = _temperature(g, dyn, beta)
    out["depth"] = list(depth)
    return out


def cmd_critical(g, args, tol):
    sd = spectral.common_pf_eigenvector(g)
    if args.r in (None, "preferred"):
        dyn = kms.Dynamics.preferred_for(g)
    else:
        dyn = parse_dynamics(g, args.r)
    beta_cs = np.log(sd.rho) / np.asarray(dyn.r)
    if np.ptp(beta_cs) > kms.TEMP_TOL:
        raise PreconditionError(
            f"critical temperatures differ across colours ({beta_cs.tolist()}); no single beta "
            "makes the state factor through the Cuntz-Krieger algebra, so only a common "
            "value is accepted")
    beta_c = float(beta_cs.mean())
    st = kms.kms1_state(g, args.max_denominator)
    depth = parse_degree(g, args.depth, 2)
    pref = kms.Dynamics.preferred_for(g)
    rep = kms.state_report(st, pref, depth)
    rep["residuals"]["eps_zero"] = float(np.max(np.abs(st.eps)))
    return {"beta_c": beta_c, "beta_c_preferred": 1.0, "state": rep,
            "unique": st.unique,
            "uniqueness": "unique" if st.unique else "existence only",
            "depth": list(depth)}


def cmd_ground(g, args, tol):
    dyn = parse_dynamics(g, args.r)
    eps, explicit = parse_eps(g, args.eps)
    if explicit and args.rescale and eps.sum() > 0:
        eps = eps / eps.sum()
    st = kms.ground_state(g, dyn, eps)
    depth = parse_degree(g, args.depth, 2)
    check = repsim.ground_condition_check(st, dyn, depth)
    betas = (10.0, 20.0, 40.0)
    limit = kms.ground_limit(g, dyn, eps, betas)
    out = {"state": kms.state_report(st, dyn, depth), "ground_check": check,
           "limit": {"betas": list(betas), "errors": limit, "tol": kms.LIMIT_TOL,
                     "converged": limit[-1] < kms.LIMIT_TOL},
           "depth": list(depth)}
    if not check["passes"]:
        raise InvariantBreach(f"ground state check failed: {check}")
    return out


def cmd_verify(g, args, tol):
    depth = parse_degree(g, args.depth, 1)
    N = parse_degree(g, args.cutoff, 3) if args.cutoff else tuple(3 * d if d else 1 for d in depth)
    sp = repsim.build_space(g, N)
    out = {"N": list(N), "depth": list(depth), "basis_size": sp.size}
    out["relations"] = repsim.verify_relations(sp, depth)
    ie = {}
    for K in ([1], [2], [1, 2]) if g.k == 2 else [[i] for i in range(1, g.k + 1)]:
        for v in g.vertices:
            dev, proj = repsim.inclusion_exclusion_check(sp, v, K)
            ie[f"{v}:{','.join(map(str, K))}"] = {"deviation": dev, "projection": proj}
    out["inclusion_exclusion"] = ie
    exact = [out["relations"][k] for k in ("T1", "T2", "T3", "T4", "T5", "orthogonal_ranges",
                                           "CK_defect_vs_prediction")]
    exact += [x["deviation"] for x in ie.values()]
    if any(x != 0 for x in exact):
        raise InvariantBreach("an interior operator identity is not exact")
    if args.beta is not None:
        dyn = parse_dynamics(g, args.r)
        beta = _numeric_beta(args)
        st, _ = _state_from_args(g, dyn, beta, args, tol)
        chk = repsim.kms_residual_operator_level(sp, st, dyn, beta, depth)
        out["kms"] = {"closed_form_residual": kms.verify_kms_condition(st, dyn, beta, depth),
                      "operator_residual": chk.residual, "tail_bound": chk.tail_bound,
                      "bound": chk.bound, "telescoping": chk.telescoping,
                      "cs_estimate": chk.cs_estimate, "cs_equal_norms": chk.cs_equal_norms,
                      "interior_size": chk.interior_size, "ok": chk.ok}
    return out


def cmd_report(g, args, tol):
    out = {"validate": cmd_validate(g, args, tol), "spectra": cmd_spectra(g, args, tol)}
    if not out["spectra"]["coordinatewise_irreducible"]:
        return out
    try:
        kms.Dynamics.preferred_for(g)
    except PreconditionError as exc:
        out["note"] = str(exc)
        preferred = False
    else:
        preferred = True
    if preferred or args.r not in (None, "preferred"):
        if args.beta is None:
            args.beta = "2"
        out["simplex"] = cmd_simplex(g, args, tol)
        out["kms"] = cmd_kms(g, args, tol)
        out["ground"] = cmd_ground(g, args, tol)
    if preferred:
        out["critical"] = cmd_critical(g, args, tol)
    if args.depth is None:
        args.depth = "1"
    args.beta = None
    out["verify"] = cmd_verify(g, args, tol)
    return out


COMMANDS = {"validate": cmd_validate, "spectra": cmd_spectra, "kms": cmd_kms,
            "simplex": cmd_simplex, "critical": cmd_critical, "ground": cmd_ground,
            "verify": cmd_verify, "report": cmd_report}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        tol = _tolerance()
        g = load_input(args.graph)
        report = COMMANDS[args.subcommand](g, args, tol)
        report["graph_hash"] = graph_hash(g)
        report["tolerances"] = {"structural": tol, "limit": kms.LIMIT_TOL,
                                "temperature": kms.TEMP_TOL, "witness": kms.WITNESS_TOL,
                                "power_iteration": spectral.DEFAULT_TOL}
        report["subcommand"] = args.subcommand
        if args.format == "csv" and args.subcommand == "spectra":
            stdout.write("".join(spectral.matrix_csv(g, A) for A in spectral.vertex_matrices(g)))
        else:
            stdout.write(render(report, args.format))
        return 0
    except ValidationError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except (PreconditionError, ValueError) as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    except InvariantBreach as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
