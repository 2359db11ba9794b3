"""Command-line interface: ``sympos {classify,certify,maslov,trace,verify}``.

Exit codes: 0 success or positive verdict, 1 negative verdict or failed
check, 2 usage or parse error, 3 non-symplectic input, 4 inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import constructions as C
from .core import (
    TOL_SYMP,
    MatrixParseError,
    NotSymplecticError,
    UnsupportedDimensionError,
    _half_dim,
    is_symplectic,
    parse_matrix,
    spectrum,
    symmetric_functions,
)
from .paths import (
    PATH_TOL_SYMP,
    TOL_SYM,
    RefinementLimitError,
    SampledPath,
    _as_times,
    _match,
    certify_positive,
    crossing_events,
    eigen_trajectories,
    maslov_index,
    path_from_json,
    path_to_json,
    phase_winding,
)
from .sampling import DEFAULT_SEED
from .strata import NormalFormError, boundary_defect, classify, project_conj2, tag_string
from .verify import LEMMA_IDS, UnknownLemmaError, report_to_json, run_all

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_NOT_SYMPLECTIC, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

CONSTRUCTIONS = ("gamma_k", "delta", "H", "G", "trace_growth", "simple_real", "rotation", "conj_flow")


class UsageError(ValueError):
    pass


def _clean(x):
    """JSON-safe copy: NaN and inf become ``None``."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _read_json(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, output):
    if output in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v) if any(c in v for c in ".eE") or v.strip() in ("inf", "nan") else int(v)
        except ValueError:
            raise UsageError(f"--param {k}: {v!r} is not a number") from None
    return out


def stratum_defect(m) -> float:
    """Signed distance-like defect: ``boundary_defect`` on Sp(4), ``1 - tr^2/4`` on Sp(2)."""
    m = np.asarray(m, dtype=float)
    if m.shape == (2, 2):
        tr = m[0, 0] + m[1, 1]
        return float(1.0 - 0.25 * tr * tr)
    return float(boundary_defect(m))


# ------------------------------------------------------------ constructions


def build_construction(name: str, params: dict, samples: int) -> SampledPath:
    """Named construction as a sampled path; unknown keys are rejected."""
    p = dict(params)

    def take(key, default):
        return p.pop(key, default)

    if name == "gamma_k":
        k = take("k", 2.0)
        path = C.gamma_k_path(k, take("r0", 0.0), take("r1", np.pi / 2), samples)
    elif name == "delta":
        spec = C.DeltaPathSpec(take("lam", 2.0), take("a", 0.6), take("b", 0.8), take("eps", 0.1))
        path = SampledPath.from_function(lambda s: C.delta_path(spec, _as_times(s)), 0.0, 1.0, samples)
    elif name == "H":
        path = C.homotopy_H_path(take("theta", 0.0), take("k", 2), take("l", 1), take("n", 5), samples)
    elif name == "G":
        path = C.homotopy_G_path(take("theta", 0.0), take("k", 2), take("l", 1), samples)
    elif name == "trace_growth":
        path = C.trace_growth_path(take("lam0", 2.0), int(take("legs", 3)), max(samples // 3, 5)).path
    elif name == "simple_real":
        beta = take("beta", 2.0)
        alpha = take("alpha", None)
        if alpha is None:
            if beta <= 1:
                raise ValueError("beta must exceed 1")
            B = np.diag([beta, 1.0 / beta])
            J = C.standard_j(1)
            path = SampledPath.from_function(
                lambda t: C.rotation(_as_times(t)) @ B, 0.0, C.TWO_PI, samples,
                generator=lambda t: np.broadcast_to(J, (_as_times(t).size, 2, 2)).copy(), is_loop=True,
            )
        else:
            path = C.simple_real_path(alpha, beta, samples)
    elif name == "rotation":
        path = C.rotation_loop(int(take("k", 1)), samples=samples, half_dim=int(take("n", 1)))
    elif name == "conj_flow":
        lam = take("lam", 2.0)
        a = take("a", 0.0)
        M = np.array([[a, take("b", 1.0)], [take("c", 1.0), -a]])
        path = C.conj_class_flow(np.diag([lam, 1.0 / lam]), M, take("T", 1.0), samples)
    else:
        raise UsageError(f"unknown construction {name!r}; known: {', '.join(CONSTRUCTIONS)}")
    if p:
        raise UsageError(f"unknown parameter(s) for {name}: {', '.join(sorted(p))}")
    return path


def _load_path(args) -> SampledPath:
    if getattr(args, "construction", None):
        return build_construction(args.construction, _params(args.param), args.samples)
    return path_from_json(_read_json(args.input), tol_symp=args.tol_symp)


# ----------------------------------------------------------------- commands


def cmd_classify(args) -> int:
    obj = _read_json(args.input)
    if isinstance(obj, dict):
        obj = obj.get("matrix", obj.get("m"))
    m = parse_matrix(obj)
    try:
        _half_dim(m)
    except UnsupportedDimensionError as exc:
        raise MatrixParseError(str(exc)) from exc
    ok, defect = is_symplectic(m, args.tol_symp)
    if not ok:
        raise NotSymplecticError(defect, args.tol_symp)
    tag = classify(m)
    spec = spectrum(m)
    if m.shape == (2, 2):
        sigma1, sigma2 = float(m[0, 0] + m[1, 1]), None
    else:
        sf = symmetric_functions(m)
        sigma1, sigma2 = sf.sigma1, sf.sigma2
    eig = []
    for c in spec.clusters:
        eig.append(
            {
                "re": c.value.real,
                "im": c.value.imag,
                "algebraic_multiplicity": c.algebraic_multiplicity,
                "geometric_multiplicity": c.geometric_multiplicity,
                "location": c.location,
                "splitting_number": c.krein_signature,
            }
        )
    out = {
        "tag": str(tag),
        "sigma1": sigma1,
        "sigma2": sigma2,
        "boundary_defect": stratum_defect(m),
        "symplectic_defect": defect,
        "eigenvalues": eig,
    }
    if hasattr(tag, "detail") and tag.detail:
        out["detail"] = tag.detail
    if hasattr(tag, "real_sign"):
        out["real_sign"] = tag.real_sign
    if m.shape == (2, 2):
        z = project_conj2(m).coordinate
        out["conj_coordinate"] = [z.real, z.imag] if isinstance(z, complex) else z
    _emit(json.dumps(_clean(out), indent=2), args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    path = _load_path(args)
    cert = certify_positive(path, delta_pd=args.tol_pd, tol_sym=args.tol_sym)
    _emit(json.dumps(_clean(cert.to_json(per_sample=not args.summary)), indent=2), args.output)
    return {"positive": EXIT_OK, "not_positive": EXIT_NEGATIVE}.get(cert.verdict, EXIT_INCONCLUSIVE)


def cmd_maslov(args) -> int:
    path = _load_path(args)
    if not path.is_loop:
        raise UsageError("the Maslov index needs a loop (is_loop with matching endpoints)")
    out = {"maslov": maslov_index(path), "winding": phase_winding(path)}
    _emit(json.dumps(out, indent=2), args.output)
    return EXIT_OK


def trace_rows(path: SampledPath, crossings: bool = True) -> tuple[list, list]:
    """Header and rows ``t, Re l_1..l_2n, Im l_1..l_2n, tag, defect``.

    Eigenvalues follow the nearest-neighbor continuation.  Crossing rows
    carry the tag ``crossing:FROM->TO`` (with the gate sign when known).
    """
    d = path.mats.shape[1]
    lam = eigen_trajectories(path.mats)
    header = ["t"] + [f"re{i + 1}" for i in range(d)] + [f"im{i + 1}" for i in range(d)] + ["tag", "defect"]
    rows = []
    for t, m, l in zip(path.times, path.mats, lam):
        rows.append([float(t)] + list(l.real) + list(l.imag) + [tag_string(m), stratum_defect(m)])
    if crossings:
        for ev in crossing_events(path):
            if ev.from_tag == ev.to_tag:
                continue
            i = int(np.searchsorted(path.times, ev.t_cross))
            prev = lam[max(i - 1, 0)]
            if path.can_evaluate:
                m = path.evaluate(ev.t_cross)[0]
                cur = eigen_trajectories(m[None])[0]
                perm, _ = _match(list(prev), list(cur))
                l = cur[list(perm)]
                defect = stratum_defect(m)
            else:
                l = np.full(d, np.nan + 1j * np.nan)
                defect = float("nan")
            gate = f"({ev.gate})" if ev.gate else ""
            tag = f"crossing:{ev.from_tag}->{ev.to_tag}{gate}"
            rows.append([float(ev.t_cross)] + list(l.real) + list(l.imag) + [tag, defect])
        rows.sort(key=lambda r: r[0])
    return header, rows


def cmd_trace(args) -> int:
    name = args.name or args.construction
    if not name:
        raise UsageError("trace needs a construction name")
    path = build_construction(name, _params(args.param), args.samples)
    if args.format == "json":
        obj = path_to_json(path, tags=True)
        obj["construction"] = name
        obj["crossings"] = [e.to_json() for e in crossing_events(path)]
        _emit(json.dumps(_clean(obj)), args.output)
        return EXIT_OK
    header, rows = trace_rows(path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    lemmas = list(LEMMA_IDS) if args.lemma == "all" else [args.lemma]
    agg = run_all({"seed": args.seed, "tol_scale": args.tol_scale, "lemmas": lemmas})
    text = json.dumps(_clean(report_to_json(agg)), indent=2)
    _emit(text, args.output)
    for r in agg["reports"]:
        bad = r.failures()
        status = "pass" if r.overall else f"FAIL ({len(bad)} check(s))"
        print(f"{r.lemma_id}: {status}", file=sys.stderr)
    return EXIT_OK if agg["overall"] else EXIT_NEGATIVE


# ------------------------------------------------------------------- parser


def _positive(kind):
    def conv(v):
        x = kind(v)
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {v}")
        return x

    return conv


def _samples(v):
    x = int(v)
    if x < 5:
        raise argparse.ArgumentTypeError("sample count must be at least 5")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input JSON file ('-' for stdin)")
    common.add_argument("--output", "-o", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    common.add_argument("--samples", type=_samples, default=400, help="samples for constructions (>= 5)")
    common.add_argument("--seed", type=lambda v: int(v, 0), default=DEFAULT_SEED, help="RNG seed")
    common.add_argument("--tol-symp", type=_positive(float), default=None,
                        help=f"symplecticity tolerance (default {TOL_SYMP:g} for matrices, {PATH_TOL_SYMP:g} for paths)")
    common.add_argument("--tol-pd", type=_positive(float), default=None,
                        help="positive-definiteness margin delta_pd (default 1e-8 (1 + max |P|))")
    common.add_argument("--tol-sym", type=_positive(float), default=TOL_SYM, help="symmetry tolerance for P")
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="construction parameter, repeatable (e.g. --param k=2)")

    p = argparse.ArgumentParser(prog="sympos", description="Positive paths in Sp(2) and Sp(4).")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("classify", parents=[common], help="stratum, spectrum and splitting numbers of a matrix")
    s.set_defaults(func=cmd_classify)
    cons = f"construction name ({', '.join(CONSTRUCTIONS)})"
    s = sub.add_parser("certify", parents=[common], help="positivity certificate of a path (exit 0 iff positive)")
    s.add_argument("--construction", "-c", help=cons)
    s.add_argument("--summary", action="store_true", help="omit per-sample data")
    s.set_defaults(func=cmd_certify)
    s = sub.add_parser("maslov", parents=[common], help="Maslov index of a loop")
    s.add_argument("--construction", "-c", help=cons)
    s.set_defaults(func=cmd_maslov)
    s = sub.add_parser("trace", parents=[common], help="eigenvalue trajectory of a construction (CSV or JSON)")
    s.add_argument("name", nargs="?", help=cons)
    s.add_argument("--construction", "-c", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_trace, format="csv")
    s = sub.add_parser("verify", parents=[common], help="run reproduction checks")
    s.add_argument("lemma", help=f"lemma id or 'all' ({', '.join(LEMMA_IDS)})")
    s.add_argument("--tol-scale", type=_positive(float), default=1.0,
                   help="multiply tolerance-bound tolerances (sensitivity mode)")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.tol_symp is None:
        args.tol_symp = TOL_SYMP if args.command == "classify" else PATH_TOL_SYMP
    if args.command == "verify" and args.lemma != "all" and args.lemma not in LEMMA_IDS:
        print(f"unknown lemma id {args.lemma!r}; known ids: {', '.join(LEMMA_IDS)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except NotSymplecticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SYMPLECTIC
    except (MatrixParseError, UsageError, UnknownLemmaError, UnsupportedDimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RefinementLimitError, NormalFormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
