"""Command-line interface.

Exit codes: 0 on success or pass, 1 when a checked property fails (a witness
is printed), 2 on input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import cubes as cube_mod
from .decompose import u2_decompose, u2_inverse_certificate
from .gowers import gowers_norm_exact, gowers_norm_sampled
from .groups import FiniteAbelianGroup, GroupFunction, fourier_transform, lp_norm
from .heisenberg import heis_table, heis_sequence
from .moments import (EXACT_CAP, MomentSpec, all_simple_specs, cayley_edge_count_bruteforce,
                      cayley_hypergraph_density, convergence_report, example1_function, example1_limit,
                      example2_function, example2_limit, moment_exact, moment_sampled, report_to_csv,
                      sample_Dn)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    seed: int = 0
    samples: int = 100_000
    tol: float = 1e-9
    out: str | None = None
    workers: int = 1


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _clean(obj: Any) -> Any:
    """Round floats to 12 significant digits and split complex numbers."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(float(obj)))
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(fmt(obj.real)), float(fmt(obj.imag))]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2)


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def _load_function(path: str) -> GroupFunction:
    data = _load_json(path)
    try:
        return GroupFunction.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid function file {path}: {exc}")


def _parse_group(text: str) -> FiniteAbelianGroup:
    try:
        return FiniteAbelianGroup(tuple(int(x) for x in text.split(",") if x.strip()))
    except ValueError as exc:
        raise InputError(f"invalid group {text!r}: {exc}")


def _emit(cfg: JobConfig, text: str, name: str | None = None):
    """Print to stdout, or write to --out (a file, or a directory when ``name`` is set)."""
    if cfg.out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out = Path(cfg.out)
    if name is not None:
        out.mkdir(parents=True, exist_ok=True)
        out = out / name
    out.write_text(text if text.endswith("\n") else text + "\n")


# -- commands ----------------------------------------------------------------------

def cmd_norm(args, cfg: JobConfig) -> int:
    f = _load_function(args.file)
    if args.k < 1:
        raise InputError("k must be >= 1")
    rows = []
    for k in range(1, args.k + 1):
        lp = lp_norm(f, 2 ** (k - 1))
        if args.sampled:
            est = gowers_norm_sampled(f, k, cfg.samples, cfg.seed, cfg.workers)
            value, stderr = est.estimate, est.stderr
        else:
            value, stderr = gowers_norm_exact(f, k), 0.0
        rows.append({"k": k, "u_k": value, "stderr": stderr, "lp_bound": lp,
                     "bound_holds": bool(value <= lp + cfg.tol + 4 * stderr)})
    _emit(cfg, dumps({"mode": "sampled" if args.sampled else "exact", "norms": rows}))
    return EXIT_OK if all(r["bound_holds"] for r in rows) else EXIT_FAIL


def cmd_fourier(args, cfg: JobConfig) -> int:
    f = _load_function(args.file)
    lam = fourier_transform(f)
    coeffs = [{"freq": list(c), "coeff": complex(v)} for c, v in zip(f.group.elements(), lam)
              if abs(v) > args.min_abs]
    _emit(cfg, dumps({"group": list(f.group.cyclic_factors), "coefficients": coeffs}))
    return EXIT_OK


def _load_spec(path: str) -> MomentSpec:
    data = _load_json(path)
    try:
        return MomentSpec.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid moment spec {path}: {exc}")


def cmd_moments(args, cfg: JobConfig) -> int:
    f = _load_function(args.file)
    spec = _load_spec(args.spec)
    sampled = args.sampled
    note = None
    if not sampled and f.group.order ** spec.n > EXACT_CAP:
        sampled = True
        note = f"|A|^n exceeds {EXACT_CAP}; switched to sampling"
        print(f"warning: {note}", file=sys.stderr)
    if sampled:
        value, stderr = moment_sampled(f, spec, cfg.samples, cfg.seed, cfg.workers)
    else:
        value, stderr = moment_exact(f, spec), 0.0
    out = {"spec": spec.label(), "mode": "sampled" if sampled else "exact", "value": value, "stderr": stderr}
    if note:
        out["note"] = note
    _emit(cfg, dumps(out))
    return EXIT_OK


def cmd_dn_sample(args, cfg: JobConfig) -> int:
    f = _load_function(args.file)
    dist = sample_Dn(f, args.n, cfg.samples, cfg.seed, cfg.workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = []
    for s in dist.subsets:
        name = "x" + "".join(str(i) for i in sorted(s))
        header += [name + "_re", name + "_im"]
    writer.writerow(header)
    for row in dist.samples:
        writer.writerow([fmt(v) for z in row for v in (z.real, z.imag)])
    _emit(cfg, buf.getvalue())
    return EXIT_OK


def cmd_cayley(args, cfg: JobConfig) -> int:
    group = _parse_group(args.group)
    try:
        subset = [int(x) for x in args.subset.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"invalid subset {args.subset!r}")
    if any(not 0 <= s < group.order for s in subset):
        raise InputError("subset indices out of range")
    density = cayley_hypergraph_density(group, subset, args.k)
    out = {"density": density}
    if group.order ** args.k <= 10 ** 6:
        out["counted"] = cayley_edge_count_bruteforce(group, subset, args.k) / group.order ** args.k
    if group.order ** args.k <= EXACT_CAP:
        out["moment"] = moment_exact(GroupFunction.indicator(group, [group.element(s) for s in subset]),
                                     MomentSpec.full_edge(args.k)).real
    _emit(cfg, dumps(out))
    return EXIT_OK


def cmd_converge(args, cfg: JobConfig) -> int:
    if args.specs:
        raw = _load_json(args.specs)
        try:
            specs = {f"s{i}": MomentSpec.from_json(d) for i, d in enumerate(raw)}
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid spec list: {exc}")
    elif args.example == 1:
        specs = {s.label(): s for s in all_simple_specs(2)}
    else:
        specs = {s.label(): s for s in (MomentSpec.cube(3), MomentSpec.triangle())}
    if args.example == 1:
        sequence, limit = example1_function, example1_limit()
    else:
        sequence, limit = example2_function, example2_limit()
    sampled = True if args.sampled else None
    rows = convergence_report(sequence, args.m, specs, limit, cfg.samples, cfg.seed,
                              sampled=sampled, workers=cfg.workers)
    _emit(cfg, report_to_csv(rows))
    return EXIT_OK


def cmd_decompose(args, cfg: JobConfig) -> int:
    f = _load_function(args.file)
    if not args.eps > 0:
        raise InputError("eps must be positive")
    try:
        res = u2_decompose(f, args.eps)
    except ValueError as exc:
        raise InputError(str(exc))
    payload = {"f_s": res.f_s.to_json(), "f_e": res.f_e.to_json(), "f_r": res.f_r.to_json(),
               "certificate": res.certificate.to_json(), "threshold": res.threshold,
               "diagnostics": res.diagnostics}
    if cfg.out is not None:
        for name in ("f_s", "f_e", "f_r"):
            _emit(cfg, dumps(payload[name]), f"{name}.json")
        _emit(cfg, dumps({k: payload[k] for k in ("certificate", "threshold", "diagnostics")}),
              "diagnostics.json")
    else:
        _emit(cfg, dumps(payload))
    ok = res.diagnostics["u2_f_r"] <= res.diagnostics["tolerance"] + cfg.tol
    return EXIT_OK if ok else EXIT_FAIL


def cmd_inverse(args, cfg: JobConfig) -> int:
    f = _load_function(args.file)
    if not args.eps > 0:
        raise InputError("eps must be positive")
    try:
        chi, corr = u2_inverse_certificate(f, args.eps)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        _emit(cfg, dumps({"refused": True, "reason": str(exc)}))
        return EXIT_FAIL
    _emit(cfg, dumps({"refused": False, "character": list(chi.freq), "correlation": corr,
                      "abs_correlation": abs(corr), "eps_squared": args.eps ** 2}))
    return EXIT_OK


def _load_space(path: str) -> cube_mod.Cubespace:
    data = _load_json(path)
    try:
        return cube_mod.Cubespace.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid cubespace file {path}: {exc}")


def cmd_check_nilspace(args, cfg: JobConfig) -> int:
    space = _load_space(args.file)
    try:
        report = cube_mod.check_nilspace_axioms(space, args.n_max)
    except ValueError as exc:
        raise InputError(str(exc))
    out = {"passed": report.passed,
           "checks": [{"axiom": c.name, "passed": c.passed, "witness": c.witness} for c in report.checks]}
    ok = report.passed
    if args.k is not None:
        try:
            witness = cube_mod.k_step_witness(space, args.k)
        except ValueError as exc:
            raise InputError(str(exc))
        out["k_step"] = {"k": args.k, "passed": witness is None, "witness": witness}
        ok = ok and witness is None
    _emit(cfg, dumps(out))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_cocycle(args, cfg: JobConfig) -> int:
    data = _load_json(args.file)
    try:
        space = cube_mod.Cubespace.from_json(data["space"])
        k = int(data["k"])
        target = FiniteAbelianGroup.from_json(data["target"]) if data.get("target") else None
        if k not in space.cubes:
            raise ValueError(f"cubespace has no cubes of dimension {k}")
        if target is None:
            values = np.array([complex(re, im) for re, im in data["values"]])
        else:
            values = np.array(data["values"], dtype=np.int64)
        if len(values) != len(space.cubes[k]):
            raise ValueError("one value per cube is required")
        rho = cube_mod.Cocycle(k, space.cubes[k], values, target, cfg.tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid cocycle file: {exc}")
    report = cube_mod.check_cocycle(rho)
    _emit(cfg, dumps({"passed": report.passed, "sign_law": report.sign_law,
                      "concatenation_law": report.concatenation_law, "witness": report.witness}))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_heisenberg(args, cfg: JobConfig) -> int:
    if not 1 < args.t < args.m:
        raise InputError(f"need 1 < t < m, got t={args.t}, m={args.m}")
    f = heis_sequence(args.m, args.t)
    table = heis_table(args.m, args.t)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "pipeline_re", "pipeline_im", "direct_re", "direct_im", "abs_diff"])
    for k, p, d, diff in table:
        writer.writerow([k, fmt(p.real), fmt(p.imag), fmt(d.real), fmt(d.imag), fmt(diff)])
    u3 = gowers_norm_exact(f, 3)
    max_diff = max(row[3] for row in table)
    summary = {"m": args.m, "t": args.t, "u3": u3, "max_abs_diff": max_diff}
    if cfg.out is not None:
        _emit(cfg, dumps(f.to_json()), "function.json")
        _emit(cfg, buf.getvalue(), "comparison.csv")
        _emit(cfg, dumps(summary), "summary.json")
        sys.stdout.write(dumps(summary) + "\n")
    else:
        sys.stdout.write(buf.getvalue())
        sys.stdout.write(dumps(summary) + "\n")
    return EXIT_OK if max_diff <= 1e-12 else EXIT_FAIL


def cmd_morphisms(args, cfg: JobConfig) -> int:
    try:
        morphs = cube_mod.enumerate_cube_morphisms(args.n, args.m)
    except ValueError as exc:
        raise InputError(str(exc))
    lines = [str(p) for p in morphs]
    _emit(cfg, "\n".join([f"# {len(morphs)} morphisms {{0,1}}^{args.n} -> {{0,1}}^{args.m}"] + lines))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for sampled paths")
    common.add_argument("--samples", type=int, default=100_000, help="sample count for sampled paths")
    common.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
    common.add_argument("--out", default=None, help="output file (or directory for multi-file commands)")
    common.add_argument("--workers", type=int, default=1, help="worker threads for sampling")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="sampled", action="store_false", help="exact evaluation (default)")
    mode.add_argument("--sampled", dest="sampled", action="store_true", help="Monte-Carlo evaluation")
    common.set_defaults(sampled=False)

    parser = argparse.ArgumentParser(prog="hofa", description="Gowers norms, cube structures and limits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("norm", cmd_norm, "U_1..U_k norms of a function file")
    p.add_argument("file")
    p.add_argument("-k", type=int, default=3)

    p = add("fourier", cmd_fourier, "Fourier coefficients of a function file")
    p.add_argument("file")
    p.add_argument("--min-abs", type=float, default=0.0)

    p = add("moments", cmd_moments, "a configuration moment of a function")
    p.add_argument("file")
    p.add_argument("--spec", required=True)

    p = add("dn-sample", cmd_dn_sample, "samples from D_n(f) as CSV")
    p.add_argument("file")
    p.add_argument("-n", type=int, default=3)

    p = add("cayley", cmd_cayley, "Cayley hypergraph edge density")
    p.add_argument("--group", required=True, help="comma-separated cyclic orders, e.g. 12 or 4,3")
    p.add_argument("--subset", required=True, help="comma-separated element indices")
    p.add_argument("-k", type=int, default=3)

    p = add("converge", cmd_converge, "convergence table for the example sequences")
    p.add_argument("--example", type=int, choices=(1, 2), required=True)
    p.add_argument("--m", type=int, nargs="*", default=[])
    p.add_argument("--specs", default=None, help="JSON list of moment specs")

    p = add("decompose", cmd_decompose, "U_2 regularity decomposition")
    p.add_argument("file")
    p.add_argument("--eps", type=float, required=True)

    p = add("inverse", cmd_inverse, "U_2 inverse certificate")
    p.add_argument("file")
    p.add_argument("--eps", type=float, required=True)

    p = add("check-nilspace", cmd_check_nilspace, "nilspace axioms for a cubespace file")
    p.add_argument("file")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("-k", type=int, default=None, help="also test k-step uniqueness")

    p = add("check-cocycle", cmd_check_cocycle, "cocycle laws for a cocycle file")
    p.add_argument("file")

    p = add("heisenberg", cmd_heisenberg, "nilmanifold sequence e(k^2 t / m^2)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)

    p = add("morphisms", cmd_morphisms, "list cube morphisms {0,1}^n -> {0,1}^m")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    cfg = JobConfig(args.command, args.seed, args.samples, args.tol, args.out, args.workers)
    if cfg.samples < 1:
        print("error: --samples must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
