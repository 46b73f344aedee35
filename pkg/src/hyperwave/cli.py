"""``hyperwave`` command line: kernel, solve, verify and compare.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 numeric domain error. Floats are written with 17 significant digits and
rows are emitted in a fixed order, so identical arguments give identical
bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, cauchy, checks, geometry as geo, kernels as kn
from .errors import DomainError, HyperwaveError, ParameterError

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command-line input; the message names the offending flag."""


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str = __version__
    tolerance_report: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _num(x) -> str:
    return f"{float(x):.17g}"


def _jsonable(v):
    if isinstance(v, complex):
        return geo.format_complex(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def thread_count() -> int:
    raw = os.environ.get("HYPERWAVE_THREADS", "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise UsageError(f"HYPERWAVE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def parallel_map(fn, items):
    """Ordered map over ``items`` with at most ``HYPERWAVE_THREADS`` workers."""
    items = list(items)
    n = min(thread_count(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex_arg(flag):
    def parse(text):
        try:
            return geo.parse_complex(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag}: cannot parse complex value {text!r}")
    return parse


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _require(args, *flags):
    for f in flags:
        dest = {"--lambda": "lam"}.get(f, f.lstrip("-").replace("-", "_"))
        if getattr(args, dest, None) is None:
            raise UsageError(f"{f} is required for --model {args.model}")


def _linspace_spec(text: str, flag: str):
    """``a:b:n`` -> numpy linspace."""
    try:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise ValueError
        return np.linspace(float(a), float(b), n)
    except ValueError:
        raise UsageError(f"{flag}: expected 'start:stop:count', got {text!r}")


def _grid_points(args) -> list:
    if args.model == "morse":
        if args.grid:
            return [float(v) for v in _linspace_spec(args.grid, "--grid")]
        _require(args, "--y")
        return [args.y]
    if args.grid:
        parts = args.grid.split(",")
        if len(parts) != 2:
            raise UsageError("--grid: expected 'x0:x1:nx,y0:y1:ny'")
        xs = _linspace_spec(parts[0], "--grid")
        ys = _linspace_spec(parts[1], "--grid")
        pts = [complex(x, y) for x in xs for y in ys]
        if args.model == "disc":
            return [p for p in pts if abs(p) < 1 - geo.BOUNDARY_GUARD]
        return [p for p in pts if p.imag > geo.BOUNDARY_GUARD]
    flag = "--w" if args.model == "disc" else "--z"
    _require(args, flag)
    return [args.w if args.model == "disc" else args.z]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def emit(args, columns, rows, manifest: RunManifest):
    """Write rows as CSV/JSON to ``--out`` (plus manifest sidecar) or stdout."""
    if args.format == "json":
        payload = {"columns": columns,
                   "rows": [{c: _jsonable(v) for c, v in zip(columns, r)} for r in rows]}
        if not args.out:
            payload["manifest"] = asdict(manifest)
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_num(v) if isinstance(v, float) else v for v in r])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(manifest.to_json() + "\n")
    else:
        sys.stdout.write(text)
        if args.format == "csv":
            sys.stderr.write(json.dumps(asdict(manifest), sort_keys=True) + "\n")


def _params(args) -> dict:
    skip = {"func", "out", "format"}
    return {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_kernel(args) -> int:
    ts = args.t
    if ts is None:
        raise UsageError("--t is required")
    columns = ["t", "source", "target", "k", "form", "re", "im", "inside_cone"]
    if args.model == "morse":
        _require(args, "--y", "--yp", "--lambda")
        k = geo.MagneticParameter(args.k)

        def row(t):
            v = kn.morse_kernel(kn.MorseQuery(t, args.y, args.yp, args.lam, k))
            return [t, _num(args.yp), _num(args.y), args.k, "closed", v.value.real,
                    v.value.imag, int(v.inside_cone)]
    else:
        if args.model == "disc":
            _require(args, "--w", "--wp")
            src, tgt, fn = args.wp, args.w, kn.disc_kernel
        else:
            _require(args, "--z", "--zp")
            src, tgt, fn = args.zp, args.z, kn.halfplane_kernel

        def row(t):
            v = fn(kn.KernelQuery(t, src, tgt, args.k, args.form))
            return [t, geo.format_complex(src), geo.format_complex(tgt), args.k, args.form,
                    v.value.real, v.value.imag, int(v.inside_cone)]
    rows = parallel_map(row, ts)
    emit(args, columns, rows, RunManifest("kernel", _params(args)))
    return EXIT_OK


def _bump_for(args):
    model = args.model
    if args.bump_center is None:
        center = {"disc": 0j, "halfplane": 1j, "morse": 1.0}[model]
    else:
        center = args.bump_center if model != "morse" else args.bump_center.real
    return cauchy.bump(model, center, args.bump_radius, args.amplitude)


def cmd_solve(args) -> int:
    if args.t is None:
        raise UsageError("--t is required")
    u1 = _bump_for(args)
    cfg = cauchy.QuadratureConfig(args.radial_nodes, args.angular_nodes,
                                  tolerance=args.tolerance)
    points = _grid_points(args)
    if args.model == "morse":
        _require(args, "--lambda")

        def solve(job):
            t, p = job
            return cauchy.solve_morse(t, p, u1, args.lam, args.k, cfg)
        fmt = _num
    else:
        solver = cauchy.solve_disc if args.model == "disc" else cauchy.solve_halfplane

        def solve(job):
            t, p = job
            return solver(t, p, u1, args.k, cfg)
        fmt = geo.format_complex
    jobs = [(t, p) for t in args.t for p in points]
    values = parallel_map(solve, jobs)
    rows = [[t, fmt(p), v.real, v.imag] for (t, p), v in zip(jobs, values)]
    emit(args, ["t", "point", "re", "im"], rows, RunManifest("solve", _params(args)))
    return EXIT_OK


def cmd_verify(args) -> int:
    suite = checks.SUITES[args.suite]
    kwargs = {"seed": args.seed}
    if args.k is not None:
        kwargs["k"] = args.k
    if args.samples is not None:
        kwargs["samples"] = args.samples
    if args.tolerance is not None:
        kwargs["tolerance"] = args.tolerance
    results = suite(**kwargs)
    report = [r.as_dict() for r in results]
    manifest = RunManifest("verify", _params(args), tolerance_report=report)
    passed = all(r.passed for r in results)
    if args.format == "csv":
        columns = ["name", "measured", "comparison", "threshold", "passed"]
        rows = [[r.name, r.measured, r.comparison, float(r.threshold), int(r.passed)]
                for r in results]
        emit(args, columns, rows, manifest)
        return EXIT_OK if passed else EXIT_FAILED
    text = json.dumps({"suite": args.suite, "passed": all(r.passed for r in results),
                       "tolerance_report": report}, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(manifest.to_json() + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_compare(args) -> int:
    rng = np.random.default_rng(args.seed)
    samples = args.samples or 20
    k = geo.MagneticParameter(args.k or 0.0)
    jobs = []
    for _ in range(samples):
        t = float(rng.uniform(0.2, 3.0))
        wp, w = checks.random_disc_query_points(rng, t)
        if args.model == "halfplane":
            wp, w = geo.cayley_inv(wp).z, geo.cayley_inv(w).z
        jobs.append((t, wp, w))

    def compare(job):
        t, wp, w = job
        return checks.form_values(t, wp, w, k, args.model)

    results = parallel_map(compare, jobs)
    columns = ["t", "source", "target", "k"]
    for f in kn.FORMS:
        columns += [f"{f}_re", f"{f}_im"]
    columns.append("max_rel_spread")
    rows = []
    worst = 0.0
    for (t, wp, w), vals in zip(jobs, results):
        r = [t, geo.format_complex(wp), geo.format_complex(w), k.k]
        for f in kn.FORMS:
            r += [vals[f].real, vals[f].imag] if f in vals else ["", ""]
        spread = checks.max_relative_spread(vals)
        worst = max(worst, spread)
        rows.append(r + [spread])
    tol = args.tolerance or 1e-9
    report = [checks._le("compare.max_relative_spread", worst, tol).as_dict()]
    emit(args, columns, rows, RunManifest("compare", _params(args), tolerance_report=report))
    return EXIT_OK if worst <= tol else EXIT_FAILED


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperwave", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, models=("disc", "halfplane", "morse")):
        sp.add_argument("--model", choices=models, default=models[0])
        sp.add_argument("--k", type=float, default=0.0, help="magnetic parameter")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="write data here and a .manifest.json beside it")

    def points(sp):
        sp.add_argument("--t", type=_float_list, help="time(s), comma separated")
        sp.add_argument("--lambda", dest="lam", type=float, help="Morse frequency")
        sp.add_argument("--w", type=_complex_arg("--w"), help="disc target, a+bi")
        sp.add_argument("--wp", type=_complex_arg("--wp"), help="disc source, a+bi")
        sp.add_argument("--z", type=_complex_arg("--z"), help="half-plane target")
        sp.add_argument("--zp", type=_complex_arg("--zp"), help="half-plane source")
        sp.add_argument("--y", type=float, help="Morse target y = e^X")
        sp.add_argument("--yp", type=float, help="Morse source y'")

    k = sub.add_parser("kernel", help="evaluate a wave kernel")
    common(k)
    points(k)
    k.add_argument("--form", choices=kn.FORMS, default="gaussF")
    k.set_defaults(func=cmd_kernel)

    s = sub.add_parser("solve", help="solve a Cauchy problem for bump data")
    common(s)
    points(s)
    s.add_argument("--grid", help="disc/half-plane 'x0:x1:nx,y0:y1:ny'; Morse 'y0:y1:n'")
    s.add_argument("--bump-center", type=_complex_arg("--bump-center"))
    s.add_argument("--bump-radius", type=float, default=checks.STANDARD_BUMP_RADIUS)
    s.add_argument("--amplitude", type=float, default=1.0)
    s.add_argument("--radial-nodes", type=int, default=48)
    s.add_argument("--angular-nodes", type=int, default=48)
    s.add_argument("--tolerance", type=float, default=1e-10)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=sorted(checks.SUITES), required=True)
    v.add_argument("--k", type=float)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--tolerance", type=float)
    v.add_argument("--format", choices=("csv", "json"), default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", help="tabulate all kernel forms on random queries")
    common(c, models=("disc", "halfplane"))
    c.add_argument("--samples", type=int)
    c.add_argument("--seed", type=int, default=7)
    c.add_argument("--tolerance", type=float)
    c.set_defaults(func=cmd_compare)
    return p


# options whose values may legitimately start with "-" (negative coordinates, grids)
_VALUE_OPTIONS = ("--w", "--wp", "--z", "--zp", "--y", "--yp", "--k", "--t", "--grid",
                  "--bump-center", "--amplitude")


def _attach_values(argv):
    """Rewrite ``--opt -0.2:...`` as ``--opt=-0.2:...`` so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = build_parser().parse_args(_attach_values(argv))
        if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"hyperwave: usage error: {e}\n")
        return EXIT_USAGE
    except ParameterError as e:
        sys.stderr.write(f"hyperwave: usage error: {e}\n")
        return EXIT_USAGE
    except (DomainError, HyperwaveError, ArithmeticError) as e:
        sys.stderr.write(f"hyperwave: numeric domain error: {e}\n")
        return EXIT_DOMAIN
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
