"""Batch command-line front end.

Exit status: 0 success / pass, 1 numerical verdict failure or module error,
2 usage or configuration error.  Reports are JSON (sorted keys) unless
``--format csv`` is requested for tabular output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from .algebra import A3Element
from .decomposition import ComponentTable, fiber_constancy, fit_polynomial, peel, square_grid
from .errors import A3Error, ConfigError, ParseError, UnknownFixture
from .extension import Contour, MonogenicTriple, build_monogenic, default_contour, extend_contour, extend_jet
from .frame import canonical_triple, frame_from_json_obj
from .holo import eval_a3, eval_c, from_coefficients, jet, parse_expr, singularities, to_text
from .monogenicity import (
    PATHOLOGICAL,
    Box,
    FieldSampler,
    check_monogenic_many,
    frame_directions,
    local_boundedness,
    read_grid_csv,
    standard_directions,
    tolstov_residual,
    write_grid_csv,
)

CHUNK = 16  # points per work unit; fixed so results do not depend on --threads
FIXTURES = ("polynomial-triple", "exp-triple", "conj-grid", "radical-only")


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input helpers ------------------------------------------------------------


def _load_json_arg(text: str):
    """Inline JSON or a path to a JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"neither a file nor valid JSON: {text!r}") from exc


def _element(text: str) -> A3Element:
    try:
        return A3Element.from_json_obj(_load_json_arg(text))
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"bad A3Element: {exc}") from exc


def _complex(text: str) -> complex:
    try:
        if "," in text:
            re_, im = text.split(",")
            return complex(float(re_), float(im))
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"bad complex number {text!r}") from exc


def _triple(args) -> MonogenicTriple:
    try:
        return MonogenicTriple.from_json_obj(_load_json_arg(args.triple))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _frame(args):
    if not getattr(args, "frame", None):
        return None
    return frame_from_json_obj(_load_json_arg(args.frame))


def _sampler(args, box=None) -> tuple:
    if getattr(args, "triple", None):
        T = _triple(args)
        return FieldSampler(T, box, name="triple"), T
    if getattr(args, "builtin", None):
        if args.builtin not in PATHOLOGICAL:
            raise ConfigError(f"unknown builtin {args.builtin!r}; choose from {sorted(PATHOLOGICAL)}")
        return FieldSampler(PATHOLOGICAL[args.builtin], box, name=args.builtin), None
    raise ConfigError("need --triple or --builtin")


def _box(args, frame) -> Box:
    spec = args.box
    if spec == "unit":
        return Box.cube(1.0, frame)
    obj = _load_json_arg(spec)
    if set(obj) - {"lower", "upper"}:
        raise ConfigError("box JSON takes only 'lower' and 'upper'")
    return Box(obj["lower"], obj["upper"], frame)


def _map_chunks(fn, items, threads: int):
    chunks = [items[i:i + CHUNK] for i in range(0, len(items), CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(fn, chunks))
    else:
        results = [fn(c) for c in chunks]
    return [r for chunk in results for r in chunk]


# -- commands -----------------------------------------------------------------


def cmd_eval(args):
    expr = parse_expr(args.fn)
    if args.zeta:
        zeta = _element(args.zeta)
        return {"fn": to_text(expr), "zeta": zeta.to_json_obj(), "value": eval_a3(expr, zeta).to_json_obj()}, 0
    z = _complex(args.z)
    j = jet(expr, z)
    return {
        "fn": to_text(expr),
        "z": [z.real, z.imag],
        "value": [eval_c(expr, z).real, eval_c(expr, z).imag],
        "jet": {k: [complex(v).real, complex(v).imag] for k, v in (("v0", j.v0), ("v1", j.v1), ("v2", j.v2))},
    }, 0


def cmd_invert(args):
    x = _element(args.zeta)
    inv = alg.invert(x)
    check = float(alg.norm(alg.mul(x, inv) - alg.ONE))
    return {"zeta": x.to_json_obj(), "inverse": inv.to_json_obj(), "roundtrip_error": check}, 0


def _contour(args, z, poles):
    if args.contour:
        try:
            return Contour.from_json_obj(_load_json_arg(args.contour))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return default_contour(z, poles, args.nodes)


def cmd_extend(args):
    expr = parse_expr(args.fn)
    zeta = _element(args.zeta)
    out = {"fn": to_text(expr), "zeta": zeta.to_json_obj(), "results": {}}
    status = 0
    if args.method in ("jet", "both"):
        out["results"]["jet"] = {"method": "jet", "value": extend_jet(expr, zeta).to_json_obj()}
    if args.method in ("contour", "both"):
        contour = _contour(args, zeta.a, singularities(expr))
        value, record = extend_contour(expr, zeta, contour, adaptive=True)
        out["results"]["contour"] = {
            "method": "contour",
            "contour": contour.to_json_obj(),
            "value": value.to_json_obj(),
            "convergence": record.to_json_obj(),
        }
    if args.method == "both":
        a = A3Element.from_json_obj(out["results"]["jet"]["value"])
        b = A3Element.from_json_obj(out["results"]["contour"]["value"])
        diff = float(alg.norm(a - b) / (1 + alg.norm(a)))
        tol = args.tol if args.tol is not None else 1e-10
        out["agreement"] = {"relative_difference": diff, "tolerance": tol, "passed": diff <= tol}
        status = 0 if diff <= tol else 1
    return out, status


def cmd_build(args):
    T = _triple(args)
    zeta = _element(args.zeta)
    contour = None
    if args.method == "contour":
        contour = _contour(args, zeta.a, T.singularities())
    value = build_monogenic(T, zeta, args.method, contour)
    out = {"triple": T.to_json_obj(), "zeta": zeta.to_json_obj(), "method": args.method, "value": value.to_json_obj()}
    if contour is not None:
        out["contour"] = contour.to_json_obj()
    return out, 0


def _margin(box: Box, dirs) -> float:
    coords, _ = box.coordinates(A3Element.stack(dirs.vectors))
    return 0.1 * float(np.max(np.abs(coords))) * (1 + 1e-9) + 1e-12


def cmd_check(args):
    frame = _frame(args)
    if args.dirs == "frame" and frame is None:
        raise ConfigError("--dirs frame needs --frame")
    box = _box(args, frame if args.dirs == "frame" else None)
    phi, T = _sampler(args, box)
    dirs = frame_directions(frame) if args.dirs == "frame" else standard_directions()
    if args.points:
        pts = [A3Element.from_json_obj(o) for o in _load_json_arg(args.points)]
    else:
        rng = np.random.default_rng(args.seed)
        batch = box.sample(rng, args.npoints, _margin(box, dirs))
        pts = list(batch)
    tol = args.tol if args.tol is not None else 1e-6

    def work(chunk):
        return check_monogenic_many(phi, A3Element.stack(chunk), dirs, tol)

    reports = _map_chunks(work, pts, args.threads)
    out = {
        "sampler": T.to_json_obj() if T is not None else {"builtin": args.builtin},
        "directions": dirs.tag,
        "tolerance": tol,
        "points": [r.to_json_obj(include_raw=args.raw) for r in reports],
        "passed": all(r.passed for r in reports),
        "worst_residual": max(r.worst_residual for r in reports),
    }
    if T is not None:
        derived = T.derivative()
        errs = [float(alg.norm(r.derivative - build_monogenic(derived, r.zeta))) for r in reports]
        out["derivative_vs_built"] = max(errs)
    if args.boundedness > 0:
        try:
            out["local_boundedness"] = local_boundedness(phi, box, args.boundedness).to_json_obj()
        except A3Error as exc:
            out["local_boundedness"] = {"error": exc.to_dict()}
    return out, 0 if out["passed"] else 1


def cmd_tolstov(args):
    xs, ys, F, h = read_grid_csv(args.grid)
    res = tolstov_residual(F, h)
    tol = args.tol if args.tol is not None else 1e-6
    out = {"grid": os.path.basename(args.grid), "spacing": h, **res.to_json_obj(), "tolerance": tol,
           "passed": res.max_abs <= tol}
    if args.format == "csv":
        lines = ["x,y,res_re,res_im,abs"]
        for j, y in enumerate(ys[1:-1]):
            for k, x in enumerate(xs[1:-1]):
                r = res.residual[j, k]
                lines.append(",".join(repr(float(v)) for v in (x, y, r.real, r.imag, abs(r))))
        out["_csv"] = "\n".join(lines) + "\n"
    return out, 0 if out["passed"] else 1


def cmd_fiber(args):
    frame = _frame(args)
    phi, _ = _sampler(args)
    z = _complex(args.z)
    dev = fiber_constancy(phi, z, args.samples, args.component, frame, seed=args.seed)
    tol = args.tol if args.tol is not None else 1e-8
    return {"z": [z.real, z.imag], "component": args.component, "samples": args.samples,
            "max_deviation": dev, "tolerance": tol, "passed": dev <= tol}, 0 if dev <= tol else 1


def cmd_peel(args):
    frame = _frame(args)
    phi, T = _sampler(args)
    grid = square_grid(args.grid_n, args.half_width, _complex(args.center))
    table = peel(phi, grid, frame, args.degree, seed=args.seed)
    out = {"summary": table.summary()}
    if T is not None:
        true = np.array([eval_c(F, table.z) for F in T.parts])
        out["summary"]["max_error_vs_generator"] = float(np.max(np.abs(table.values - true)))
    tol = args.tol if args.tol is not None else 1e-8
    out["passed"] = table.max_residual <= tol
    if args.format == "csv":
        out["_csv"] = table.to_csv()
    else:
        out["table"] = [
            {"z": [z.real, z.imag], **{f"F{k}": [table.values[k, i].real, table.values[k, i].imag] for k in range(3)},
             "residual": float(table.residual[i])}
            for i, z in enumerate(table.z)
        ]
    return out, 0 if out["passed"] else 1


def cmd_fit(args):
    table = ComponentTable.read_csv(args.table)
    cert = fit_polynomial(table, args.degree)
    return cert.to_json_obj(), 0


def cmd_frame(args):
    frame = _frame(args)
    if frame is None:
        raise ConfigError("--frame is required")
    return canonical_triple(frame).to_json_obj(frame), 0


def generate_fixture(kind: str, seed: int, out_dir: str = ".") -> list:
    """Write deterministic input files for ``kind``; returns the paths."""
    if kind not in FIXTURES:
        raise UnknownFixture(f"unknown fixture {kind!r}; choose from {FIXTURES}")
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    stem = os.path.join(out_dir, f"{kind.replace('-', '_')}_seed{seed}")
    if kind == "conj-grid":
        xs = np.round(np.linspace(-1, 1, 21), 12)
        X, Y = np.meshgrid(xs, xs)
        path = stem + ".csv"
        write_grid_csv(path, xs, xs, np.conj(X + 1j * Y))
        return [path]
    if kind == "polynomial-triple":
        T = random_polynomial_triple(rng)
    elif kind == "exp-triple":
        c = [float(v) for v in np.round(rng.uniform(0.5, 1.5, 3), 6)]
        T = MonogenicTriple(f"{c[0]!r}*exp(z)", f"{c[1]!r}*z^2", f"{c[2]!r}/(z - 5)")
    else:
        T = MonogenicTriple("0", "0", "z")
    path = stem + ".json"
    with open(path, "w") as fh:
        json.dump(T.to_json_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [path]


def random_polynomial_triple(rng: np.random.Generator, degree: int = 4) -> MonogenicTriple:
    """Triple of polynomials with coefficients uniform in the unit disc."""
    parts = []
    for _ in range(3):
        r = np.sqrt(rng.uniform(0, 1, degree + 1))
        phase = np.exp(2j * np.pi * rng.uniform(0, 1, degree + 1))
        parts.append(from_coefficients(r * phase))
    return MonogenicTriple(*parts)


def cmd_fixture(args):
    paths = generate_fixture(args.kind, args.seed, args.out or ".")
    return {"kind": args.kind, "seed": args.seed, "files": [os.path.basename(p) for p in paths]}, 0


COMMANDS = {
    "eval": cmd_eval,
    "invert": cmd_invert,
    "extend": cmd_extend,
    "build": cmd_build,
    "check-monogenic": cmd_check,
    "tolstov": cmd_tolstov,
    "fiber-check": cmd_fiber,
    "peel": cmd_peel,
    "fit": cmd_fit,
    "frame": cmd_frame,
    "fixture": cmd_fixture,
}


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="verdict tolerance override")
    common.add_argument("--nodes", type=int, default=256, help="initial contour node count")
    common.add_argument("--out", default=None, help="output path (fixture: directory)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="a3kit", description="Monogenic functions in the algebra A3.")
    p.add_argument("--config", help="JSON RunConfig file (replaces command-line options)")
    sub = p.add_subparsers(dest="command")

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    s = add("eval", help="evaluate an expression over C (with jet) or over A3")
    s.add_argument("--fn", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--z")
    g.add_argument("--zeta")

    s = add("invert", help="invert an algebra element")
    s.add_argument("--zeta", required=True)

    s = add("extend", help="principal extension of an analytic function")
    s.add_argument("--fn", required=True)
    s.add_argument("--zeta", required=True)
    s.add_argument("--method", choices=("jet", "contour", "both"), default="both")
    s.add_argument("--contour")

    s = add("build", help="monogenic function from a triple (F0, F1, F2)")
    s.add_argument("--triple", required=True)
    s.add_argument("--zeta", required=True)
    s.add_argument("--method", choices=("jet", "contour"), default="jet")
    s.add_argument("--contour")

    def sampler_opts(s):
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("--triple")
        g.add_argument("--builtin")
        s.add_argument("--frame")

    s = add("check-monogenic", help="Gateaux-derivative check over a direction set")
    sampler_opts(s)
    s.add_argument("--box", default="unit")
    s.add_argument("--points")
    s.add_argument("--npoints", type=int, default=20)
    s.add_argument("--dirs", choices=("standard", "frame"), default="standard")
    s.add_argument("--boundedness", type=int, default=0, help="grid resolution for the boundedness scan (0: skip)")
    s.add_argument("--raw", action="store_true", help="include raw difference quotients")

    s = add("tolstov", help="Cauchy-Riemann residual on a CSV grid")
    s.add_argument("--grid", required=True)

    s = add("fiber-check", help="deviation of one component along a fibre")
    sampler_opts(s)
    s.add_argument("--z", required=True)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--component", type=int, choices=(0, 1, 2), default=0)

    s = add("peel", help="recover (F0, F1, F2) on a grid")
    sampler_opts(s)
    s.add_argument("--grid-n", type=int, default=21)
    s.add_argument("--half-width", type=float, default=1.0)
    s.add_argument("--center", default="0,0")
    s.add_argument("--degree", type=int, default=6)

    s = add("fit", help="polynomial certificate for a component table")
    s.add_argument("--table", required=True)
    s.add_argument("--degree", type=int, required=True)

    s = add("frame", help="canonical triple (a, b, c) of a frame")
    s.add_argument("--frame", required=True)

    s = add("fixture", help="write deterministic input files")
    s.add_argument("--kind", required=True)
    return p


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    FILE_KEYS = ("triple", "grid", "table", "frame", "points", "contour")

    @classmethod
    def from_json_obj(cls, obj: dict, parser: argparse.ArgumentParser) -> RunConfig:
        if "command" not in obj:
            raise ConfigError("config needs a 'command'")
        command = obj["command"]
        sub = _subparser(parser, command)
        known = {a.dest for a in sub._actions} - {"help"}
        options = {k: v for k, v in obj.items() if k != "command"}
        unknown = set(k.replace("-", "_") for k in options) - known
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        return cls(command, options)

    def validate(self):
        for k, v in self.options.items():
            if k == "tol" and v is not None and not v > 0:
                raise ConfigError("tolerances must be positive")
            if k in self.FILE_KEYS and isinstance(v, str) and not v.lstrip().startswith(("{", "[")):
                if not os.path.exists(v):
                    raise ConfigError(f"referenced file does not exist: {v}")

    def to_argv(self) -> list:
        argv = [self.command]
        for k, v in self.options.items():
            flag = "--" + k.replace("_", "-")
            if isinstance(v, bool):
                if v:
                    argv.append(flag)
            elif isinstance(v, (dict, list)):
                argv += [flag, json.dumps(v)]
            elif v is not None:
                argv += [flag, str(v)]
        return argv


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            if command not in action.choices:
                raise ConfigError(f"unknown command {command!r}")
            return action.choices[command]
    raise ConfigError("no subcommands")


def _emit(report: dict, args) -> None:
    csv_text = report.pop("_csv", None)
    if args.format == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"
    if args.out and args.command != "fixture":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if args.config:
            with open(args.config) as fh:
                cfg = RunConfig.from_json_obj(json.load(fh), parser)
            cfg.validate()
            args = parser.parse_args(cfg.to_argv())
        if not args.command:
            raise UsageError("a command is required")
        RunConfig(args.command, {"tol": args.tol}).validate()
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        report, status = COMMANDS[args.command](args)
        report = {"command": args.command, "status": "pass" if status == 0 else "fail", **report}
    except (ConfigError, ParseError, FileNotFoundError, json.JSONDecodeError) as exc:
        err = exc.to_dict() if isinstance(exc, A3Error) else {"code": "CONFIG_ERROR", "message": str(exc)}
        sys.stderr.write(json.dumps({"status": "error", "error": err}, sort_keys=True) + "\n")
        return 2
    except A3Error as exc:
        report = {"command": args.command, "status": "error", "error": exc.to_dict()}
        status = 1
    _emit(report, args)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
