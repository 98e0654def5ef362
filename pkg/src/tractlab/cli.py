"""Command-line entry point.

Subcommands: render, conjugate, semiconj, verify, report.  Flags mirror
the JSON config one-to-one and a flag always overrides the config file.
All numeric preconditions are validated before any computation starts,
with the failing field named.  Exit codes: 0 success, 1 config error,
2 computation error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import conjugacy, gridkernel, semiconj
from .errors import ConfigError, TractlabError
from .gridkernel import Window
from .models import LogLiftModel, model_from_json, plane_map_from_json
from .verify import run_suite

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2
EXIT_VERIFY = 3


def _threads() -> int:
    raw = os.environ.get("TRACTLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"TRACTLAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"TRACTLAB_THREADS must be >= 1, got {n}")
    return n


def _parse_complex(text: str, field: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"{field}: cannot parse complex value {text!r}") from exc


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    return cfg


def _setting(args_value, cfg: dict, key: str, default=None):
    if args_value is not None:
        return args_value
    return cfg.get(key, default)


# -- render ------------------------------------------------------------

def _cmd_render(args) -> int:
    cfg = _load_config(args.config)
    map_desc = cfg.get("map")
    if args.map is not None:
        map_desc = json.loads(args.map)
    if map_desc is None:
        raise ConfigError("map: no plane-map descriptor given")
    map_spec = plane_map_from_json(map_desc)

    window_desc = _setting(args.window, cfg, "window")
    if window_desc is None:
        raise ConfigError("window: missing")
    if isinstance(window_desc, str):
        window_desc = [float(v) for v in window_desc.split(",")]
    window = Window.from_json(window_desc)

    res_desc = _setting(args.resolution, cfg, "resolution", [256, 256])
    if isinstance(res_desc, str):
        res_desc = [int(v) for v in res_desc.split(",")]
    width, height = int(res_desc[0]), int(res_desc[1])
    if width <= 0 or height <= 0:
        raise ConfigError(f"resolution: must be positive, got {width}x{height}")

    escape_radius = float(_setting(args.escape_radius, cfg, "escape_radius", 50.0))
    if escape_radius <= 0:
        raise ConfigError(f"escape_radius: must be positive, got {escape_radius:g}")
    horizon = int(_setting(args.horizon, cfg, "horizon", 30))
    if horizon < 1:
        raise ConfigError(f"horizon: must be >= 1, got {horizon}")
    backend = _setting(args.backend, cfg, "backend", "auto")

    grid = gridkernel.classify_window(
        map_spec, window, (width, height), escape_radius, horizon, backend=backend
    )
    out = args.out
    if out.endswith(".png"):
        gridkernel.write_png(out, grid)
    else:
        gridkernel.write_pgm(out, grid)
    gridkernel.write_sidecar(
        out + ".json", map_spec, window, (width, height), escape_radius, horizon
    )
    print(f"wrote {out} and {out}.json (backend: {gridkernel.BACKEND})")
    return EXIT_OK


# -- conjugate ---------------------------------------------------------

def _load_samples(path: str | None, cfg: dict) -> tuple[LogLiftModel, list[complex]]:
    model = LogLiftModel("shifted_exp", R=10.0)
    points: list[complex] | None = None
    desc = cfg.get("samples")
    if path is not None:
        with open(path) as fh:
            desc = json.load(fh)
    if desc is None:
        raise ConfigError("samples: no sample specification given")
    if isinstance(desc, dict):
        if "model" in desc:
            model = model_from_json(desc["model"])
        raw = desc.get("points")
    else:
        raw = desc
    if not raw:
        raise ConfigError("samples: empty point list")
    points = [complex(p[0], p[1]) if isinstance(p, list) else complex(p) for p in raw]
    return model, points


def _cmd_conjugate(args) -> int:
    cfg = _load_config(args.config)
    kappa_raw = _setting(args.kappa, cfg, "kappa")
    if kappa_raw is None:
        raise ConfigError("kappa: missing")
    kappa = (
        _parse_complex(kappa_raw, "kappa")
        if isinstance(kappa_raw, str)
        else complex(kappa_raw[0], kappa_raw[1])
    )
    Q = float(_setting(args.Q, cfg, "Q", 2.0))
    tol = float(_setting(args.tol, cfg, "tol", 1e-9))
    if tol <= 0:
        raise ConfigError(f"tol: must be positive, got {tol:g}")
    if Q <= 2.0 * abs(kappa) + 1.0:
        raise ConfigError(
            f"Q: must exceed 2|kappa|+1 = {2.0 * abs(kappa) + 1.0:g}, got {Q:g}"
        )
    model, points = _load_samples(args.samples, cfg)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        samples = list(
            pool.map(lambda z: conjugacy.theta_limit(model, kappa, z, tol, Q), points)
        )
    crosscheck = conjugacy.uniqueness_crosscheck(
        model, kappa, points[: min(10, len(points))], tol, Q
    )
    holo = [
        conjugacy.holomorphy_in_kappa(model, z, kappa, 1e-3, Q)
        for z in points[: min(5, len(points))]
    ]
    residuals = [s.residual for s in samples if not math.isnan(s.residual)]
    summary = {
        "kappa": [kappa.real, kappa.imag],
        "Q": Q,
        "tol": tol,
        "count": len(samples),
        "max_residual": max(residuals) if residuals else None,
        "max_displacement": max(s.displacement() for s in samples),
        "displacement_bound": 2.0 * abs(kappa),
        "uniqueness_crosscheck": crosscheck,
        "holomorphy_residuals_h1e-3": holo,
        "dilatation_ceiling": None
        if Q <= 1.0
        else conjugacy.motion_dilatation_ceiling(kappa, Q),
    }
    conjugacy.write_sample_report(args.out, samples, summary)
    if args.csv:
        conjugacy.write_sample_csv(args.csv, samples)
    print(f"wrote {args.out} ({len(samples)} samples)")
    return EXIT_OK


# -- semiconj ----------------------------------------------------------

def _cmd_semiconj(args) -> int:
    cfg = _load_config(args.config)
    lam_raw = _setting(args.lam, cfg, "lambda", "0.5")
    lam = (
        _parse_complex(lam_raw, "lambda")
        if isinstance(lam_raw, str)
        else complex(lam_raw[0], lam_raw[1])
    )
    r_U = float(_setting(args.r_U, cfg, "r_U", 0.7))
    K = float(_setting(args.K, cfg, "K", 2.0))
    R = float(_setting(args.R, cfg, "R", 11.0))
    tol = float(_setting(args.tol, cfg, "tol", 1e-6))
    if tol <= 0:
        raise ConfigError(f"tol: must be positive, got {tol:g}")
    setup = semiconj.build_setup(lam, r_U, K, R)

    raw_points = cfg.get("points")
    if args.samples is not None:
        with open(args.samples) as fh:
            raw_points = json.load(fh)
    if raw_points is None:
        # small imaginary parts keep the g-orbits escaping
        raw_points = [[25.0, 0.0], [40.0, 0.0], [30.0, 0.1], [35.0, -0.05]]
    points = [complex(p[0], p[1]) if isinstance(p, list) else complex(p) for p in raw_points]

    C = semiconj.expansion_certificate(setup)
    samples = [semiconj.semiconj_limit(setup, z, tol, C) for z in points]
    semiconj.write_report(args.out, setup, samples)
    print(
        f"wrote {args.out} ({len(samples)} samples, certified C = {C:.6g}, "
        f"mu = {semiconj.mu_constant(setup):.6g})"
    )
    return EXIT_OK


# -- verify / report ---------------------------------------------------

def _cmd_verify(args) -> int:
    failures = run_suite(args.suite, verbose=True)
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def _cmd_report(args) -> int:
    with open(args.input) as fh:
        payload = json.load(fh)
    if "summary" in payload:
        print("conjugacy report")
        for key, val in payload["summary"].items():
            print(f"  {key}: {val}")
        print(f"  samples: {len(payload.get('samples', []))}")
    elif "setup" in payload:
        print("semiconjugacy report")
        for key, val in payload["setup"].items():
            print(f"  {key}: {val}")
        print(f"  samples: {len(payload.get('samples', []))}")
    elif "map" in payload:
        print("render sidecar")
        for key, val in payload.items():
            print(f"  {key}: {val}")
    else:
        print(json.dumps(payload, indent=2))
    return EXIT_OK


# -- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tractlab",
        description="Logarithmic-coordinate dynamics toolkit: escape-time "
        "rendering, pullback conjugacies, and their verification suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="escape-time image of a catalog map")
    p_render.add_argument("--config", help="JSON config file")
    p_render.add_argument("--map", help="inline JSON plane-map descriptor")
    p_render.add_argument("--window", help="xmin,xmax,ymin,ymax")
    p_render.add_argument("--resolution", help="width,height")
    p_render.add_argument("--escape-radius", dest="escape_radius", type=float)
    p_render.add_argument("--horizon", type=int)
    p_render.add_argument("--backend", choices=["auto", "compiled", "numpy"])
    p_render.add_argument("--out", required=True, help="output .pgm or .png path")
    p_render.set_defaults(func=_cmd_render)

    p_conj = sub.add_parser("conjugate", help="pullback conjugacy on samples")
    p_conj.add_argument("--config", help="JSON config file")
    p_conj.add_argument("--kappa", help="complex, e.g. 0.3+0.2i")
    p_conj.add_argument("--Q", type=float)
    p_conj.add_argument("--tol", type=float)
    p_conj.add_argument("--samples", help="JSON sample file")
    p_conj.add_argument("--out", required=True, help="output JSON report")
    p_conj.add_argument("--csv", help="optional CSV batch summary")
    p_conj.set_defaults(func=_cmd_conjugate)

    p_semi = sub.add_parser("semiconj", help="hyperbolic-map semiconjugacy")
    p_semi.add_argument("--config", help="JSON config file")
    p_semi.add_argument("--lambda", dest="lam", help="complex, |lambda| < 1")
    p_semi.add_argument("--r-U", dest="r_U", type=float)
    p_semi.add_argument("--K", type=float)
    p_semi.add_argument("--R", type=float)
    p_semi.add_argument("--tol", type=float)
    p_semi.add_argument("--samples", help="JSON sample file")
    p_semi.add_argument("--out", required=True, help="output JSON report")
    p_semi.set_defaults(func=_cmd_semiconj)

    p_ver = sub.add_parser("verify", help="run the invariant suite")
    p_ver.add_argument(
        "--suite",
        default="all",
        choices=["all", "models", "tracts", "hypmetric", "orbits", "conjugacy",
                 "semiconj", "grid"],
    )
    p_ver.set_defaults(func=_cmd_verify)

    p_rep = sub.add_parser("report", help="summarize a JSON artifact")
    p_rep.add_argument("--input", required=True)
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; remap to config error
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TractlabError, OverflowError, OSError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
