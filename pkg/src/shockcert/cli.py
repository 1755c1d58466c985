"""Command line driver: ``certify --gamma 5/3 --vplus 0.4 --axis-pieces 39``.

Settings come from built-in defaults, then an optional INI config file
(section ``[shockcert]``, key ``schema = 1``), then command-line flags.

Exit codes: 0 certified, 2 inconclusive, 3 precondition failure.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

EXIT_CERTIFIED = 0
EXIT_INCONCLUSIVE = 2
EXIT_PRECONDITION = 3
CONFIG_SCHEMA = 1

log = logging.getLogger("shockcert")

# flag name -> (config key, type)
_KEYS = {
    "gamma": Fraction,
    "vplus": Fraction,
    "axis_pieces": int,
    "cheb_degree": int,
    "taylor_order": int,
    "grid_step": float,
    "half_length": float,
    "out": str,
    "plot": "bool",
    "reference_overlay": "bool",
    "profile_cache": str,
    "workers": int,
    "c1_subdivisions": int,
}

DEFAULTS = {
    "gamma": Fraction(5, 3),
    "vplus": Fraction(2, 5),
    "axis_pieces": 39,
    "cheb_degree": 24,
    "taylor_order": 18,
    "grid_step": 0.125,
    "half_length": 10.0,
    "out": "shockcert-out",
    "plot": False,
    "reference_overlay": False,
    "profile_cache": None,
    "workers": 1,
    "c1_subdivisions": 1000,
}


class ConfigError(ValueError):
    pass


def _convert(key, raw):
    kind = _KEYS[key]
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        v = str(raw).strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: not a boolean: {raw!r}")
    try:
        return kind(str(raw).strip()) if kind is not str else str(raw)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"{key}: {e}") from e


def read_config(path) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path}")
    if "shockcert" not in cp:
        raise ConfigError("config file needs a [shockcert] section")
    sec = cp["shockcert"]
    if sec.get("schema") != str(CONFIG_SCHEMA):
        raise ConfigError(f"config schema must be {CONFIG_SCHEMA}")
    out = {}
    for k, v in sec.items():
        if k == "schema":
            continue
        if k not in _KEYS:
            raise ConfigError(f"unknown config key {k!r}")
        out[k] = _convert(k, v)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="certify", description="Computer-assisted spectral stability certificate for a viscous shock profile.")
    p.add_argument("--config", help="INI config file with a [shockcert] section")
    p.add_argument("--gamma", help="adiabatic index, rational (e.g. 5/3)")
    p.add_argument("--vplus", help="right end state v+ in (0, 1), decimal or rational")
    p.add_argument("--axis-pieces", type=int, help="number of pieces on the upper imaginary axis")
    p.add_argument("--cheb-degree", type=int, help="Chebyshev degree in x of the tile transforms")
    p.add_argument("--taylor-order", type=int, help="Taylor order of the profile enclosure")
    p.add_argument("--grid-step", type=float, help="profile grid step h")
    p.add_argument("--half-length", type=float, help="half length L of the integration interval")
    p.add_argument("--out", help="output directory")
    p.add_argument("--plot", action="store_true", default=None, help="write evans.svg")
    p.add_argument("--reference-overlay", action="store_true", default=None, help="sample the double-precision Evans function and check containment")
    p.add_argument("--profile-cache", help="JSON file to load the profile enclosure from, or to save it to")
    p.add_argument("--workers", type=int, help="worker processes for contour pieces (default $SHOCKCERT_WORKERS or 1)")
    p.add_argument("--c1-subdivisions", type=int, help="sub-segments per side of the Laplace rectangle")
    p.add_argument("--pieces", help="comma-separated piece indices to run (partial run, never certified)")
    p.add_argument("--force-straddle", type=int, help="test hook: widen one piece's rectangles to contain 0")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def resolve_settings(args) -> dict:
    s = dict(DEFAULTS)
    env = os.environ.get("SHOCKCERT_WORKERS")
    if env:
        s["workers"] = _convert("workers", env)
    if args.config:
        s.update(read_config(args.config))
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is not None:
            s[k] = _convert(k, v)
    return s


def _load_or_solve_profile(params, cache):
    from .profile import load_profile, save_profile, solve_profile

    if cache and Path(cache).exists():
        prof = load_profile(cache)
        if prof.params != params:
            raise ConfigError(f"profile cache {cache} was computed for different parameters")
        log.info("profile loaded from %s", cache)
        return prof
    prof = solve_profile(params)
    if cache:
        save_profile(prof, cache)
        log.info("profile saved to %s", cache)
    return prof


def run(s: dict, pieces=None, force_straddle=None) -> int:
    from . import interval as iv
    from .init_error import NoContraction
    from .ode_enclosure import SolverConfig
    from .profile import ProfileParams
    from .verify import RunConfig, certify, emit, overlay_from_results

    try:
        params = ProfileParams(s["gamma"], s["vplus"], L=s["half_length"], h=s["grid_step"], n=s["taylor_order"])
        prof = _load_or_solve_profile(params, s["profile_cache"])
        solver = SolverConfig(n_y=s["cheb_degree"])
        runcfg = RunConfig(axis_pieces=s["axis_pieces"], reference_overlay=s["reference_overlay"], workers=s["workers"], c1_subdivisions=s["c1_subdivisions"])
        cert = certify(params, solver, runcfg, prof=prof, pieces=pieces, force_straddle=force_straddle, log=log.info)
    except (ConfigError, ValueError, iv.IntervalDomainError, NoContraction, ArithmeticError, RuntimeError) as e:
        log.error("precondition failure: %s", e)
        return EXIT_PRECONDITION
    overlay = overlay_from_results(cert.pieces) if (s["plot"] and s["reference_overlay"]) else None
    paths = emit(cert, s["out"], plot=s["plot"], overlay=overlay)
    log.info("c(v+) lower bound %s; verdict %s", repr(cert.c_lower), cert.verdict)
    for r in cert.reasons:
        log.info("reason: %s", r)
    for k, p in paths.items():
        log.info("wrote %s", p)
    print(f"verdict: {cert.verdict}  c_lower: {cert.c_lower!r}")
    return EXIT_CERTIFIED if cert.certified else EXIT_INCONCLUSIVE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(asctime)s %(message)s", datefmt="%H:%M:%S")
    try:
        s = resolve_settings(args)
        pieces = None if not args.pieces else {int(x) for x in args.pieces.split(",")}
    except (ConfigError, ValueError) as e:
        log.error("precondition failure: %s", e)
        return EXIT_PRECONDITION
    return run(s, pieces, args.force_straddle)


if __name__ == "__main__":
    sys.exit(main())
