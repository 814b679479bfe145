"""Command-line driver.

Exit codes: 0 ok, 1 a checked claim failed, 2 mathematical precondition
violated, 3 invalid configuration, 4 inconclusive certificate, 5 solver
failure.  Errors go to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from . import helmholtz, moutard, positivity, spectral
from .errors import (CertificateMissing, ConsistencyError, InconclusiveError,
                     LeadingPartError, SolverStagnation, WavenumberMismatch)

EXIT_OK, EXIT_CLAIM, EXIT_MATH, EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_SOLVER = range(6)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Parameters for one command; flags override the JSON config file."""

    C: Fraction = Fraction(-12)
    k: float = 1.0
    L: float = 30.0
    h: float = 0.1
    out: str = "."
    example: str | None = None
    family: str | None = None
    package: str | None = None
    radii: list = field(default_factory=lambda: [50, 100, 200, 400])
    tail_radii: list = field(default_factory=lambda: [25, 50, 100])
    res_L: float = 20.0
    res_spacings: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    sample_L: float = 10.0
    sample_h: float = 0.5
    max_m: int = 2
    tol_angle: float = 5.0
    tol_window: float = 0.05
    tol_order_lo: float = 1.6
    tol_order_hi: float = 2.4
    tol_decay: float = 3.0
    tol_min_spacing: float = positivity.MIN_SPACING

    def validate(self):
        for f in fields(self):
            if f.name.startswith("tol_") and not getattr(self, f.name) > 0:
                raise ConfigError(f"{f.name} must be positive")
        if self.k <= 0:
            raise ConfigError("k must be positive")
        grids = [(self.L, self.h)] + [(self.res_L, h) for h in self.res_spacings]
        for L, h in grids:
            try:
                spectral.GridSpec(L, h)
            except ValueError as exc:
                raise ConfigError(f"grid L={L}, h={h}: {exc}") from exc
        return self


def _rational(s):
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"C must be rational, got {s!r}") from exc


def build_config(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    names = {f.name for f in fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    if "C" in data:
        data["C"] = _rational(data["C"])
    try:
        cfg = RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def _emit(obj):
    print(json.dumps(obj, sort_keys=True, indent=1, default=str))


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1, default=str)


def _load_descriptor(text):
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--family is neither a file nor JSON: {exc}") from exc


def _family_omegas(cfg):
    desc = _load_descriptor(cfg.family)
    if not isinstance(desc, dict) or "omega1" not in desc or "omega2" not in desc:
        raise ConfigError("family descriptor needs 'omega1' and 'omega2' entries")
    exact = []
    for name in ("omega1", "omega2"):
        d = dict(desc[name])
        d.setdefault("k", desc.get("k", cfg.k))
        try:
            _, elem = helmholtz.solution_from_descriptor(d)
        except WavenumberMismatch:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"bad descriptor for {name}: {exc}") from exc
        if elem is None:
            raise ConfigError(f"{name} has no exact form (need k = 1, lambda in {{1, i, -1, -i}}, "
                              "integer or 'p/q' weights)")
        exact.append(elem)
    return exact


def _package(cfg) -> moutard.PotentialPackage:
    if cfg.package is not None:
        if not cfg.package or not os.path.isfile(cfg.package):
            raise ConfigError(f"package file {cfg.package!r} not found")
        try:
            return moutard.PotentialPackage.load(cfg.package)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot load package {cfg.package}: {exc}") from exc
    if cfg.family:
        w1, w2 = _family_omegas(cfg)
        return moutard.double_potential(w1, w2, cfg.C)
    if cfg.example in (None, "paper"):
        return moutard.builtin_example(cfg.C)
    raise ConfigError(f"unknown example {cfg.example!r}")


def cmd_build(cfg):
    pkg = _package(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    pkg.save(os.path.join(cfg.out, "package.json"))
    n = round(cfg.sample_L / cfg.sample_h)
    xs = np.linspace(-cfg.sample_L, cfg.sample_L, 2 * n + 1)
    pkg.write_csv(os.path.join(cfg.out, "fields.csv"), xs, xs)
    _emit({"C": str(pkg.C), "Q(0,0)": str(pkg.kappa), "P_leading": str(pkg.P.leading_terms()),
           "terms": {"Q": len(pkg.Q), "P": len(pkg.P)}})
    return EXIT_OK


def cmd_verify(cfg):
    pkg = _package(cfg)
    checks = moutard.identity_suite(pkg)
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_CLAIM


def _certificate(cfg, pkg):
    return positivity.certify(pkg.Q, pkg.C, min_spacing=cfg.tol_min_spacing)


def cmd_certify(cfg):
    pkg = _package(cfg)
    cert = _certificate(cfg, pkg)
    os.makedirs(cfg.out, exist_ok=True)
    cert.save(os.path.join(cfg.out, "certificate.json"))
    _emit(cert.to_json())
    return {"certified": EXIT_OK, "failed": EXIT_CLAIM}.get(cert.verdict, EXIT_INCONCLUSIVE)


def cmd_threshold(cfg):
    pkg = _package(cfg)
    base = pkg.Q - pkg.Q.constant_term()
    c0 = pkg.Q.constant_term() - 4 * pkg.C

    res = positivity.threshold_C(lambda c: base + (c0 + 4 * c), min_spacing=cfg.tol_min_spacing)
    os.makedirs(cfg.out, exist_ok=True)
    _write_json(os.path.join(cfg.out, "threshold.json"), res.to_json())
    _emit({"C_star": res.C_star, "monotone": res.monotone, "path": res.path})
    return EXIT_OK if res.monotone else EXIT_CLAIM


def _require_certified(cfg, pkg):
    cert = _certificate(cfg, pkg)
    if not cert.certified:
        raise CertificateMissing(f"Q has no zero-free certificate at C = {pkg.C} ({cert.verdict})")
    return cert


def cmd_spectrum(cfg):
    pkg = _package(cfg)
    cert = _require_certified(cfg, pkg)
    E = float(pkg.energy)
    window = (E - cfg.tol_window, E + cfg.tol_window)
    eig = spectral.eigen_solve(pkg, spectral.GridSpec(cfg.L, cfg.h), window,
                               certificate=cert, angle_gate=cfg.tol_angle)
    res, orders = spectral.residual_orders(pkg, cfg.res_L, cfg.res_spacings, cert)
    report = spectral.SpectralReport(str(pkg.C), eig, res, list(cfg.res_spacings), orders)
    os.makedirs(cfg.out, exist_ok=True)
    _write_json(os.path.join(cfg.out, "spectrum.json"), report.to_json())
    with open(os.path.join(cfg.out, "eigenvalues.csv"), "w") as fh:
        fh.write("eigenvalue,residual\n")
        for mu, r in zip(eig.eigenvalues, eig.residuals):
            fh.write(f"{mu!r},{r!r}\n")
    ok = (eig.count >= 2 and eig.angle < cfg.tol_angle
          and all(cfg.tol_order_lo <= o <= cfg.tol_order_hi for o in orders))
    _emit({"count": eig.count, "angle_deg": eig.angle, "ritz": eig.ritz_values.tolist(),
           "orders": orders, "pass": ok})
    return EXIT_OK if ok else EXIT_CLAIM


def cmd_decay(cfg):
    pkg = _package(cfg)
    cert = _require_certified(cfg, pkg)
    table = spectral.decay_report(pkg, cfg.radii)
    bounded = {n: table.bounded(cfg.tol_decay)[n] for n in ("U_hat", "psi1", "psi2")}
    growing = {n: bool(np.all(np.diff(table.rows[n + "+"][1]) > 0)) for n in ("U_hat", "psi1", "psi2")}
    masses, ratios = spectral.l2_tail(pkg.psi1, cfg.tail_radii)
    tails = {"radii": list(cfg.tail_radii), "psi1_masses": masses.tolist(), "psi1_ratios": ratios.tolist()}
    report = spectral.SpectralReport(str(cert.C), decay=table, tails=tails)
    os.makedirs(cfg.out, exist_ok=True)
    _write_json(os.path.join(cfg.out, "decay.json"), report.to_json())
    table.write_csv(os.path.join(cfg.out, "decay.csv"))
    ok = all(bounded.values()) and all(growing.values()) and all(0.125 <= r <= 0.5 for r in ratios)
    _emit({"bounded": bounded, "growing": growing, "psi1_annulus_ratios": ratios.tolist(), "pass": ok})
    return EXIT_OK if ok else EXIT_CLAIM


def cmd_family_list(cfg):
    for row in helmholtz.list_family(cfg.max_m):
        print(json.dumps(row, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "threshold": cmd_threshold,
    "spectrum": cmd_spectrum,
    "decay": cmd_decay,
    "family-list": cmd_family_list,
}


def make_parser():
    parser = argparse.ArgumentParser(prog="moutard2d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--C")
        p.add_argument("--k", type=float)
        p.add_argument("--L", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--out")
        p.add_argument("--example", choices=["paper"])
        p.add_argument("--family")
        p.add_argument("--package")
        p.add_argument("--radii", type=float, nargs="+")
        p.add_argument("--tail-radii", dest="tail_radii", type=float, nargs="+")
        p.add_argument("--res-L", dest="res_L", type=float)
        p.add_argument("--res-spacings", dest="res_spacings", type=float, nargs="+")
        p.add_argument("--max-m", dest="max_m", type=int)
        for tol in ("angle", "window", "order-lo", "order-hi", "decay", "min-spacing"):
            p.add_argument(f"--tol-{tol}", dest="tol_" + tol.replace("-", "_"), type=float)
    return parser


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}) + "\n")
    return code


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, WavenumberMismatch) as exc:
        return _fail(EXIT_CONFIG, exc)
    except (ConsistencyError, LeadingPartError, CertificateMissing) as exc:
        return _fail(EXIT_MATH, exc)
    except InconclusiveError as exc:
        return _fail(EXIT_INCONCLUSIVE, exc)
    except SolverStagnation as exc:
        return _fail(EXIT_SOLVER, exc)


if __name__ == "__main__":
    sys.exit(main())
