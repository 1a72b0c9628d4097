"""Command-line front end: ``asymspec <subcommand> ...``.

Exit status: 0 on success, 1 on a domain, convergence or failed-check
error, 2 on malformed input.  Outputs are written atomically.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .asymmetry import asym_csv, odd_identity_residual, sample_asymmetry
from .errors import AsymspecError, ConvergenceError, FormatError
from .inverse import ReconstructionTarget, reconstruct
from .potential import dumps as potential_dumps
from .potential import loads as potential_loads
from .propagator import fundamental, reflected_c1, spectral_steps
from .sampling import interpolate, resample, sample_on_spectrum
from .spectrum import spectral_from_dict, spectral_triple

SUBCOMMANDS = ("forward", "spectrum", "asym", "interp", "resample", "reconstruct", "verify")


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise FormatError(f"unknown subcommand {self.subcommand!r}")
        for name, path in self.inputs.items():
            if path is not None and not os.path.isfile(path):
                raise FormatError(f"--{name.replace('_', '-')}: no such file {path!r}")
        for key, val in self.params.items():
            if isinstance(val, (int, float)) and not isinstance(val, bool) and key not in _SIGNED and val <= 0:
                raise FormatError(f"--{key.replace('_', '-')} must be positive")
        lo, hi = self.params.get("lambda_min"), self.params.get("lambda_max")
        if lo is not None and hi is not None and not lo < hi:
            raise FormatError("--lambda-min must be below --lambda-max")

    def meta(self):
        return {"asymspec": __version__, **asdict(self)}


_SIGNED = {"lambda_min", "lambda_max", "lam"}


# I/O helpers ---------------------------------------------------------------


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


def _read_potential(path):
    with open(path, encoding="utf-8") as fh:
        return potential_loads(fh.read())


def _json_text(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


class _Outputs:
    """Collects (path, text) pairs and commits them all at once."""

    def __init__(self):
        self.files = []

    def add(self, path, text):
        self.files.append((path, text))

    def commit(self):
        done = []
        try:
            for path, text in self.files:
                folder = os.path.dirname(os.path.abspath(path))
                fd, tmp = tempfile.mkstemp(dir=folder, prefix=".asymspec-", suffix=".tmp")
                try:
                    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                        fh.write(text)
                    os.replace(tmp, path)
                except BaseException:
                    if os.path.exists(tmp):
                        os.unlink(tmp)
                    raise
                done.append(path)
        except BaseException:
            for path in done:
                if os.path.exists(path):
                    os.unlink(path)
            raise


def _emit(out, path, text):
    if path:
        out.add(path, text)
    else:
        sys.stdout.write(text)


def _steps(config, default):
    return config.params.get("steps") or default


# subcommands ------------------------------------------------------------------


def _forward(config, out):
    q = _read_potential(config.inputs["potential"])
    lams = [complex(v) for v in config.params["lam"]]
    rows = []
    for lam in lams:
        f = fundamental(q, lam, config.params.get("steps"))
        row = {"lambda": [lam.real, lam.imag], "steps": f.steps}
        for key in ("c1", "dc1", "s1", "ds1", "c1_dl", "dc1_dl", "s1_dl", "ds1_dl"):
            v = complex(getattr(f, key))
            row[key] = [v.real, v.imag]
        rows.append(row)
    _emit(out, config.output, _json_text({"fundamental": rows, "meta": config.meta()}))


def _spectrum(config, out):
    q = _read_potential(config.inputs["potential"])
    n_max = config.params["n_max"]
    t = spectral_triple(q, n_max, _steps(config, spectral_steps(n_max)))
    d = t.to_dict()
    d["meta"].update(config.meta())
    _emit(out, config.output, _json_text(d))


def _grid(config):
    p = config.params
    return np.linspace(p["lambda_min"], p["lambda_max"], p["count"])


def _asym(config, out):
    q = _read_potential(config.inputs["potential"])
    lams = _grid(config)
    samples = sample_asymmetry(q, lams, config.params.get("steps"), os.path.basename(config.inputs["potential"]))
    _emit(out, config.output, asym_csv(samples))
    if config.output:
        out.add(config.output + ".meta.json", _json_text(config.meta()))


def _samples_from(config, count):
    """Samples either read from --samples or taken from a(.; --asym-of)."""
    if config.inputs.get("samples"):
        raw = _read_json(config.inputs["samples"])
        vals = raw.get("samples") if isinstance(raw, dict) else raw
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            raise FormatError("samples file must hold a list of numbers (or {'samples': [...]})")
        return np.asarray(vals, dtype=float)
    if config.inputs.get("asym_of"):
        from .asymmetry import asym_eval

        q = _read_potential(config.inputs["asym_of"])
        steps = _steps(config, spectral_steps(count))
        return lambda lam: asym_eval(q, lam, steps)
    raise FormatError("give --samples or --asym-of")


def _interp(config, out):
    p = _read_potential(config.inputs["nodes"])
    count = config.params["count_nodes"]
    J = config.params.get("J") or count
    steps = _steps(config, spectral_steps(count))
    phi = _samples_from(config, count)
    if callable(phi):
        sf, s1 = sample_on_spectrum(p, phi, count, J, steps)
    else:
        if len(phi) < count:
            raise FormatError(f"need {count} samples, got {len(phi)}")
        sf, s1 = sample_on_spectrum(p, lambda mu: phi[: len(mu)], count, J, steps)
    lams = _grid(config)
    r = interpolate(sf, s1, lams)
    lines = ["lambda,value,tail"] + [f"{float(a)!r},{float(b)!r},{float(c)!r}" for a, b, c in zip(lams, r.value, r.tail)]
    _emit(out, config.output, "\n".join(lines) + "\n")
    if config.output:
        out.add(config.output + ".meta.json", _json_text(config.meta()))


def _resample(config, out):
    spec = spectral_from_dict(_read_json(config.inputs["target"]))
    if "c" not in spec or "sigma" not in spec:
        raise FormatError("resample needs 'c' and 'sigma' in the spectral data")
    count = config.params["count_nodes"]
    phi = _samples_from(config, count)
    if callable(phi):
        a = np.asarray(phi(math.pi**2 * np.arange(1, count + 1) ** 2))
    else:
        a = phi[:count]
    r = resample(a, spec["c"], spec["sigma"], config.params.get("J"))
    _emit(out, config.output, _json_text({"alpha": r.value.tolist(), "tail": r.tail.tolist(), "meta": config.meta()}))


def _reconstruct(config, out):
    spec = spectral_from_dict(_read_json(config.inputs["target"]))
    n_fit = config.params.get("n_fit") or len(spec["mu"])
    steps = config.params.get("steps") or spec["meta"].get("steps") or spectral_steps(n_fit)
    target = ReconstructionTarget(spec["mu"], spec["alpha"], n_fit, int(steps))
    report = reconstruct(target, config.params["modes"], config.params["tol"], config.params["max_iter"])
    d = report.to_dict()
    d["meta"].update(config.meta())
    report_path = config.params.get("report") or (config.output + ".report.json" if config.output else None)
    if report.converged:
        _emit(out, config.output, potential_dumps(report.recovered) + "\n")
    if report_path:
        out.add(report_path, _json_text(d))
    else:
        sys.stdout.write(_json_text(d))
    if not report.converged:
        raise ConvergenceError(f"reconstruct did not converge: {report.message}", index=report.iterations)


def verify_suite(q, n_max=32):
    """Invariant checks on one potential: list of (name, value, tolerance)."""
    from .sampling import interpolate as interp

    rows = []
    lams = np.linspace(-20.0, 1e4, 256)
    f = fundamental(q, lams)
    rows.append(("wronskian", float(np.max(np.abs(f.wronskian - 1))), 1e-10))
    rows.append(("reflection", float(np.max(np.abs(reflected_c1(q, lams) - f.ds1))), 1e-9))
    p4 = max(odd_identity_residual(q, lam, 8192) for lam in (1.0, 10.0, 50.0))
    rows.append(("odd_identity", p4, 1e-7))
    t = spectral_triple(q, n_max)
    fa = fundamental(q, t.mu, t.steps)
    rows.append(("alpha_consistency", float(np.max(np.abs(fa.asymmetry - t.alpha))), 1e-8))
    from .asymmetry import asym_eval

    count = 4 * n_max
    steps = spectral_steps(count)
    zero = q.__class__.zero()
    sf, s1 = sample_on_spectrum(zero, lambda lam: asym_eval(q, lam, steps), count, n_max, steps)
    nodal = interp(sf, s1, sf.nodes[:n_max])
    rows.append(("interp_nodes", float(np.max(np.abs(nodal.value - sf.samples[:n_max]))), 0.0))
    probe = (np.arange(1, 9) + 0.5) ** 2 * math.pi**2
    r = interp(sf, s1, probe)
    excess = float(np.max(np.abs(r.value - asym_eval(q, probe, steps)) - r.tail))
    rows.append(("interp_offnode_excess", max(excess, 0.0), 0.0))
    return rows


def _verify(config, out):
    q = _read_potential(config.inputs["potential"])
    rows = verify_suite(q, config.params["n_max"])
    lines = [f"{'check':<24}{'value':>14}{'tolerance':>12}  result"]
    failed = []
    for name, value, tol in rows:
        ok = value <= tol
        if not ok:
            failed.append(name)
        lines.append(f"{name:<24}{value:>14.3e}{tol:>12.1e}  {'PASS' if ok else 'FAIL'}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if config.output:
        out.add(config.output, _json_text({
            "checks": [{"name": n, "value": v, "tolerance": t, "pass": v <= t} for n, v, t in rows],
            "meta": config.meta(),
        }))
    if failed:
        raise _CheckFailed(", ".join(failed))


class _CheckFailed(AsymspecError):
    pass


_HANDLERS = {
    "forward": _forward, "spectrum": _spectrum, "asym": _asym, "interp": _interp,
    "resample": _resample, "reconstruct": _reconstruct, "verify": _verify,
}


# argument parsing ---------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="asymspec", description="Spectral asymmetry toolkit for -u'' + q u = lam u on [0, 1].")
    ap.add_argument("--version", action="version", version=f"asymspec {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def grid(p, count=256):
        p.add_argument("--lambda-min", type=float, required=True)
        p.add_argument("--lambda-max", type=float, required=True)
        p.add_argument("--count", type=int, default=count)

    p = sub.add_parser("forward", help="fundamental data c, s and derivatives at given lambda")
    p.add_argument("--potential", required=True)
    p.add_argument("--lambda", dest="lam", type=complex, nargs="+", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--output")

    p = sub.add_parser("spectrum", help="Dirichlet eigenvalues and spectral data")
    p.add_argument("--potential", required=True)
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--steps", type=int)
    p.add_argument("--output")

    p = sub.add_parser("asym", help="CSV of a(lambda) on a uniform grid")
    p.add_argument("--potential", required=True)
    grid(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--output")

    p = sub.add_parser("interp", help="interpolate from samples on the spectrum of --nodes")
    p.add_argument("--nodes", required=True, help="potential whose Dirichlet spectrum carries the samples")
    p.add_argument("--samples", help="JSON list of sample values at mu_1, mu_2, ...")
    p.add_argument("--asym-of", help="sample a(.; q) of this potential instead")
    p.add_argument("--count-nodes", type=int, default=256)
    p.add_argument("--J", type=int)
    grid(p, 64)
    p.add_argument("--steps", type=int)
    p.add_argument("--output")

    p = sub.add_parser("resample", help="alpha_n from a(pi^2 j^2) and (c, sigma)")
    p.add_argument("--target", required=True, help="spectral data JSON providing c and sigma")
    p.add_argument("--samples", help="JSON list of a(pi^2 j^2), j = 1, 2, ...")
    p.add_argument("--asym-of", help="sample a(.; q) of this potential instead")
    p.add_argument("--count-nodes", type=int, default=256)
    p.add_argument("--J", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--output")

    p = sub.add_parser("reconstruct", help="potential from spectral data (mu, alpha)")
    p.add_argument("--target", required=True)
    p.add_argument("--modes", type=int, default=4)
    p.add_argument("--n-fit", type=int)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--steps", type=int)
    p.add_argument("--report")
    p.add_argument("--output")

    p = sub.add_parser("verify", help="run the invariant suite on a potential")
    p.add_argument("--potential", required=True)
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--output")
    return ap


_INPUT_KEYS = ("potential", "target", "nodes", "samples", "asym_of")


def config_from_args(ns):
    raw = vars(ns).copy()
    sub = raw.pop("subcommand")
    output = raw.pop("output", None)
    inputs = {k: raw.pop(k) for k in _INPUT_KEYS if k in raw}
    if "lam" in raw:
        raw["lam"] = [str(v) for v in raw["lam"]]
    return RunConfig(sub, inputs, output, raw)


def run(config):
    """Dispatch one configured run; returns the exit status."""
    out = _Outputs()
    try:
        config.validate()
        _HANDLERS[config.subcommand](config, out)
        out.commit()
        return 0
    except (FormatError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        _report(config.subcommand, exc)
        return 2
    except ConvergenceError as exc:
        # a complete non-converged report is kept; the potential is not written
        out.commit()
        _report(config.subcommand, exc)
        return 1
    except (AsymspecError, ValueError, ArithmeticError) as exc:
        _report(config.subcommand, exc)
        return 1


def _report(sub, exc):
    index = getattr(exc, "index", None)
    where = f" (index {index})" if index is not None else ""
    print(f"asymspec {sub}: {type(exc).__name__}{where}: {exc}", file=sys.stderr)


def main(argv=None):
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
