"""``kerrjc`` command-line front end.

Every command samples an observable on a grid of dimensionless times
``omega t`` and writes the curves as CSV (or one JSON document) plus a JSON
run summary.  Frequencies are angular frequencies with ``hbar = 1``; the
default ``omega = 1`` makes all other frequencies ratios to ``omega``.

Exit codes: 0 success, 2 invalid invocation or spec, 3 numerical
precondition failure (truncation, degenerate parameters).
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .decoherence import (
    DecoherenceParams,
    decoherence_factor_chi0,
    decoherence_factor_numeric,
    decoherence_factor_printed_series,
    decoherence_factor_rederived,
    decoherence_factor_shorttime,
    shorttime_frequency,
)
from .exceptions import KerrJCError, UnnormalizedInput
from .fock import FockSpace
from .model import CompositeSpace, SystemParams, rwa_hamiltonian
from .numerics import Propagator, rwa_deviation_curve, truncation_scan
from .rabi import (
    check_qubit_amplitudes,
    dressed_eigensystem,
    evolve_amplitudes,
    max_transfer_probability,
    revival_times,
)

log = logging.getLogger("kerrjc")

COMMANDS = ("transfer", "revival", "decoherence", "rwa-check", "convergence", "audit")
METHODS = ("numeric", "printed-series", "rederived-series", "chi0", "short-time")
COLUMN_NAMES = {
    "numeric": "D_numeric",
    "printed-series": "D_printed_series",
    "rederived-series": "D_rederived_series",
    "chi0": "D_chi0",
    "short-time": "D_short_time",
}
DEFAULTS = {
    "omega": 1.0,
    "omega_q": None,  # follows omega
    "g": 0.1,
    "chi": 0.01,
    "alpha_re": 1 / math.sqrt(2),
    "alpha_im": 0.0,
    "beta_re": 1 / math.sqrt(2),
    "beta_im": 0.0,
    "t_min": 0.0,
    "t_max": 8 * math.pi,
    "t_steps": 1000,
    "dim": 64,
    "methods": "numeric",
    "dims": "16,32,64",
    "out": None,
    "format": "csv",
}
# Amplitudes typed by hand are renormalised if they are this close to unit norm.
CLI_NORM_TOL = 1e-6
SHORT_TIME_WINDOW = 0.1  # chi t bound for the short-time comparison
N_REVIVALS = 5
EXIT_SPEC, EXIT_NUMERIC = 2, 3


class SpecError(ValueError):
    """Invalid sweep specification (exit code 2)."""


@dataclass(frozen=True)
class SweepSpec:
    command: str
    params: SystemParams
    alpha: complex = 1 / math.sqrt(2)
    beta: complex = 1 / math.sqrt(2)
    t_min: float = 0.0
    t_max: float = 8 * math.pi
    t_steps: int = 1000
    dim: int = 64
    methods: tuple = ("numeric",)
    dims: tuple = (16, 32, 64)
    output_path: str | None = None
    format: str = "csv"

    def validate(self) -> "SweepSpec":
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        if self.t_steps < 2:
            raise SpecError("t_steps must be >= 2")
        if not self.t_min < self.t_max:
            raise SpecError("t_min must be < t_max")
        if self.dim < 8:
            raise SpecError("dim must be >= 8")
        if self.format not in ("csv", "json"):
            raise SpecError(f"format must be csv or json, got {self.format!r}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise SpecError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
        if self.command == "decoherence" and not self.methods:
            raise SpecError("decoherence needs at least one method")
        if self.command == "convergence":
            d = list(self.dims)
            if len(d) < 2 or any(b <= a for a, b in zip(d, d[1:])) or d[0] < 8:
                raise SpecError("dims must be strictly increasing, >= 8, with two or more entries")
        if self.command == "rwa-check" and self.params.omega_q != self.params.omega:
            raise SpecError("rwa-check compares at resonance; omega_q must equal omega")
        try:
            check_qubit_amplitudes(self.alpha, self.beta)
        except UnnormalizedInput as exc:
            raise SpecError(str(exc)) from exc
        return self

    @property
    def omega_t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_steps)

    @property
    def times(self) -> np.ndarray:
        return self.omega_t / self.params.omega

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = [self.alpha.real, self.alpha.imag]
        d["beta"] = [self.beta.real, self.beta.imag]
        d["methods"] = list(self.methods)
        d["dims"] = list(self.dims)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        d["params"] = SystemParams(**d["params"])
        d["alpha"] = complex(*d["alpha"])
        d["beta"] = complex(*d["beta"])
        d["methods"] = tuple(d["methods"])
        d["dims"] = tuple(int(x) for x in d["dims"])
        return cls(**d)


@dataclass
class SweepResult:
    columns: dict
    results: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        names = list(self.columns)
        buf.write(",".join(names) + "\n")
        cols = [np.asarray(self.columns[n]) for n in names]
        for row in zip(*cols):
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "spec": self.metadata.get("spec"),
            "results": self.results,
            "warnings": self.warnings,
            "wall_time_s": self.metadata.get("wall_time_s"),
            "version": self.metadata.get("version"),
        }

    def to_json(self) -> str:
        doc = self.summary()
        doc["columns"] = {k: np.asarray(v).tolist() for k, v in self.columns.items()}
        return json.dumps(doc, indent=2, default=_json_default) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.11e}"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def thread_count(serial: bool = False) -> int:
    if serial:
        return 1
    env = os.environ.get("KERRJC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SpecError(f"KERRJC_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def grid_map(func, t: np.ndarray, threads: int = 1) -> np.ndarray:
    """``func`` over ``t`` in ordered chunks; chunks may run concurrently."""
    if threads <= 1 or t.size < 2 * threads:
        return np.asarray(func(t))
    chunks = np.array_split(t, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(func, chunks))
    return np.concatenate([np.atleast_1d(p) for p in parts])


# -- commands -----------------------------------------------------------------

def _rwa_oracle(spec: SweepSpec):
    cs = CompositeSpace.of(spec.dim)
    prop = Propagator.from_hamiltonian(rwa_hamiltonian(spec.params, cs))
    psi0 = spec.alpha * cs.ket(0, 0) + spec.beta * cs.ket(1, 0)
    return cs, prop, psi0


def run_transfer(spec: SweepSpec, threads: int = 1) -> SweepResult:
    p, t = spec.params, spec.times
    cs, prop, psi0 = _rwa_oracle(spec)

    def analytic(ts):
        amp = evolve_amplitudes(spec.alpha, spec.beta, ts, p)
        return np.abs(amp.c00) ** 2 + np.abs(amp.c01) ** 2

    def oracle(ts):
        psi = prop.evolve(ts, psi0)
        return np.abs(psi[:, cs.index(0, 0)]) ** 2 + np.abs(psi[:, cs.index(0, 1)]) ** 2

    pa = grid_map(analytic, t, threads)
    po = grid_map(oracle, t, threads)
    return SweepResult(
        columns={"omega_t": spec.omega_t, "P_analytic": pa, "P_oracle": po},
        results={
            "sup_P": max_transfer_probability(spec.alpha, spec.beta, p),
            "grid_max_P_analytic": float(pa.max()),
            "grid_max_P_oracle": float(po.max()),
            "max_abs_diff_analytic_oracle": float(np.abs(pa - po).max()),
        },
    )


def run_revival(spec: SweepSpec, threads: int = 1) -> SweepResult:
    p, t = spec.params, spec.times
    cs, prop, psi0 = _rwa_oracle(spec)

    def purity_of(c00, c01, c10):
        # reduced qubit state of c00|00> + c01|01> + c10|10>
        r00 = np.abs(c00) ** 2 + np.abs(c01) ** 2
        r11 = np.abs(c10) ** 2
        r01 = np.abs(c00 * np.conj(c10)) ** 2
        return r00**2 + r11**2 + 2 * r01

    def analytic(ts):
        amp = evolve_amplitudes(spec.alpha, spec.beta, ts, p)
        return np.stack([purity_of(amp.c00, amp.c01, amp.c10), np.abs(amp.c01)], axis=-1)

    def oracle(ts):
        psi = prop.evolve(ts, psi0)
        m = psi.reshape(len(ts), 2, -1)
        rho = np.einsum("tqn,tpn->tqp", m, m.conj())
        return np.stack([np.sum(np.abs(rho) ** 2, axis=(1, 2)),
                         np.abs(psi[:, cs.index(0, 1)])], axis=-1)

    a = grid_map(analytic, t, threads).reshape(-1, 2)
    o = grid_map(oracle, t, threads).reshape(-1, 2)
    taus = revival_times(p, N_REVIVALS)
    at = analytic(taus).reshape(-1, 2)
    ot = oracle(taus).reshape(-1, 2)
    return SweepResult(
        columns={"omega_t": spec.omega_t, "purity": a[:, 0], "purity_oracle": o[:, 0],
                 "abs_c01": a[:, 1], "abs_c01_oracle": o[:, 1]},
        results={
            "g_chi": dressed_eigensystem(p).g_chi,
            "omega_tau": (p.omega * taus).tolist(),
            "purity_at_tau": at[:, 0].tolist(),
            "abs_c01_at_tau": at[:, 1].tolist(),
            "purity_oracle_at_tau": ot[:, 0].tolist(),
            "abs_c01_oracle_at_tau": ot[:, 1].tolist(),
            "min_purity": float(a[:, 0].min()),
        },
    )


def _decoherence_columns(spec: SweepSpec, methods, threads: int) -> dict:
    p, t = spec.params, spec.times
    space = FockSpace(spec.dim)
    dp = DecoherenceParams.from_system(p)
    funcs = {
        "numeric": lambda ts: decoherence_factor_numeric(ts, p, space),
        "printed-series": lambda ts: decoherence_factor_printed_series(ts, dp),
        "rederived-series": lambda ts: decoherence_factor_rederived(ts, dp),
        "chi0": lambda ts: decoherence_factor_chi0(ts, p.g, p.omega),
        "short-time": lambda ts: decoherence_factor_shorttime(ts, dp),
    }
    return {m: grid_map(funcs[m], t, threads) for m in methods}


def run_decoherence(spec: SweepSpec, threads: int = 1, audit: bool = False) -> SweepResult:
    methods = METHODS if audit else tuple(dict.fromkeys(spec.methods))
    cols = _decoherence_columns(spec, methods, threads)
    p = spec.params
    dp = DecoherenceParams.from_system(p)
    results: dict = {
        "lambda": dp.lam,
        "Omega": dp.Omega,
        "series_kmax": dp.series_kmax,
        "short_time_frequency": shorttime_frequency(dp),
    }
    warnings: list = []
    for m, v in cols.items():
        results[m] = {"at_t_min": float(v[0]), "min": float(v.min()), "max": float(v.max())}
    if "printed-series" in cols:
        d0 = decoherence_factor_printed_series(0.0, dp)
        results["printed-series"]["at_t0"] = d0
        if abs(d0 - 1.0) > 1e-12:
            warnings.append({
                "code": "D0_defect",
                "message": "printed series does not give D(0) = 1",
                "value": d0,
                "exp_minus_lambda_sq": math.exp(-dp.lam**2),
            })
    if "numeric" in cols:
        ref = cols["numeric"]
        for m, v in cols.items():
            if m != "numeric":
                results[m]["max_abs_diff_vs_numeric"] = float(np.abs(v - ref).max())
        if "short-time" in cols:
            mask = p.chi * spec.times <= SHORT_TIME_WINDOW if p.chi > 0 else np.ones_like(ref, bool)
            rel = np.abs(cols["short-time"] - ref)[mask] / ref[mask]
            results["short-time"]["max_rel_diff_vs_numeric_in_window"] = (
                float(rel.max()) if rel.size else None)
    if audit:
        results["audit"] = {
            "max_abs_printed_minus_numeric": results["printed-series"]["max_abs_diff_vs_numeric"],
            "max_abs_rederived_minus_numeric":
                results["rederived-series"]["max_abs_diff_vs_numeric"],
            "rederived_at_t0": decoherence_factor_rederived(0.0, dp),
            "printed_at_t0": results["printed-series"]["at_t0"],
        }
    columns = {"omega_t": spec.omega_t}
    columns.update({COLUMN_NAMES[m]: v for m, v in cols.items()})
    return SweepResult(columns=columns, results=results, warnings=warnings)


def run_rwa_check(spec: SweepSpec, threads: int = 1) -> SweepResult:
    cs = CompositeSpace.of(spec.dim)
    curve = grid_map(lambda ts: rwa_deviation_curve(spec.params, ts, cs), spec.times, threads)
    return SweepResult(
        columns={"omega_t": spec.omega_t, "trace_distance": curve},
        results={"max_deviation": float(curve.max()), "g_over_omega": spec.params.g / spec.params.omega},
    )


def run_convergence(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Observables at ``omega t = t_max`` for each truncation in ``spec.dims``."""
    p, t_end = spec.params, spec.t_max / spec.params.omega

    def evaluate(dim):
        cs = CompositeSpace.of(dim)
        prop = Propagator.from_hamiltonian(rwa_hamiltonian(p, cs))
        psi = prop.evolve(t_end, spec.alpha * cs.ket(0, 0) + spec.beta * cs.ket(1, 0))
        return {
            "D_numeric": decoherence_factor_numeric(t_end, p, FockSpace(dim)),
            "P_oracle": abs(psi[cs.index(0, 0)]) ** 2 + abs(psi[cs.index(0, 1)]) ** 2,
        }

    report = truncation_scan(evaluate, spec.dims, tolerance=1e-8)
    columns = {"dim": np.array(report.dims, dtype=int)}
    columns.update({k: np.array(v) for k, v in report.values.items()})
    return SweepResult(
        columns=columns,
        results={"converged": report.converged, "final_delta": report.final_delta,
                 "deltas": report.deltas, "tolerance": report.tolerance,
                 "omega_t": spec.t_max},
    )


def run(spec: SweepSpec, threads: int = 1, audit: bool = False) -> SweepResult:
    spec.validate()
    audit = (audit and spec.command == "decoherence") or spec.command == "audit"
    if audit:
        spec = replace(spec, methods=METHODS)
    start = time.perf_counter()
    if spec.command == "transfer":
        res = run_transfer(spec, threads)
    elif spec.command == "revival":
        res = run_revival(spec, threads)
    elif spec.command in ("decoherence", "audit"):
        res = run_decoherence(spec, threads, audit=audit)
    elif spec.command == "rwa-check":
        res = run_rwa_check(spec, threads)
    else:
        res = run_convergence(spec, threads)
    res.metadata = {
        "spec": spec.to_dict(),
        "version": __version__,
        "wall_time_s": time.perf_counter() - start,
    }
    return res


# -- argument handling --------------------------------------------------------

def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise SpecError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kerrjc",
        description="Charge qubit + Kerr nanomechanical resonator: sweeps and formula audits.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--omega", type=float)
    ap.add_argument("--omega-q", type=float, help="qubit splitting (defaults to omega)")
    ap.add_argument("--g", type=float)
    ap.add_argument("--chi", type=float)
    ap.add_argument("--alpha-re", type=float)
    ap.add_argument("--alpha-im", type=float)
    ap.add_argument("--beta-re", type=float)
    ap.add_argument("--beta-im", type=float)
    ap.add_argument("--t-min", type=float, help="start of the omega*t grid")
    ap.add_argument("--t-max", type=float, help="end of the omega*t grid")
    ap.add_argument("--t-steps", type=int)
    ap.add_argument("--dim", type=int, help="Fock levels kept")
    ap.add_argument("--methods", help=f"comma list from {','.join(METHODS)}")
    ap.add_argument("--dims", help="comma list of truncations for convergence")
    ap.add_argument("--out", help="output file (stdout if omitted)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--config", help="key=value file; flags override it")
    ap.add_argument("--serial", action="store_true", help="single thread, bitwise reproducible")
    ap.add_argument("--audit", action="store_true", help="decoherence: evaluate and compare all methods")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _merge(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        try:
            merged.update(read_config(args.config))
        except OSError as exc:
            raise SpecError(f"cannot read config: {exc}") from exc
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def spec_from_args(args: argparse.Namespace) -> SweepSpec:
    m = _merge(args)
    try:
        omega = float(m["omega"])
        omega_q = omega if m["omega_q"] is None else float(m["omega_q"])
        params = SystemParams(omega=omega, omega_q=omega_q, g=float(m["g"]), chi=float(m["chi"]))
        alpha = complex(float(m["alpha_re"]), float(m["alpha_im"]))
        beta = complex(float(m["beta_re"]), float(m["beta_im"]))
        methods = tuple(s.strip() for s in str(m["methods"]).split(",") if s.strip())
        dims = tuple(int(s) for s in str(m["dims"]).split(",") if s.strip())
        t_steps, dim = int(m["t_steps"]), int(m["dim"])
        t_min, t_max = float(m["t_min"]), float(m["t_max"])
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from exc
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if norm > 0 and abs(norm - 1.0) <= CLI_NORM_TOL:
        alpha, beta = alpha / math.sqrt(norm), beta / math.sqrt(norm)
    return SweepSpec(
        command=args.command, params=params, alpha=alpha, beta=beta, t_min=t_min, t_max=t_max,
        t_steps=t_steps, dim=dim, methods=methods, dims=dims, output_path=m["out"],
        format=m["format"],
    ).validate()


def write_outputs(res: SweepResult, spec: SweepSpec) -> None:
    if spec.format == "json":
        text = res.to_json()
        if spec.output_path:
            Path(spec.output_path).write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)
        return
    csv_text = res.to_csv()
    summary = json.dumps(res.summary(), indent=2, default=_json_default) + "\n"
    if spec.output_path:
        out = Path(spec.output_path)
        out.write_text(csv_text, encoding="utf-8", newline="\n")
        out.with_suffix(".json").write_text(summary, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(summary)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        threads = thread_count(args.serial)
    except (SpecError, ValueError) as exc:
        print(f"kerrjc: invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    log.info("running %s with %d thread(s)", spec.command, threads)
    try:
        res = run(spec, threads=threads, audit=args.audit)
    except SpecError as exc:
        print(f"kerrjc: invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (KerrJCError, ArithmeticError) as exc:
        print(f"kerrjc: numerical precondition failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    write_outputs(res, spec)
    return 0


if __name__ == "__main__":
    sys.exit(main())
