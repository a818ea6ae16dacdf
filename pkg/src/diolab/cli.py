"""Unified command-line front end.

One binary, one subcommand per experiment.  Every artifact embeds the
resolved configuration: CSV files start with a `# {...}` comment line
followed by a header row, JSON files carry a "config" block.  Runs are
deterministic in (config, seed) and independent of --threads; stochastic
subcommands require an explicit --seed (no silent entropy).

A JSON file passed via --config supplies defaults (keys use underscores,
e.g. {"alpha": "1/2", "upto": 40}); explicit flags win.  Exit codes:
0 success, 2 validation error, 3 failed --check assertion.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .core import ApproxFunction, DyadicPoint, rational_from_str, rational_to_str
from .counting import (CountingInstance, count_hits, gcd_error_sum, psi_sum,
                       schmidt_experiment)
from .kernels import KernelParams, build_coefficient_table, verify_coefficient_bounds
from .measures import (DecayModel, EmpiricalCloud, MeasureSpec, cantor_mu_hat_exact,
                       convergence_criteria_audit, decay_audit, lebesgue_mu_hat_exact,
                       sample_parallel, seq_audit_points, tau_exponent)
from .separation import certify_sequence
from .sequences import (DenominatorSequence, GrowthModel, PolyGrowthParams,
                        gen_geometric, gen_poly_growth, gen_poly_growth_prime,
                        gen_smooth)
from .series import NonnegSeries, log_bound_check, ratio_series_check

DEFAULT_THREADS_ENV = "DIOLAB_THREADS"


def _fail(msg: str) -> "NoReturn":  # noqa: F821
    print(f"error: {msg}", file=sys.stderr)
    sys.exit(2)


def _check_fail(msg: str) -> "NoReturn":  # noqa: F821
    print(f"check failed: {msg}", file=sys.stderr)
    sys.exit(3)


def _opt(args, name: str, default):
    v = getattr(args, name, None)
    return default if v is None else v


def _require(args, *names: str) -> None:
    """Arguments may arrive from flags or the --config file, so presence is
    validated here rather than by argparse."""
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) is None]
    if missing:
        _fail("missing required argument(s): " + ", ".join("--" + n for n in missing))


def _frac(value, name: str) -> Fraction:
    try:
        return rational_from_str(str(value))
    except (ValueError, ZeroDivisionError):
        _fail(f"cannot parse {name}={value!r} as a rational")


def _float_repr(v: float) -> str:
    return repr(float(v))


def _write_csv(path: str, config: dict, header: Sequence[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(config, sort_keys=True) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) if not isinstance(c, float) else _float_repr(c)
                              for c in row) + "\n")


def _write_json(path: Optional[str], config: dict, payload: dict) -> None:
    doc = {"config": config, "results": payload}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _psi_from_arg(value: str) -> ApproxFunction:
    value = value.strip()
    if value.startswith("{"):
        return ApproxFunction.from_json(value)
    kind, _, rest = value.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "constant":
            return ApproxFunction.constant(rational_from_str(parts[0]))
        if kind == "power":
            return ApproxFunction.power(rational_from_str(parts[0]), rational_from_str(parts[1]))
        if kind == "logpow":
            return ApproxFunction.logpow(rational_from_str(parts[0]), rational_from_str(parts[1]))
    except (IndexError, ValueError):
        pass
    _fail(f"cannot parse psi spec {value!r} (use JSON or constant:c | power:c:lam | logpow:c:beta)")


def _measure_from_arg(value: str) -> MeasureSpec:
    value = value.strip()
    if value.startswith("{"):
        doc = json.loads(value)
        kind = doc.get("kind")
        if kind == "lebesgue":
            return MeasureSpec.lebesgue()
        if kind == "poly_density":
            return MeasureSpec.poly_density(int(doc["degree"]))
        if kind == "cantor":
            return MeasureSpec.cantor(int(doc["base"]), doc["digits"])
        if kind == "cantor_smoothed":
            return MeasureSpec.cantor_smoothed(int(doc["base"]), doc["digits"], float(doc["sigma"]))
        if kind == "point_masses":
            return MeasureSpec.point_masses(
                [(rational_from_str(x), rational_from_str(w)) for x, w in doc["atoms"]])
        _fail(f"unknown measure kind {kind!r}")
    if value == "lebesgue":
        return MeasureSpec.lebesgue()
    kind, _, rest = value.partition(":")
    parts = rest.split(":") if rest else []
    if kind == "poly" and parts:
        return MeasureSpec.poly_density(int(parts[0]))
    if kind == "cantor" and len(parts) >= 2:
        return MeasureSpec.cantor(int(parts[0]), [int(d) for d in parts[1].split(".")])
    _fail(f"cannot parse measure spec {value!r}")


def _add_seq_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seq-file", help="sequence file (JSON header + one term per line)")
    p.add_argument("--seq-kind", choices=["geometric", "smooth", "poly", "poly-prime"],
                   help="generate the sequence inline instead")
    p.add_argument("--base", type=int, help="geometric base a >= 2")
    p.add_argument("--primes", help="comma-separated primes for --seq-kind smooth")
    p.add_argument("--rho1", help="block exponent rho1 (rational)")
    p.add_argument("--rho2", help="anchor exponent rho2 (rational)")
    p.add_argument("--c", help="anchor bracket divisor c (rational)")
    p.add_argument("--n1", type=int, help="first anchor")
    p.add_argument("--seq-seed", type=int, help="seed for the poly anchor draws")


def _load_seq(args, n_terms: int) -> DenominatorSequence:
    if args.seq_file:
        return DenominatorSequence.read(args.seq_file)
    kind = args.seq_kind
    if kind is None:
        _fail("need --seq-file or --seq-kind")
    if kind == "geometric":
        if args.base is None:
            _fail("--seq-kind geometric needs --base")
        return gen_geometric(args.base, n_terms)
    if kind == "smooth":
        if not args.primes:
            _fail("--seq-kind smooth needs --primes")
        return gen_smooth([int(p) for p in str(args.primes).split(",")], n_terms)
    if None in (args.rho1, args.rho2, args.c, args.n1):
        _fail(f"--seq-kind {kind} needs --rho1 --rho2 --c --n1")
    params = PolyGrowthParams(rho1=_frac(args.rho1, "rho1"), rho2=_frac(args.rho2, "rho2"),
                              c=_frac(args.c, "c"), n1=args.n1,
                              seed=args.seq_seed if args.seq_seed is not None else 0)
    if kind == "poly":
        if args.seq_seed is None:
            _fail("--seq-kind poly draws anchors at random: --seq-seed is required")
        return gen_poly_growth(params, n_terms)
    return gen_poly_growth_prime(params, n_terms)


def _seq_config(args, extra: dict) -> dict:
    doc = {k: getattr(args, k) for k in
           ("seq_file", "seq_kind", "base", "primes", "rho1", "rho2", "c", "n1", "seq_seed")
           if getattr(args, k, None) is not None}
    doc.update(extra)
    doc["version"] = __version__
    return doc


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, int(args.threads))
    return max(1, int(os.environ.get(DEFAULT_THREADS_ENV, "1")))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_gen_seq(args) -> int:
    _require(args, "seq-kind", "n", "output")
    n = int(args.n)
    if n < 1:
        _fail("need --n >= 1")
    seq = _load_seq_for_gen(args, n)
    terms = seq.prefix(n)
    if len(terms) < n:
        _fail(f"construction produced only {len(terms)} terms")
    if args.check:
        if any(b <= a for a, b in zip(terms, terms[1:])):
            _check_fail("sequence not strictly increasing")
        if args.seq_kind in ("poly", "poly-prime") and any(
                q <= m for m, q in enumerate(terms, start=1)):
            _check_fail("expected q_m > m for the block construction")
    seq.write(args.output, n)
    print(f"wrote {n} terms to {args.output}")
    return 0


def _load_seq_for_gen(args, n):
    ns = argparse.Namespace(seq_file=None, seq_kind=args.seq_kind, base=args.base,
                            primes=args.primes, rho1=args.rho1, rho2=args.rho2,
                            c=args.c, n1=args.n1, seq_seed=args.seq_seed)
    return _load_seq(ns, n)


def _cmd_check_separation(args) -> int:
    _require(args, "alpha", "upto")
    upto = int(args.upto)
    seq = _load_seq(args, upto)
    alpha = _frac(args.alpha, "alpha")
    m0 = int(_opt(args, "m0", 1))
    try:
        report = certify_sequence(seq, alpha, m0, upto, exhaustive=bool(args.exhaustive))
    except ValueError as exc:
        _fail(str(exc))
    config = _seq_config(args, {"alpha": rational_to_str(alpha), "m0": m0, "upto": upto,
                                "exhaustive": bool(args.exhaustive)})
    _write_json(args.output, config, report.to_dict())
    if args.check and not report.separated:
        _check_fail(f"violation at pair {report.first_violation()[:2]}")
    return 0


def _instance(args, horizon: int) -> CountingInstance:
    seq = _load_seq(args, horizon)
    psi = _psi_from_arg(args.psi)
    gamma = _frac(args.gamma, "gamma") if args.gamma is not None else Fraction(0)
    try:
        return CountingInstance(seq, psi, gamma, horizon)
    except (ValueError, IndexError) as exc:
        _fail(str(exc))


def _cmd_count(args) -> int:
    _require(args, "psi", "n", "x")
    horizon = int(args.n)
    inst = _instance(args, horizon)
    xs = str(args.x)
    if xs.startswith("0x"):
        x = DyadicPoint.from_hex(xs)
    else:
        x = DyadicPoint.from_fraction(_frac(xs, "x"), int(_opt(args, "bits", 128)))
    r = count_hits(x, inst)
    config = _seq_config(args, {"psi": args.psi, "gamma": args.gamma or "0",
                                "n": horizon, "x": x.to_hex()})
    _write_json(args.output, config, {"hits": r, "psi_sum": rational_to_str(psi_sum(inst))})
    return 0


def _cmd_gcd_term(args) -> int:
    _require(args, "psi", "n")
    horizon = int(args.n)
    inst = _instance(args, horizon)
    try:
        res = gcd_error_sum(inst, exact=bool(args.exact))
    except ValueError as exc:
        _fail(str(exc))
    config = _seq_config(args, {"psi": args.psi, "n": horizon, "exact": bool(args.exact)})
    payload = {"mode": res.mode,
               "value": rational_to_str(res.value) if res.mode == "exact" else res.value,
               "value_float": float(res.value),
               "error_bound": res.error_bound,
               "psi_sum": rational_to_str(psi_sum(inst))}
    _write_json(args.output, config, payload)
    return 0


def _cmd_schmidt(args) -> int:
    _require(args, "psi", "n", "samples", "output")
    horizon = int(args.n)
    if args.seed is None:
        _fail("--seed is required")
    inst = _instance(args, horizon)
    sampler = _measure_from_arg(_opt(args, "sampler", "lebesgue"))
    threads = _threads(args)
    try:
        report = schmidt_experiment(inst, sampler, int(args.samples), int(args.seed),
                                    epsilon=_frac(_opt(args, "epsilon", "1/10"), "epsilon"),
                                    band_k=float(_opt(args, "band_k", 5.0)), threads=threads,
                                    bits=int(_opt(args, "bits", 128)))
    except ValueError as exc:
        _fail(str(exc))
    config = _seq_config(args, {"psi": args.psi, "gamma": args.gamma or "0", "n": horizon,
                                "samples": int(args.samples), "seed": int(args.seed),
                                "epsilon": str(_opt(args, "epsilon", "1/10")),
                                "band_k": float(_opt(args, "band_k", 5.0)),
                                "sampler": _opt(args, "sampler", "lebesgue"),
                                "bits": int(_opt(args, "bits", 128))})
    rows = [(row.index, row.x.to_hex(), row.hits, row.ratio, row.normalized_deviation)
            for row in report.rows]
    _write_csv(args.output, config,
               ["sample_index", "x_hex", "R", "ratio", "normalized_deviation"], rows)
    if args.summary:
        _write_json(args.summary, config, report.summary_dict())
    print(f"wrote {len(rows)} samples to {args.output}; "
          f"mean R = {report.mean_hits:.3f}, expected {report.expected_mean:.3f}")
    if args.check:
        if report.in_band_fraction < float(_opt(args, "band_target", 0.9)):
            _check_fail(f"in-band fraction {report.in_band_fraction} < "
                        f"{_opt(args, 'band_target', 0.9)}")
        if not report.mean_within(3.0):
            _check_fail("sample mean of R outside 3 standard errors of the expectation")
    return 0


def _cmd_fourier_w(args) -> int:
    _require(args, "sign", "q", "eps", "psi", "kmax", "output")
    sign = {"+": 1, "-": -1}.get(args.sign)
    if sign is None:
        _fail("--sign must be + or -")
    try:
        params = KernelParams(q=int(args.q), gamma=_frac(_opt(args, "gamma", "0"), "gamma"),
                              eps=_frac(args.eps, "eps"), psi_q=_frac(args.psi, "psi"))
    except ValueError as exc:
        _fail(str(exc))
    k_max = int(args.kmax)
    table = build_coefficient_table(params, k_max, sign)
    config = {"sign": args.sign, "q": params.q, "gamma": rational_to_str(params.gamma),
              "eps": rational_to_str(params.eps), "psi": rational_to_str(params.psi_q),
              "kmax": k_max, "version": __version__}
    rows = [(k, c.real, c.imag) for k, c in sorted(table.entries.items())]
    _write_csv(args.output, config, ["k", "re", "im"], rows)
    print(f"wrote {len(rows)} nonzero coefficients to {args.output}")
    return 0


def _cmd_verify_bounds(args) -> int:
    _require(args, "q", "eps", "psi", "output")
    try:
        gamma = _frac(_opt(args, "gamma", "0"), "gamma")
        p1 = KernelParams(q=int(args.q), gamma=gamma,
                          eps=_frac(args.eps, "eps"), psi_q=_frac(args.psi, "psi"))
        p2 = None
        if args.q2 is not None:
            p2 = KernelParams(q=int(args.q2), gamma=gamma,
                              eps=_frac(args.eps2 or args.eps, "eps2"),
                              psi_q=_frac(args.psi2 or args.psi, "psi2"))
    except ValueError as exc:
        _fail(str(exc))
    report = verify_coefficient_bounds(p1, p2, s_trunc=int(_opt(args, "trunc", 4000)))
    config = {"q": int(args.q), "q2": args.q2, "eps": args.eps, "eps2": args.eps2,
              "psi": args.psi, "psi2": args.psi2, "gamma": rational_to_str(gamma),
              "trunc": int(_opt(args, "trunc", 4000)), "version": __version__}
    rows = [(c.name, c.measured, c.bound, c.margin, c.passed) for c in report.checks]
    _write_csv(args.output, config, ["name", "measured", "bound", "margin", "passed"], rows)
    print(f"{'all bounds hold' if report.passed else 'BOUND VIOLATION'}; table in {args.output}")
    if args.check and not report.passed:
        _check_fail("a coefficient bound failed")
    return 0


def _cmd_mu_hat(args) -> int:
    _require(args, "measure", "samples", "output")
    if args.seed is None:
        _fail("--seed is required")
    spec = _measure_from_arg(args.measure)
    count = int(args.samples)
    threads = _threads(args)
    points = sample_parallel(spec, count, int(args.seed), int(_opt(args, "bits", 128)), threads)
    cloud = EmpiricalCloud(points, spec=spec, seed=int(args.seed))
    ts = _parse_probes(args)
    config = {"measure": args.measure, "samples": count, "seed": int(args.seed),
              "bits": int(_opt(args, "bits", 128)), "probes": len(ts), "version": __version__}
    stderr = 1.0 / math.sqrt(count)
    rows = []
    for t in ts:
        v = cloud.mu_hat(t)
        rows.append((t, v.real, v.imag, stderr))
    _write_csv(args.output, config, ["t", "re", "im", "stderr"], rows)
    print(f"wrote {len(rows)} probes to {args.output}")
    return 0


def _parse_probes(args) -> List[int]:
    if args.t_list:
        return [int(t) for t in str(args.t_list).split(",")]
    if args.t_geom:
        ratio_s, _, t_max_s = str(args.t_geom).partition(":")
        ratio, t_max = float(ratio_s), int(t_max_s)
        ts, t = [], 1.0
        while t <= t_max:
            if not ts or int(t) != ts[-1]:
                ts.append(int(t))
            t *= ratio
        return ts
    _fail("need --t-list or --t-geom ratio:max")


def _cmd_decay_audit(args) -> int:
    _require(args, "model", "rho", "n-to")
    model = _parse_model(args.model)
    rho = _frac(args.rho, "rho")
    n_from, n_to = int(_opt(args, "n_from", 1)), int(args.n_to)
    seq = _load_seq(args, n_to)
    pts = seq_audit_points(seq, n_from, n_to)
    source = probe_ts = None
    if args.measure:
        if args.seed is None:
            _fail("probing an empirical measure requires --seed")
        spec = _measure_from_arg(args.measure)
        cloud = EmpiricalCloud.from_spec(spec, int(_opt(args, "samples", 10000)),
                                         int(args.seed), int(_opt(args, "bits", 128)))
        source = cloud.mu_hat
        probe_ts = _parse_probes(args)
    try:
        report = decay_audit(model, rho, pts, mu_hat_source=source, probe_ts=probe_ts,
                             slope_tol=float(_opt(args, "slope_tol", 0.05)))
    except ValueError as exc:
        _fail(str(exc))
    config = _seq_config(args, {"model": args.model, "rho": str(args.rho),
                                "n_from": n_from, "n_to": n_to,
                                "slope_tol": float(_opt(args, "slope_tol", 0.05)),
                                "measure": args.measure})
    payload = {"balance_max": report.balance_max,
               "balance_trend_slope": report.balance_trend_slope,
               "balance_ok": report.balance_ok,
               "probe_max": report.probe_max,
               "probe_trend_slope": report.probe_trend_slope,
               "probe_ok": report.probe_ok,
               "warnings": report.warnings}
    _write_json(args.output, config, payload)
    if args.check and not (report.balance_ok and report.probe_ok in (None, True)):
        _check_fail("decay audit trend exceeded tolerance")
    return 0


def _parse_model(value: str) -> DecayModel:
    kind, _, rest = str(value).partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "power":
            return DecayModel.power(float(parts[0]), float(parts[1]))
        if kind == "logpow":
            return DecayModel.logpow(float(parts[0]), float(parts[1]))
        if kind == "expsqrtlog":
            return DecayModel.expsqrtlog(float(parts[0]))
    except (IndexError, ValueError):
        pass
    _fail(f"cannot parse model {value!r} (power:c:a | logpow:c:a | expsqrtlog:c2)")


def _cmd_criteria_audit(args) -> int:
    _require(args, "kmax", "n", "output")
    n_max, k_max = int(args.n), int(args.kmax)
    seq = _load_seq(args, n_max)
    if args.exact == "lebesgue":
        source = lebesgue_mu_hat_exact
    elif args.exact and args.exact.startswith("cantor:"):
        _, base_s, digits_s = args.exact.split(":")
        base, digits = int(base_s), [int(d) for d in digits_s.split(".")]
        source = lambda t: cantor_mu_hat_exact(base, digits, t, depth=60)[0]  # noqa: E731
    elif args.measure:
        if args.seed is None:
            _fail("an empirical measure requires --seed")
        cloud = EmpiricalCloud.from_spec(_measure_from_arg(args.measure),
                                         int(_opt(args, "samples", 10000)),
                                         int(args.seed), int(_opt(args, "bits", 128)))
        source = cloud.mu_hat
    else:
        _fail("need --exact or --measure")
    report = convergence_criteria_audit(source, seq, k_max, n_max)
    config = _seq_config(args, {"kmax": k_max, "n": n_max, "exact": args.exact,
                                "measure": args.measure})
    terms = seq.prefix(n_max)
    rows = [(n, terms[n - 1], report.max_terms[n - 1], report.weighted_terms[n - 1],
             report.max_partials[n - 1], report.weighted_partials[n - 1])
            for n in range(1, n_max + 1)]
    _write_csv(args.output, config,
               ["n", "q_n", "max_term", "weighted_term", "max_partial", "weighted_partial"],
               rows)
    print(f"wrote {n_max} rows to {args.output}")
    return 0


def _cmd_tau(args) -> int:
    _require(args, "g", "lam")
    g = _frac(args.g, "g")
    lam = _frac(args.lam, "lam")
    try:
        tau = tau_exponent(GrowthModel("polynomial", g), ApproxFunction.power(1, lam))
    except Exception as exc:
        _fail(str(exc))
    config = {"g": str(args.g), "lam": str(args.lam), "version": __version__}
    _write_json(args.output, config, {"tau": rational_to_str(tau),
                                      "tau_float": float(tau),
                                      "clipped": rational_to_str(min(tau, Fraction(1)))})
    return 0


def _cmd_series_check(args) -> int:
    _require(args, "kind", "terms-file")
    try:
        terms = [rational_from_str(line) for line in
                 Path(args.terms_file).read_text().split() if line.strip()]
        series = NonnegSeries(terms)
    except (OSError, ValueError) as exc:
        _fail(str(exc))
    n = int(args.n) if args.n else len(series.terms)
    if args.kind == "ratio":
        if args.xi is None:
            _fail("--kind ratio needs --xi")
        res = ratio_series_check(series, _frac(args.xi, "xi"), n)
    else:
        res = log_bound_check(series, n)
    config = {"kind": args.kind, "xi": args.xi, "n": n,
              "terms_file": args.terms_file, "version": __version__}
    _write_json(args.output, config, {"partial_sum": res.partial_sum, "bound": res.bound,
                                      "passed": res.passed})
    if args.check and not res.passed:
        _check_fail("series bound violated (implementation bug or bad input)")
    return 0


def _cmd_manifest(args) -> int:
    _require(args, "run-dir")
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        _fail(f"{run_dir} is not a directory")
    artifacts = {}
    configs = {}
    seed = None
    for f in sorted(run_dir.iterdir()):
        if not f.is_file() or f.name == "manifest.json":
            continue
        data = f.read_bytes()
        artifacts[f.name] = hashlib.sha256(data).hexdigest()
        cfg = _embedded_config(f, data)
        if cfg is not None:
            configs[f.name] = cfg
            if seed is None and isinstance(cfg.get("seed"), int):
                seed = cfg["seed"]
    if not artifacts:
        _fail(f"no artifacts found in {run_dir}")
    config_hash = hashlib.sha256(
        json.dumps(configs, sort_keys=True).encode()).hexdigest()
    manifest = {"config_hash": config_hash, "seed": seed,
                "versions": {"python": platform.python_version(),
                             "diolab": __version__, "numpy": np.__version__},
                "artifacts": artifacts, "configs": configs}
    out = args.output or str(run_dir / "manifest.json")
    Path(out).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote manifest for {len(artifacts)} artifacts to {out}")
    return 0


def _embedded_config(path: Path, data: bytes) -> Optional[dict]:
    try:
        if path.suffix == ".json":
            return json.loads(data).get("config")
        first = data.split(b"\n", 1)[0]
        if first.startswith(b"# "):
            return json.loads(first[2:])
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None
    return None


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="diolab", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--config", help="JSON file with default argument values")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--check", action="store_true",
                       help="run the embedded assertions; exit 3 on failure")
        return p

    p = add("gen-seq", _cmd_gen_seq, help="generate a denominator sequence file")
    p.add_argument("--seq-kind", "--kind", dest="seq_kind",
                   choices=["geometric", "smooth", "poly", "poly-prime"])
    p.add_argument("--base", "--a", dest="base", type=int)
    p.add_argument("--primes")
    p.add_argument("--rho1")
    p.add_argument("--rho2")
    p.add_argument("--c")
    p.add_argument("--n1", type=int)
    p.add_argument("--seq-seed", "--seed", dest="seq_seed", type=int)
    p.add_argument("--n")
    p.add_argument("-o", "--output")

    p = add("check-separation", _cmd_check_separation, help="certify or refute separation")
    _add_seq_args(p)
    p.add_argument("--alpha", help="exponent as rational p/r")
    p.add_argument("--m0")
    p.add_argument("--upto")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("-o", "--output")

    p = add("count", _cmd_count, help="hit count R(x, N) for one point")
    _add_seq_args(p)
    p.add_argument("--psi")
    p.add_argument("--gamma")
    p.add_argument("--n")
    p.add_argument("--x", help="point as p/q or hex 0x..:bits")
    p.add_argument("--bits")
    p.add_argument("-o", "--output")

    p = add("gcd-term", _cmd_gcd_term, help="pairwise gcd correlation sum E(N)")
    _add_seq_args(p)
    p.add_argument("--psi")
    p.add_argument("--gamma")
    p.add_argument("--n")
    p.add_argument("--exact", action="store_true")
    p.add_argument("-o", "--output")

    p = add("schmidt-experiment", _cmd_schmidt, help="seeded counting experiment")
    _add_seq_args(p)
    p.add_argument("--psi")
    p.add_argument("--gamma")
    p.add_argument("--n")
    p.add_argument("--samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon")
    p.add_argument("--band-k")
    p.add_argument("--band-target")
    p.add_argument("--sampler")
    p.add_argument("--bits")
    p.add_argument("--threads", type=int)
    p.add_argument("-o", "--output", help="per-sample CSV")
    p.add_argument("--summary", help="optional JSON summary path")

    p = add("fourier-w", _cmd_fourier_w, help="kernel Fourier coefficients as CSV")
    p.add_argument("--sign")
    p.add_argument("--q")
    p.add_argument("--gamma")
    p.add_argument("--eps")
    p.add_argument("--psi", help="the value psi(q) as a rational")
    p.add_argument("--kmax")
    p.add_argument("-o", "--output")

    p = add("verify-bounds", _cmd_verify_bounds, help="margin table of coefficient bounds")
    p.add_argument("--q")
    p.add_argument("--q2")
    p.add_argument("--gamma")
    p.add_argument("--eps")
    p.add_argument("--eps2")
    p.add_argument("--psi")
    p.add_argument("--psi2")
    p.add_argument("--trunc")
    p.add_argument("-o", "--output")

    p = add("mu-hat", _cmd_mu_hat, help="empirical Fourier transform of a sampled measure")
    p.add_argument("--measure")
    p.add_argument("--samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--t-list")
    p.add_argument("--t-geom", help="geometric probe grid ratio:max")
    p.add_argument("--bits")
    p.add_argument("--threads", type=int)
    p.add_argument("-o", "--output")

    p = add("decay-audit", _cmd_decay_audit, help="balance condition audit")
    _add_seq_args(p)
    p.add_argument("--model", help="power:c:a | logpow:c:a | expsqrtlog:c2")
    p.add_argument("--rho")
    p.add_argument("--n-from")
    p.add_argument("--n-to")
    p.add_argument("--slope-tol")
    p.add_argument("--measure")
    p.add_argument("--samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--t-list")
    p.add_argument("--t-geom")
    p.add_argument("--bits")
    p.add_argument("-o", "--output")

    p = add("criteria-audit", _cmd_criteria_audit, help="truncated convergence criteria sums")
    _add_seq_args(p)
    p.add_argument("--kmax")
    p.add_argument("--n")
    p.add_argument("--exact", help="lebesgue | cantor:base:d1.d2")
    p.add_argument("--measure")
    p.add_argument("--samples")
    p.add_argument("--seed", type=int)
    p.add_argument("--bits")
    p.add_argument("-o", "--output")

    p = add("tau", _cmd_tau, help="critical exponent of the parametric family")
    p.add_argument("--g", help="growth exponent (rational)")
    p.add_argument("--lam", help="psi power exponent (rational)")
    p.add_argument("-o", "--output")

    p = add("series-check", _cmd_series_check, help="partial-sum lemma oracles")
    p.add_argument("--kind", choices=["ratio", "log"])
    p.add_argument("--xi")
    p.add_argument("--terms-file")
    p.add_argument("--n")
    p.add_argument("-o", "--output")

    p = add("manifest", _cmd_manifest, help="reproducibility manifest for a run directory")
    p.add_argument("--run-dir")
    p.add_argument("-o", "--output")

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    config_path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
    defaults = {}
    if config_path:
        try:
            defaults = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            _fail(f"cannot read config {config_path}: {exc}")
        if not isinstance(defaults, dict):
            _fail("config file must hold a JSON object")
    args = parser.parse_args(argv)
    # flags win; config fills value arguments left unset (boolean switches
    # like --check stay command-line only)
    for key, value in defaults.items():
        dest = key.replace("-", "_")
        if getattr(args, dest, "absent") is None:
            setattr(args, dest, value)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
