"""Batch experiment runner.

    sigmacorr SUBCOMMAND [key=value ...] [--config FILE]

Config files hold one key=value per line; ``#`` starts a comment and a
``subcommand=`` line may name the subcommand.  Command-line pairs override the
file.  Results go to stdout (or ``out=PATH``) as CSV with a header row and
17 significant digits.  Exit status: 0 success, 1 a verification failed
(verify-all only), 2 invalid configuration, 3 a numeric or cost guard tripped.
"""
from __future__ import annotations

import argparse
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .realnum import DomainError, FixedReal, RangeError, parse_real

SUBCOMMANDS = ("paircorr", "spacing", "weyl", "xn", "theta-verify", "lattice-check", "sweep",
               "verify-all", "sigma-threshold")

PAIRCORR_MAX_N = 10**7
SWEEP_BUDGET = 5 * 10**8  # summed N log2 N over a sweep


class ConfigError(ValueError):
    """Invalid configuration; exit status 2."""


# ---------------------------------------------------------------------------
# value parsing

def _int(text: str) -> int:
    t = text.strip().replace("_", "")
    try:
        return int(t, 0)
    except ValueError:
        v = float(t)
        if not v.is_integer():
            raise ValueError(f"{text!r} is not an integer")
        return int(v)


def _float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf"):
        return math.inf
    return float(t)


def _list(conv):
    def parse(text: str):
        t = text.strip()
        if t == "":
            return []
        return [conv(part) for part in t.split(",") if part.strip() != ""]
    return parse


def _choice(*options):
    def parse(text: str):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t
    return parse


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, FixedReal):
        return v.to_hex()
    return str(v)


def _row(*values) -> str:
    return ",".join(_fmt(v) for v in values) + "\n"


REQUIRED = object()

SEQUENCE_KEYS = {
    "family": (_choice("power", "scaled_square", "uniform_random"), "power"),
    "alpha": (parse_real, "sqrt2"),
    "d": (_int, "2"),
    "seed": (_int, "0"),
}

SCHEMAS = {
    "paircorr": {**SEQUENCE_KEYS, "sigma": (_float, "1"), "a": (_float, "-0.5"), "b": (_float, "0.5"),
                 "N": (_int, REQUIRED), "chunks": (_int, "1")},
    "spacing": {**SEQUENCE_KEYS, "N": (_int, REQUIRED), "bins": (_int, "50"),
                "histogram": (_int, "0"), "plot": (str, "")},
    "weyl": {"alpha": (parse_real, "sqrt2"), "N": (_int, REQUIRED), "M": (_int, "0"),
             "mode": (_choice("sums", "check"), "sums"), "eps": (_float, "0.1")},
    "xn": {"alpha": (parse_real, "sqrt2"), "N": (_list(_int), REQUIRED), "sigma": (_float, "0.5"),
           "f": (_choice("gaussian", "triangle", "poisson"), "gaussian"),
           "method": (_choice("spectral", "direct", "both"), "spectral")},
    "theta-verify": {"identity": (_choice("all", "quarter", "cancellation", "bound"), "all"),
                     "cases": (_int, "50"), "bound_cases": (_int, "5"), "seed": (_int, "0"),
                     "b_lo": (_float, "0.1"), "b_hi": (_float, "5")},
    "lattice-check": {"check": (_choice("shortest", "count", "lipschitz", "height", "siegel",
                                        "first-estimate"), REQUIRED),
                      "alpha": (parse_real, "sqrt2"), "P": (_list(_float), "10"), "Q": (_float, "nan"),
                      "mu": (_float, "1"), "kappa": (_float, "nan"), "c": (_float, "nan"),
                      "C": (_float, "0.0625"), "Z": (_float, "nan"), "zeta": (_float, "nan"),
                      "u1": (_float, "0"), "u2": (_float, "0"), "sigma": (_float, "0.5"),
                      "eps": (_float, "0.1"), "N": (_list(_int), "100")},
    "sweep": {"target": (_choice("paircorr", "xn", "first-estimate"), "paircorr"),
              "alphas": (_list(parse_real), ""), "alpha_random": (_int, "0"),
              "family": (_choice("power", "scaled_square"), "power"),
              "alpha": (parse_real, "sqrt2"), "d": (_int, "2"), "seed": (_int, "0"),
              "sigma": (_float, "1"), "a": (_float, "-0.5"), "b": (_float, "0.5"),
              "N": (_list(_int), ""), "eps": (_float, "0.1"), "u": (_float, "0"),
              "f": (_choice("gaussian", "triangle", "poisson"), "gaussian"),
              "plot": (str, "")},
    "verify-all": {},
    "sigma-threshold": {"d": (_list(_float), REQUIRED)},
}


def parse_params(subcommand: str, pairs: dict) -> dict:
    """Validate keys and convert values; raises ConfigError naming the key."""
    schema = SCHEMAS[subcommand]
    out = {}
    for key in pairs:
        if key not in schema and key != "out":
            raise ConfigError(f"unknown key {key!r} for {subcommand}")
    for key, (conv, default) in schema.items():
        if key in pairs:
            text = pairs[key]
        elif default is REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        else:
            text = default
        try:
            out[key] = conv(text)
        except (ValueError, DomainError, ArithmeticError) as exc:
            raise ConfigError(f"invalid value for key {key!r}: {exc}") from exc
    return out


def read_config(path: str) -> dict:
    pairs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = text.split("=", 1)
            pairs[key.strip()] = value.strip()
    return pairs


def _split_pairs(tokens) -> dict:
    pairs = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        key, value = tok.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


# ---------------------------------------------------------------------------
# subcommands: each prepare_* validates and returns a runner writing to fh

def _sequence(p: dict, N: int):
    from .seqgen import SequenceSpec
    return SequenceSpec(p["family"], N, alpha=p["alpha"], d=p["d"], seed=p["seed"])


PAIRCORR_HEADER = "N,sigma,a,b,count,value\n"


def prepare_paircorr(p: dict):
    from .paircount import CorrelationQuery, count_pairs_sorted
    from .seqgen import generate
    if p["N"] > PAIRCORR_MAX_N:
        raise RangeError(f"cost guard: N <= {PAIRCORR_MAX_N}")
    spec = _sequence(p, p["N"])
    query = CorrelationQuery(p["sigma"], p["a"], p["b"], p["N"])
    if p["chunks"] < 1:
        raise ConfigError("invalid value for key 'chunks': must be positive")

    def run(fh):
        fh.write(PAIRCORR_HEADER)
        est = count_pairs_sorted(generate(spec), query, chunks=p["chunks"])
        fh.write(_row(query.N, query.sigma, query.a, query.b, est.ordered_pair_count, est.value))
    return run


def prepare_spacing(p: dict):
    from .paircount import distinct_gaps, spacing_measure
    from .seqgen import generate
    if p["N"] > PAIRCORR_MAX_N:
        raise RangeError(f"cost guard: N <= {PAIRCORR_MAX_N}")
    if p["N"] < 2:
        raise ConfigError("invalid value for key 'N': spacing needs N >= 2")
    if p["bins"] < 1:
        raise ConfigError("invalid value for key 'bins': must be positive")
    spec = _sequence(p, p["N"])

    def run(fh):
        theta = generate(spec)
        h = spacing_measure(theta, bins=p["bins"])
        if p["histogram"]:
            fh.write("bin_lo,bin_hi,mass,exponential_mass\n")
            lo, hi = h.bin_edges[:-1], h.bin_edges[1:]
            ref = np.exp(-lo) - np.exp(-hi)
            for row in zip(lo, hi, h.masses, ref):
                fh.write(_row(*row))
        else:
            fh.write("N,ks_distance,distinct_gaps,max_gap\n")
            fh.write(_row(spec.N, h.ks_distance, distinct_gaps(theta), float(h.gaps.max())))
        if p["plot"]:
            centers = 0.5 * (h.bin_edges[:-1] + h.bin_edges[1:])
            widths = np.diff(h.bin_edges)
            write_plot(p["plot"], centers, h.masses / widths)
    return run


def prepare_weyl(p: dict):
    from .spectral import emit_weyl_rows, weyl_inequality_check
    N = p["N"]
    M = p["M"] or N
    if N < 1 or M < 1:
        raise ConfigError("invalid value for key 'N': N and M must be positive")
    if N * M > 10**9:
        raise RangeError("cost guard: N * M <= 10^9")

    def run(fh):
        if p["mode"] == "sums":
            emit_weyl_rows(p["alpha"], np.arange(1, M + 1), N, fh)
        else:
            r = weyl_inequality_check(p["alpha"], M, N, p["eps"])
            fh.write("M,N,lhs,exponent,ratio_exponent,violation,diophantine\n")
            fh.write(_row(M, N, r.lhs, r.exponent, r.ratio_exponent, r.violation, r.diophantine))
    return run


def named_function(name: str):
    from .testfn import TestFunction
    return {"gaussian": TestFunction.gaussian, "triangle": TestFunction.triangle,
            "poisson": TestFunction.poisson_kernel}[name]()


XN_HEADER = "N,sigma,method,value,M,tail_bound\n"


def prepare_xn(p: dict):
    from .spectral import XN_DIRECT_MAX_N, xn_direct, xn_spectral
    Ns = p["N"]
    if any(n < 1 for n in Ns):
        raise ConfigError("invalid value for key 'N': must be positive")
    if p["method"] in ("direct", "both") and any(n > XN_DIRECT_MAX_N for n in Ns):
        raise RangeError(f"cost guard: direct evaluation needs N <= {XN_DIRECT_MAX_N}")
    if not 0 <= p["sigma"] < 2:
        raise ConfigError("invalid value for key 'sigma': must lie in [0, 2)")
    f = named_function(p["f"])
    methods = ["spectral", "direct"] if p["method"] == "both" else [p["method"]]

    def run(fh):
        fh.write(XN_HEADER)
        for n in Ns:
            for m in methods:
                r = (xn_spectral if m == "spectral" else xn_direct)(p["alpha"], f, p["sigma"], n)
                fh.write(_row(r.N, r.sigma, r.method, r.value, "" if r.M is None else r.M, r.tail_bound))
    return run


def random_theta_params(rng: np.random.Generator, b_lo: float, b_hi: float):
    from .theta import ThetaParams
    return ThetaParams(float(rng.uniform(-1, 1)), float(rng.uniform(b_lo, b_hi)),
                       tuple(rng.uniform(-1, 1, 2)), tuple(rng.uniform(-1, 1, 2)))


def prepare_theta_verify(p: dict):
    from .testfn import TestFunction2D
    from .theta import MIN_B_VERIFY, verify_bound_exp_sum, verify_cancellation, verify_quarter_rotation
    if not MIN_B_VERIFY <= p["b_lo"] <= p["b_hi"]:
        raise ConfigError(f"invalid value for key 'b_lo': need {MIN_B_VERIFY} <= b_lo <= b_hi")
    if p["cases"] < 0 or p["bound_cases"] < 0:
        raise ConfigError("invalid value for key 'cases': must be non-negative")
    which = p["identity"]

    def run(fh):
        rng = np.random.default_rng(p["seed"])
        fh.write("case,identity,frak_a,frak_b,residual\n")
        for k in range(p["cases"]):
            prm = random_theta_params(rng, p["b_lo"], p["b_hi"])
            if which in ("all", "quarter"):
                fh.write(_row(k, "quarter_rotation", prm.frak_a, prm.frak_b, verify_quarter_rotation(prm)))
            if which in ("all", "cancellation"):
                fh.write(_row(k, "cancellation", prm.frak_a, prm.frak_b, verify_cancellation(prm)))
        if which in ("all", "bound"):
            F = TestFunction2D.gaussian_window()
            for k in range(p["bound_cases"]):
                prm = random_theta_params(rng, p["b_lo"], p["b_hi"])
                fh.write(_row(k, "bound_exp_sum", prm.frak_a, prm.frak_b, verify_bound_exp_sum(prm, F)))
    return run


def first_estimate_parameters(N: float, sigma: float, eps: float) -> tuple:
    """(P, Q, Z, zeta) for the lattice-sum estimate at scale N."""
    return N, N ** -(1 + sigma + eps), N ** (1 + sigma + eps), 1.0 / N


def prepare_lattice_check(p: dict):
    from . import lattice as lt
    check = p["check"]
    if any(not P > 0 for P in p["P"]):
        raise ConfigError("invalid value for key 'P': must be positive")
    if not p["mu"] > 0:
        raise ConfigError("invalid value for key 'mu': must be positive")
    if check == "height" and any(P <= 2 / math.sqrt(3) for P in p["P"]):
        raise ConfigError("invalid value for key 'P': height check needs P > 2/sqrt(3)")
    if check == "first-estimate":
        if not p["sigma"] > 0:
            raise ConfigError("invalid value for key 'sigma': must be positive")
        if any(n ** (p["sigma"] + p["eps"]) > lt.FIRST_ESTIMATE_MAX_TERMS for n in p["N"]):
            raise RangeError("cost guard: N^(sigma+eps) <= 10^6")
    if check == "siegel" and not p["C"] > 0:
        raise ConfigError("invalid value for key 'C': must be positive")
    alpha = p["alpha"]
    # explicit (P, Q, Z, zeta) replace the first-estimate parameterisation
    custom = not any(math.isnan(p[k]) for k in ("Q", "Z", "zeta"))

    def opt(v):
        return None if math.isnan(v) else v

    def run(fh):
        if check in ("shortest", "count", "lipschitz"):
            fh.write({"shortest": "P,length,a_inv\n", "count": "P,mu,count\n",
                      "lipschitz": "P,mu,count,bound,ok\n"}[check])
            for P in p["P"]:
                L = lt.Lattice2D.delta(P, alpha)
                if check == "shortest":
                    _, a = lt.shortest_vector(L)
                    fh.write(_row(P, a, 1.0 / a))
                elif check == "count":
                    fh.write(_row(P, p["mu"], lt.count_in_disk(L, p["mu"])))
                else:
                    r = lt.check_lipschitz(L, p["mu"])
                    fh.write(_row(P, p["mu"], r.count, r.bound, r.ok))
        elif check == "height":
            fh.write("P,a_inv,bound,ok\n")
            for P in p["P"]:
                r = lt.check_height_bound(alpha, opt(p["kappa"]), opt(p["c"]), P)
                fh.write(_row(P, r.a_inv, r.bound, r.ok))
        elif check == "siegel":
            fh.write("N,P,Q,Z,zeta,lhs,rhs,ok\n")
            for n in p["N"]:
                if custom:
                    P, Q, Z, zeta = p["P"][0], p["Q"], p["Z"], p["zeta"]
                else:
                    P, Q, Z, zeta = first_estimate_parameters(n, p["sigma"], p["eps"])
                r = lt.check_siegel_estimate(P, Q, alpha, (p["u1"], p["u2"]), p["C"], Z, zeta)
                fh.write(_row(n, P, Q, Z, zeta, r.lhs, r.rhs, r.ok))
        else:
            fh.write(FIRST_ESTIMATE_HEADER)
            for n in p["N"]:
                r = lt.first_estimate_sum(alpha, p["sigma"], p["eps"], n, p["u1"])
                fh.write(_row(n, r.value, r.exponents[0], r.exponents[1], r.kappa_hat))
    return run


FIRST_ESTIMATE_HEADER = "N,value,exponent_1,exponent_2,kappa_hat\n"


def sigma_threshold(d: float) -> float:
    """2 + 2^-d - sqrt(1 + 4^-d); the d -> infinity limit is 1."""
    if math.isinf(d):
        return 1.0
    return 2.0 + 2.0 ** -d - math.sqrt(1.0 + 4.0 ** -d)


def prepare_sigma_threshold(p: dict):
    if any(not d >= 1 for d in p["d"]):
        raise ConfigError("invalid value for key 'd': must be at least 1")

    def run(fh):
        fh.write("d,sigma_threshold\n")
        for d in p["d"]:
            fh.write(_row(int(d) if d.is_integer() else d, sigma_threshold(d)))
    return run


# ---------------------------------------------------------------------------
# sweeps

def random_alphas(count: int, seed: int) -> list:
    """``count`` values in [0, 1) with 128 random bits each, reproducible from the seed."""
    gen = np.random.Generator(np.random.Philox(key=seed))
    words = gen.integers(0, 2**64, size=(count, 2), dtype=np.uint64)
    return [FixedReal((int(h) << 64) | int(l)) for h, l in words]


def _sweep_header(target: str) -> str:
    body = {"paircorr": PAIRCORR_HEADER, "xn": XN_HEADER, "first-estimate": FIRST_ESTIMATE_HEADER}[target]
    return "alpha," + body


def _sweep_point(args) -> str:
    target, params = args
    buf = io.StringIO()
    run = _PREPARE_POINT[target](params)
    run(buf)
    lines = buf.getvalue().splitlines(keepends=True)[1:]  # drop the per-point header
    return "".join(f"{params['alpha'].to_hex()},{line}" for line in lines)


def _point_paircorr(q):
    return prepare_paircorr(q)


def _point_xn(q):
    return prepare_xn(q)


def _point_first_estimate(q):
    return prepare_lattice_check(q)


_PREPARE_POINT = {"paircorr": _point_paircorr, "xn": _point_xn, "first-estimate": _point_first_estimate}


def sweep_points(p: dict) -> list:
    """The grid as (target, point-params) in output order: alpha-major, then N."""
    alphas = list(p["alphas"])
    if p["alpha_random"]:
        if p["alpha_random"] < 0:
            raise ConfigError("invalid value for key 'alpha_random': must be non-negative")
        alphas += random_alphas(p["alpha_random"], p["seed"])
    if not alphas and not p["alphas"] and not p["alpha_random"]:
        alphas = [p["alpha"]]
    target = p["target"]
    points = []
    cost = 0.0
    for alpha in alphas:
        for n in p["N"]:
            if target == "paircorr":
                q = {"family": p["family"], "alpha": alpha, "d": p["d"], "seed": p["seed"],
                     "sigma": p["sigma"], "a": p["a"], "b": p["b"], "N": n, "chunks": 1}
                cost += n * max(math.log2(n), 1.0)
            elif target == "xn":
                q = {"alpha": alpha, "N": [n], "sigma": p["sigma"], "f": p["f"], "method": "spectral"}
                cost += n * max(n ** (p["sigma"] + 0.1), 1.0)
            else:
                q = {"check": "first-estimate", "alpha": alpha, "P": [10.0], "Q": math.nan,
                     "mu": 1.0, "kappa": math.nan, "c": math.nan, "C": 0.0625, "Z": math.nan,
                     "zeta": math.nan, "u1": p["u"], "u2": 0.0, "sigma": p["sigma"],
                     "eps": p["eps"], "N": [n]}
                cost += 40.0 * n * n ** (p["sigma"] + p["eps"])
            _PREPARE_POINT[target](q)  # validate every point before any work starts
            points.append((target, q))
    if cost > SWEEP_BUDGET:
        raise RangeError(f"cost guard: sweep cost estimate {cost:.3g} exceeds {SWEEP_BUDGET:.3g}")
    return points


def worker_count() -> int:
    text = os.environ.get("WORKERS", "")
    if text.strip():
        try:
            n = int(text)
        except ValueError as exc:
            raise ConfigError(f"invalid value for WORKERS: {text!r}") from exc
        if n < 1:
            raise ConfigError("WORKERS must be at least 1")
        return n
    return max(1, min(8, os.cpu_count() or 1))


def prepare_sweep(p: dict):
    points = sweep_points(p)
    workers = worker_count()

    def run(fh):
        header = _sweep_header(p["target"])
        if workers == 1 or len(points) <= 1:
            parts = [_sweep_point(pt) for pt in points]
        else:
            with ProcessPoolExecutor(max_workers=min(workers, len(points))) as ex:
                parts = list(ex.map(_sweep_point, points))  # map keeps input order
        text = header + "".join(parts)
        fh.write(text)
        if p["plot"]:
            _plot_from_csv(text, p["plot"])
    return run


def _plot_from_csv(text: str, path: str) -> None:
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    ix, iy = header.index("N"), header.index("value")
    rows = [ln.split(",") for ln in lines[1:]]
    write_plot(path, [float(r[ix]) for r in rows], [float(r[iy]) for r in rows])


def write_plot(path: str, xs, ys) -> None:
    """Two whitespace-separated columns, one point per line."""
    with open(path, "w", encoding="ascii") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{float(x):.17g} {float(y):.17g}\n")


# ---------------------------------------------------------------------------
# verify-all: a fast pass over every experiment family

def prepare_verify_all(p: dict):
    def run(fh):
        fh.write("check,value,threshold,ok\n")
        rows = quick_checks()
        for name, value, threshold, ok in rows:
            fh.write(_row(name, value, threshold, ok))
        if not all(r[3] for r in rows):
            raise VerificationFailed()
    return run


class VerificationFailed(Exception):
    pass


def quick_checks() -> list:
    from . import lattice as lt
    from .paircount import CorrelationQuery, count_pairs_bruteforce, count_pairs_sorted, distinct_gaps
    from .realnum import GOLDEN, SQRT2
    from .seqgen import SequenceSpec, generate
    from .spectral import xn_direct, xn_spectral
    from .theta import verify_cancellation, verify_quarter_rotation

    rows = []
    rng = np.random.default_rng(0)
    mismatches = 0
    for _ in range(20):
        N = int(rng.integers(2, 300))
        theta = generate(SequenceSpec("power", N, alpha=random_alphas(1, int(rng.integers(1 << 30)))[0]))
        a = float(rng.uniform(-3, 3))
        q = CorrelationQuery(float(rng.uniform(0, 2)), a, a + float(rng.uniform(0, 3)), N)
        mismatches += count_pairs_sorted(theta, q).ordered_pair_count != count_pairs_bruteforce(theta, q).ordered_pair_count
    rows.append(("oracle_mismatches", mismatches, 0, mismatches == 0))
    worst = max(distinct_gaps(generate(SequenceSpec("power", N, alpha=al, d=1)))
                for al in (SQRT2, GOLDEN) for N in (10, 100, 1000))
    rows.append(("three_distance_max", worst, 3, worst <= 3))
    res = 0.0
    for _ in range(5):
        prm = random_theta_params(rng, 0.1, 5.0)
        res = max(res, verify_quarter_rotation(prm), verify_cancellation(prm))
    rows.append(("theta_residual", res, 1e-9, res < 1e-9))
    f = named_function("gaussian")
    gap = abs(xn_direct(SQRT2, f, 0.5, 200).value - xn_spectral(SQRT2, f, 0.5, 200).value)
    rows.append(("xn_direct_vs_spectral", gap, 1e-8, gap < 1e-8))
    bad = 0
    for _ in range(50):
        L = lt.random_unimodular(rng, 1.5)
        mu = float(rng.uniform(0.5, 4))
        bad += lt.count_in_disk(L, mu) != lt.count_in_disk_bruteforce(L, mu)
        bad += lt.shortest_vector(L)[1] != lt.shortest_vector_bruteforce(L)
    rows.append(("lattice_mismatches", bad, 0, bad == 0))
    t = sigma_threshold(2)
    err = abs(t - (9 - math.sqrt(17)) / 4)
    rows.append(("sigma_threshold_d2", t, 1e-12, err < 1e-12))
    return rows

PREPARE = {
    "paircorr": prepare_paircorr,
    "spacing": prepare_spacing,
    "weyl": prepare_weyl,
    "xn": prepare_xn,
    "theta-verify": prepare_theta_verify,
    "lattice-check": prepare_lattice_check,
    "sweep": prepare_sweep,
    "verify-all": prepare_verify_all,
    "sigma-threshold": prepare_sigma_threshold,
}


def run(subcommand: str, pairs: dict, sink=None, stderr=None) -> int:
    """Validate, execute and stream CSV to ``sink``; returns the exit status."""
    sink = sys.stdout if sink is None else sink
    stderr = sys.stderr if stderr is None else stderr
    try:
        if subcommand not in PREPARE:
            raise ConfigError(f"unknown subcommand {subcommand!r}")
        params = parse_params(subcommand, pairs)
        runner = PREPARE[subcommand](params)
    except (ConfigError, DomainError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except RangeError as exc:
        stderr.write(f"error: {exc}\n")
        return 3
    out_path = pairs.get("out")
    try:
        if out_path:
            buf = io.StringIO()
            runner(buf)
            with open(out_path, "w", encoding="ascii", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            runner(sink)
    except VerificationFailed:
        return 1
    except (RangeError, DomainError, OverflowError, MemoryError) as exc:
        stderr.write(f"error: numeric guard: {exc}\n")
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sigmacorr", description=__doc__.split("\n\n")[0])
    parser.add_argument("subcommand", nargs="?", help=", ".join(SUBCOMMANDS))
    parser.add_argument("params", nargs="*", help="key=value pairs")
    parser.add_argument("--config", help="file of key=value lines")
    args = parser.parse_args(argv)
    if args.subcommand and "=" in args.subcommand:
        # subcommand named in the config file; the first token is a parameter
        args.params.insert(0, args.subcommand)
        args.subcommand = None
    try:
        pairs = read_config(args.config) if args.config else {}
        pairs.update(_split_pairs(args.params))
    except (ConfigError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    sub = args.subcommand or pairs.pop("subcommand", None)
    pairs.pop("subcommand", None)
    if sub is None:
        parser.print_usage(sys.stderr)
        return 2
    return run(sub, pairs)


if __name__ == "__main__":
    sys.exit(main())
