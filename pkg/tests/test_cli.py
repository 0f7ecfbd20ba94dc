import csv
import io
import math

import pytest

from sigmacorr import cli
from sigmacorr.cli import main, random_alphas, run, sigma_threshold


def call(sub, **pairs):
    out, err = io.StringIO(), io.StringIO()
    rc = run(sub, {k: str(v) for k, v in pairs.items()}, out, err)
    return rc, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_paircorr_poissonian_regime():
    rc, out, _ = call("paircorr", alpha="sqrt2", d=2, sigma=1, a=-0.5, b=0.5, N=100000)
    assert rc == 0
    (r,) = rows(out)
    assert abs(float(r["value"]) - 1.0) < 0.1


def test_sigma_threshold_values():
    rc, out, _ = call("sigma-threshold", d="2,3")
    assert rc == 0
    vals = [float(r["sigma_threshold"]) for r in rows(out)]
    assert abs(vals[0] - (9 - math.sqrt(17)) / 4) < 1e-12
    assert abs(vals[1] - (2 + 2**-3 - math.sqrt(1 + 4**-3))) < 1e-15
    assert sigma_threshold(math.inf) == 1.0


def test_unknown_key_names_it():
    rc, out, err = call("paircorr", N=10, bogus=1)
    assert rc == 2 and "bogus" in err and out == ""


def test_missing_and_bad_values():
    assert call("paircorr")[0] == 2
    assert call("paircorr", N="ten")[0] == 2
    assert call("nosuch")[0] == 2
    assert call("paircorr", N=10, sigma=2.5)[0] == 2


def test_cost_guard():
    rc, _, err = call("paircorr", N=10**9)
    assert rc == 3 and "cost guard" in err


def test_numeric_guard_at_runtime():
    assert call("lattice-check", check="count", P="1", mu="1e6")[0] == 3


def test_out_file(tmp_path):
    path = tmp_path / "r.csv"
    rc, out, _ = call("sigma-threshold", d=2, out=path)
    assert rc == 0 and out == ""
    assert path.read_text().startswith("d,sigma_threshold\n2,1.2192235935955")


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# threshold table\nsubcommand = sigma-threshold\nd = 4\n")
    assert main(["--config", str(cfg)]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("4,")
    # command-line pairs override the file
    assert main(["--config", str(cfg), "d=5"]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("5,")


@pytest.mark.parametrize("sub,pairs", [
    ("spacing", dict(family="uniform_random", N=2000, histogram=1, bins=10)),
    ("weyl", dict(alpha="golden", N=100, M=5)),
    ("weyl", dict(alpha="sqrt2", N=200, M=50, mode="check")),
    ("xn", dict(N="100,200", method="both", f="triangle")),
    ("theta-verify", dict(cases=2, bound_cases=1)),
    ("lattice-check", dict(check="shortest", P="10,20")),
    ("lattice-check", dict(check="count", P=30, mu=3)),
    ("lattice-check", dict(check="lipschitz", P=100, mu=0.5)),
    ("lattice-check", dict(check="height", P="100,1000", kappa=2, c=0.25)),
    ("lattice-check", dict(check="siegel", N=100)),
    ("lattice-check", dict(check="first-estimate", N="50,100")),
])
def test_subcommands_run(sub, pairs):
    rc, out, err = call(sub, **pairs)
    assert rc == 0, err
    assert len(out.splitlines()) >= 2


def test_xn_methods_agree():
    rc, out, _ = call("xn", N=200, method="both", sigma=0.5)
    r = rows(out)
    assert abs(float(r[0]["value"]) - float(r[1]["value"])) < 1e-8


def test_sweep_empty_grid():
    rc, out, _ = call("sweep", target="paircorr", N="")
    assert rc == 0
    assert out == "alpha,N,sigma,a,b,count,value\n"


def test_sweep_is_order_stable(monkeypatch):
    pairs = dict(target="paircorr", alphas="sqrt2,golden", N="1000,3000")
    monkeypatch.setenv("WORKERS", "1")
    serial = call("sweep", **pairs)
    monkeypatch.setenv("WORKERS", "2")
    parallel = call("sweep", **pairs)
    assert serial == parallel
    assert [r["N"] for r in rows(serial[1])] == ["1000", "3000", "1000", "3000"]


def test_sweep_budget():
    assert call("sweep", target="paircorr", N="5000000,5000000,5000000,5000000,5000000")[0] == 3


def test_sweep_convergence_trend():
    rc, out, _ = call("sweep", target="paircorr", sigma=0.5, a=-1, b=1, N="1000,10000,100000")
    dev = [abs(float(r["value"]) - 2.0) for r in rows(out)]
    assert dev[0] > dev[1] > dev[2]


def test_random_alpha_sweep_mean():
    rc, out, _ = call("sweep", target="paircorr", alpha_random=24, seed=3, N=20000)
    vals = [float(r["value"]) for r in rows(out)]
    mean = sum(vals) / len(vals)
    sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
    assert abs(mean - 1.0) <= 3 * sd / math.sqrt(len(vals)) + 1e-3
    assert random_alphas(3, 3) == random_alphas(3, 3)


def test_verify_all():
    rc, out, _ = call("verify-all")
    assert rc == 0
    assert all(r["ok"] == "true" for r in rows(out))


def test_verify_all_failure_exit(monkeypatch):
    monkeypatch.setattr(cli, "quick_checks", lambda: [("fake", 1.0, 0.5, False)])
    assert call("verify-all")[0] == 1
