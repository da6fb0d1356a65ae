import os
import subprocess
import sys

import numpy as np
import pytest

from specband.cli import run


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_simulate_arfima_reproducible(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run(["simulate", "arfima", "--d", "0.4", "--n", "2048",
                "--seed", "7", "-o", str(a)]) == 0
    assert run(["simulate", "arfima", "--d", "0.4", "--n", "2048",
                "--seed", "7", "-o", str(b)]) == 0
    assert _read(a) == _read(b)
    assert sum(1 for _ in open(a)) == 2049      # header + rows
    assert (tmp_path / "a.truth.csv").exists()
    assert not os.path.exists(str(a) + ".tmp")


def test_simulate_fcoint_outputs(tmp_path):
    base = tmp_path / "pair"
    assert run(["simulate", "fcoint", "--n", "512", "--seed", "3",
                "-o", str(base)]) == 0
    for suffix in (".x.csv", ".y.csv", ".truth.csv"):
        assert os.path.exists(str(base) + suffix)


def test_regress_output_layout(tmp_path):
    base = tmp_path / "pair"
    run(["simulate", "fcoint", "--n", "512", "--d", "0.45", "--du", "0.1",
         "--seed", "3", "-o", str(base)])
    out = tmp_path / "fit.csv"
    assert run(["regress", "--method", "wbls", "--wavelet-band", "5:6",
                "--levels", "6", "--x", str(base) + ".x.csv",
                "--y", str(base) + ".y.csv", "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == ("method,band,alpha,beta,se_alpha,se_beta,"
                        "residual_d,residual_d_se")
    cells = lines[1].split(",")
    assert cells[0] == "wbls"
    float(cells[3])    # beta parses


@pytest.mark.parametrize("method,extra", [
    ("ols", []),
    ("nbls", ["--fourier-band", "0.4:0.6"]),
    ("nbls", ["--fourier-band", "full"]),
    ("fmnbls", ["--fourier-band", "0.4:0.6"]),
])
def test_regress_methods(tmp_path, method, extra):
    base = tmp_path / "pair"
    run(["simulate", "fcoint", "--n", "1024", "--seed", "5", "-o", str(base)])
    out = tmp_path / f"{method}.csv"
    assert run(["regress", "--method", method, "--x", str(base) + ".x.csv",
                "--y", str(base) + ".y.csv", "-o", str(out)] + extra) == 0
    assert out.exists()


def test_memory_layout(tmp_path):
    x = tmp_path / "x.csv"
    run(["simulate", "arfima", "--d", "0.4", "--n", "1024", "--seed", "2",
         "-o", str(x)])
    out = tmp_path / "mem.csv"
    assert run(["memory", "--in", str(x), "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "q,m,d_hat,se"
    assert len(lines) == 4                      # q in {0.6, 0.7, 0.8}
    assert lines[1].split(",")[0] == "0.6"


def test_modwt_export(tmp_path):
    x = tmp_path / "x.csv"
    run(["simulate", "arfima", "--d", "0.1", "--n", "256", "--seed", "2",
         "-o", str(x)])
    out = tmp_path / "dec.csv"
    assert run(["modwt", "--in", str(x), "--levels", "4", "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "level,position,coefficient_type,value"
    assert len(lines) == 1 + 4 * 256 + 256


def test_rv_pipeline(tmp_path):
    ticks = tmp_path / "ticks.csv"
    run(["simulate", "jumpdiff", "--sigma", "0.2", "--eta", "5e-4",
         "--lambda", "1", "--xi-sd", "0.005", "--n", "4096", "--seed", "5",
         "-o", str(ticks)])
    out = tmp_path / "rv.csv"
    assert run(["rv", "--in", str(ticks), "--method", "jwtsrv",
                "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "date,rv,jv,jwtsrv,n_jumps"
    cells = lines[1].split(",")
    assert float(cells[1]) > 0.0
    assert float(cells[3]) != 0.0
    out2 = tmp_path / "rv2.csv"
    assert run(["rv", "--in", str(ticks), "--method", "rv",
                "-o", str(out2)]) == 0


def test_rv_resampled_daily(tmp_path):
    # datetime ticks spanning two days, 10-second spacing
    import csv
    base = np.datetime64("2021-05-03T09:30:00")
    path = tmp_path / "ticks.csv"
    rng = np.random.default_rng(8)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "price"])
        for day in range(2):
            t0 = base + np.timedelta64(day, "D")
            logp = np.cumsum(rng.normal(0, 1e-4, 2340))
            for k in range(2340):
                writer.writerow([str(t0 + np.timedelta64(10 * k, "s")),
                                 repr(float(100.0 * np.exp(logp[k])))])
    out = tmp_path / "daily.csv"
    assert run(["rv", "--in", str(path), "--method", "rv", "--resample", "5m",
                "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("2021-05-03,")
    assert lines[2].startswith("2021-05-04,")


def test_iv_measures(tmp_path):
    chain = tmp_path / "chain.csv"
    run(["simulate", "bschain", "--sigma", "0.2", "--tau-days", "30",
         "--lo", "60", "--hi", "140", "-o", str(chain)])
    truth = 0.2 ** 2 * 30 / 365
    values = {}
    for measure, extra in (("mfiv", ["--sd-mult", "5"]), ("civ1", []), ("civ2", [])):
        out = tmp_path / f"{measure}.csv"
        assert run(["iv", "--chains", str(chain), "--measure", measure,
                    "-o", str(out)] + extra) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "quote_date,tau_days,measure,implied_variance,implied_vol"
        values[measure] = float(lines[1].split(",")[3])
    assert 0.0 < values["civ1"] <= values["civ2"] <= values["mfiv"]
    assert abs(values["mfiv"] - truth) / truth < 0.02


def test_coherence_artifacts_and_determinism(tmp_path, monkeypatch):
    base = tmp_path / "pair"
    run(["simulate", "fcoint", "--n", "256", "--seed", "3", "-o", str(base)])
    out1 = tmp_path / "coh1"
    assert run(["coherence", "--x", str(base) + ".x.csv",
                "--y", str(base) + ".y.csv", "--mc", "100", "--seed", "1",
                "-o", str(out1)]) == 0
    csv1 = _read(str(out1) + ".csv")
    svg1 = _read(str(out1) + ".svg")
    monkeypatch.setenv("SPECBAND_THREADS", "4")
    out2 = tmp_path / "coh2"
    assert run(["coherence", "--x", str(base) + ".x.csv",
                "--y", str(base) + ".y.csv", "--mc", "100", "--seed", "1",
                "-o", str(out2)]) == 0
    assert csv1 == _read(str(out2) + ".csv")
    assert svg1 == _read(str(out2) + ".svg")


def test_svg_uniform_fill_for_perfect_coherence(tmp_path):
    from specband import wavelet_coherence
    from specband.plotting import emit_plot, _color
    x = np.cumsum(np.random.default_rng(1).normal(size=128))
    res = wavelet_coherence(x, x)
    path = tmp_path / "flat.svg"
    emit_plot(res, path)
    text = path.read_text()
    top = _color(1.0)
    fills = [seg.split('"')[1] for seg in text.split("fill=")[2:]
             if seg.startswith('"#')]
    cells = [f for f in fills if f not in ("#ffffff", "none")]
    assert cells and all(f == top for f in cells)


def test_svg_noise_mostly_outside_significance(tmp_path):
    from specband import mc_significance, wavelet_coherence
    from specband.coherence import CoherenceResult
    from specband.plotting import emit_plot
    T = 256
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=T), rng.normal(size=T)
    thr = mc_significance(x, y, n_surrogates=100, seed=4)
    res = wavelet_coherence(x, y)
    res = CoherenceResult(res.r2, res.phase, res.coi, res.scales, res.times,
                          res.dt, thr)
    path = tmp_path / "noise.svg"
    emit_plot(res, path)
    text = path.read_text()
    n_sig = text.count('class="sig"')
    n_cells = text.count("<rect") - n_sig - 1       # minus background rect
    assert n_sig / n_cells <= 0.10


def test_inputs_never_mutated(tmp_path):
    x = tmp_path / "x.csv"
    run(["simulate", "arfima", "--d", "0.3", "--n", "512", "--seed", "4",
         "-o", str(x)])
    before = _read(x)
    run(["memory", "--in", str(x), "-o", str(tmp_path / "m.csv")])
    run(["modwt", "--in", str(x), "--levels", "5", "-o", str(tmp_path / "d.csv")])
    run(["coherence", "--x", str(x), "--y", str(x), "--mc", "0",
         "-o", str(tmp_path / "c")])
    assert _read(x) == before


def test_exit_codes(tmp_path):
    assert run(["regress", "--nope"]) == 1                       # unknown flag
    assert run(["memory", "--in", str(tmp_path / "missing.csv"),
                "-o", str(tmp_path / "o.csv")]) == 1             # unreadable input
    flat = tmp_path / "flat.csv"
    flat.write_text("t,v\n" + "".join(f"{i},1.0\n" for i in range(300)))
    assert run(["memory", "--in", str(flat),
                "-o", str(tmp_path / "o.csv")]) == 2             # numeric failure


def test_console_entry_point(tmp_path):
    out = tmp_path / "x.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "specband.cli", "simulate", "arfima",
         "--d", "0.2", "--n", "128", "--seed", "1", "-o", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.exists()
