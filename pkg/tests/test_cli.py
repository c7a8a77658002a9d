import csv
import json

import numpy as np
import pytest

from dysonsampler.cli import main
from dysonsampler.config import ConfigError, ExperimentFile, parse_text
from dysonsampler.unitary import parse_matrix

BASE = """\
# small quartic run
potential.q = 1
potential.g = 1
n = 6
dt = 1/72
t_end = 0.5
trials = 8
seed = 42
"""


def write_cfg(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_csv(path):
    with open(path) as f:
        return list(csv.reader(f))


def test_parse_examples():
    v = parse_text("dt = 1/5000  # comment\nsnapshot_times = 0:1:3\ngap.thetas = 0.1, 0.2\n\n")
    assert v["dt"] == 1 / 5000
    assert v["snapshot_times"] == (0.0, 0.5, 1.0)
    assert v["gap.thetas"] == (0.1, 0.2)
    for bad in ["bogus = 1", "n = 1\nn = 2", "n = 2.5", "dt = abc", "coulomb = fmm", "just text"]:
        with pytest.raises(ConfigError):
            parse_text(bad)


def test_config_to_simulation():
    exp = ExperimentFile.from_text(BASE + "coulomb = treecode\ncoulomb.order = 12\n")
    cfg = exp.simulation()
    assert cfg.n == 6 and cfg.trials == 8 and cfg.master_seed == 42
    assert cfg.scheme.method.kind == "treecode" and cfg.scheme.method.expansion_order == 12
    assert exp.use_finite_reference()
    with pytest.raises(ConfigError):
        ExperimentFile.from_text("n = 4\n").simulation()
    with pytest.raises(ConfigError):
        ExperimentFile.from_text(BASE + "beta = -1\n").simulation()


def test_simulate_single_snapshot(tmp_path):
    cfg = write_cfg(tmp_path, BASE.replace("t_end = 0.5", "t_end = 0"))
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--output", str(out)]) == 0
    samples = sorted(p.name for p in out.glob("samples_t*.csv"))
    assert samples == ["samples_t0.csv"]
    rows = read_csv(out / "samples_t0.csv")
    assert rows[0] == ["lambda"] and len(rows) == 1 + 6 * 8
    ks = read_csv(out / "ks.csv")
    assert ks[0] == ["t", "D"] and len(ks) == 2 and 0 <= float(ks[1][1]) <= 1
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 42 and man["reference_law"] == "finite"


def test_simulate_rerun_and_threads_identical(tmp_path):
    cfg = write_cfg(tmp_path, BASE + "snapshot_times = 0, 0.25, 0.5\n")
    outs = []
    for k, threads in enumerate(["1", "1", "3"]):
        out = tmp_path / f"run{k}"
        assert main(["simulate", "--config", str(cfg), "--output", str(out), "--threads", threads]) == 0
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert len([n for n in names if n.startswith("samples_t")]) == 3
    for name in names:
        if name == "manifest.json":
            continue
        first = (outs[0] / name).read_bytes()
        assert all((o / name).read_bytes() == first for o in outs[1:]), name


def test_seed_override_changes_output(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    main(["simulate", "--config", str(cfg), "--output", str(tmp_path / "a")])
    main(["simulate", "--config", str(cfg), "--output", str(tmp_path / "b"), "--seed", "43"])
    assert (tmp_path / "a/ks.csv").read_bytes() != (tmp_path / "b/ks.csv").read_bytes()


def test_exact_tables(tmp_path):
    cfg = write_cfg(tmp_path, BASE + "table.points = 41\n")
    out = tmp_path / "tables"
    assert main(["exact-tables", "--config", str(cfg), "--output", str(out)]) == 0
    lim = np.array(read_csv(out / "limiting.csv")[1:], dtype=float)
    fin = np.array(read_csv(out / "finite.csv")[1:], dtype=float)
    assert lim.shape == (41, 3) and fin.shape == (41, 3)
    assert lim[0, 2] == 0 and lim[-1, 2] == 1
    assert np.all(np.diff(fin[:, 2]) >= 0)
    assert fin[20, 2] == pytest.approx(0.5, abs=1e-9)


def test_exact_tables_without_finite(tmp_path):
    cfg = write_cfg(tmp_path, "potential.q = 0\npotential.g = 1\nn = 64\ntable.points = 11\n")
    out = tmp_path / "t"
    assert main(["exact-tables", "--config", str(cfg), "--output", str(out)]) == 0
    assert not (out / "finite.csv").exists()


def test_gap(tmp_path):
    cfg = write_cfg(tmp_path, BASE + "gap.thetas = 0.05, 0.1, 0.5\n")
    out = tmp_path / "gap"
    assert main(["gap", "--config", str(cfg), "--output", str(out)]) == 0
    rows = read_csv(out / "gap.csv")
    assert rows[0] == ["theta", "A", "empirical_gap"] and len(rows) == 4
    a = [float(r[1]) for r in rows[1:]]
    assert a == sorted(a, reverse=True)


def test_sample_matrix(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    out = tmp_path / "mats"
    assert main(["sample-matrix", "--config", str(cfg), "--output", str(out), "--count", "2"]) == 0
    m = parse_matrix((out / "matrix_1.txt").read_text())
    assert m.shape == (6, 6)
    np.testing.assert_allclose(m, m.conj().T, atol=0)
    empty = tmp_path / "none"
    assert main(["sample-matrix", "--config", str(cfg), "--output", str(empty), "--count", "0"]) == 0
    assert not list(empty.glob("matrix_*"))


def test_sample_matrix_rejects_beta(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE + "beta = 1\n")
    assert main(["sample-matrix", "--config", str(cfg), "--output", str(tmp_path / "x")]) == 2
    assert "beta" in capsys.readouterr().err


def test_bench_coulomb(tmp_path):
    out = tmp_path / "bench"
    assert main(["bench-coulomb", "--sizes", "64,128", "--repeats", "1", "--output", str(out)]) == 0
    rows = read_csv(out / "bench_coulomb.csv")
    assert rows[0] == ["N", "method", "wall_ns", "max_rel_err"]
    assert [(r[0], r[1]) for r in rows[1:]] == [("64", "naive"), ("64", "treecode"),
                                                 ("128", "naive"), ("128", "treecode")]
    assert all(float(r[3]) < 1e-8 for r in rows[1:])


def test_blowup_writes_nothing(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE.replace("trials = 8", "trials = 1")
                    + "init = explicit\ninit.values = -1e200, 0, 1, 2, 3, 1e200\n")
    out = tmp_path / "boom"
    assert main(["simulate", "--config", str(cfg), "--output", str(out)]) == 1
    assert not out.exists() or not any(out.iterdir())
    assert "error" in capsys.readouterr().err


def test_missing_config(capsys):
    assert main(["simulate"]) == 2
