import os
import subprocess
import sys

import numpy as np
import pytest

from npcmi.cli import main
from npcmi.dataio import read_pairs

CONFIG = """copula=gaussian:0.7
marginals=normal,normal
n=64
grid_k=16
replicates=4
estimators=NPC_LL1,NPC_Naive,GC
seed=5
"""


def run_cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "npcmi.cli", *map(str, args)],
        capture_output=True,
        text=True,
        env={**os.environ, **(env or {})},
    )


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "g.csv"
    assert main(["generate", "--copula", "gaussian:0.9", "--n", "512", "--seed", "3", "-o", str(path)]) == 0
    return path


class TestGenerate:
    def test_continuous(self, dataset):
        data = read_pairs(dataset)
        assert data.shape == (512, 2)
        assert np.corrcoef(data.T)[0, 1] > 0.8

    def test_reproducible(self, tmp_path, dataset):
        again = tmp_path / "again.csv"
        main(["generate", "--copula", "gaussian:0.9", "--n", "512", "--seed", "3", "-o", str(again)])
        assert again.read_bytes() == dataset.read_bytes()

    def test_poisson_header(self, tmp_path):
        path = tmp_path / "p.csv"
        args = ["generate", "--copula", "gaussian:0.5", "--marginals", "poisson:20,poisson:20", "--n", "50", "--header", "-o", str(path)]
        assert main(args) == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y" and "." not in lines[1]

    def test_bad_copula(self, tmp_path, capsys):
        assert main(["generate", "--copula", "frank:2", "--n", "5", "-o", str(tmp_path / "x.csv")]) == 2
        assert "frank" in capsys.readouterr().err


class TestEstimate:
    def test_record(self, dataset, capsys):
        assert main(["estimate", str(dataset), "--grid-k", "30"]) == 0
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert out["method"] == "NPC_LL" and float(out["mi_bits"]) > 0.8
        assert "runtime_s" in out

    def test_gc_csv_row(self, dataset, capsys):
        assert main(["estimate", str(dataset), "--method", "gc", "--csv-row"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[-2].startswith("method,entropy_mode,mi_bits")
        assert lines[-1].startswith("GC_Parametric,")

    def test_monte_carlo(self, dataset, capsys):
        assert main(["estimate", str(dataset), "--grid-k", "30", "--mc", "--mc-samples", "5000"]) == 0
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert float(out["ci95_lo"]) <= float(out["mi_bits"]) <= float(out["ci95_hi"])

    def test_discrete(self, tmp_path, capsys):
        path = tmp_path / "d.csv"
        main(["generate", "--copula", "gaussian:0.5", "--marginals", "poisson:20,poisson:20", "--n", "256", "-o", str(path)])
        assert main(["estimate", str(path), "--discrete", "--grid-k", "30"]) == 0

    def test_independence_file(self, tmp_path, capsys):
        path = tmp_path / "i.csv"
        main(["generate", "--copula", "independence", "--n", "1024", "--seed", "2", "-o", str(path)])
        assert main(["estimate", str(path)]) == 0
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert float(out["mi_bits"]) <= 0.1

    def test_gc_closed_form(self, tmp_path, capsys):
        path = tmp_path / "g9.csv"
        main(["generate", "--copula", "gaussian:0.9", "--n", "4096", "--seed", "4", "-o", str(path)])
        assert main(["estimate", str(path), "--method", "gc"]) == 0
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert float(out["mi_bits"]) == pytest.approx(1.198, abs=0.05)

    def test_malformed(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,oops\n")
        assert main(["estimate", str(path)]) == 1
        assert f"{path}:2:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["estimate", str(tmp_path / "none.csv")]) == 1

    def test_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main(["estimate"])
        assert info.value.code == 2


class TestBenchmark:
    def test_threads_byte_identical(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(CONFIG)
        blobs = []
        for threads in ("1", "8"):
            out = tmp_path / f"t{threads}.csv"
            proc = run_cli("benchmark", cfg, "-o", out, env={"NPC_THREADS": threads})
            assert proc.returncode == 0, proc.stderr
            blobs.append((out.read_bytes(), (tmp_path / f"t{threads}_raw.csv").read_bytes()))
        assert blobs[0] == blobs[1]
        assert blobs[0][0].count(b"\n") == 4

    def test_no_output(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(CONFIG)
        assert main(["benchmark", str(cfg)]) == 2

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("copula=gaussian:0.5\nwat=1\n")
        assert main(["benchmark", str(cfg), "-o", str(tmp_path / "m.csv")]) == 2

    def test_bad_threads(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(CONFIG)
        proc = run_cli("benchmark", cfg, "-o", tmp_path / "m.csv", env={"NPC_THREADS": "x"})
        assert proc.returncode == 2
