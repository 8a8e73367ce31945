import json
import struct

import numpy as np

from fbsp.cli import main, seed_derivation
from fbsp.graph import load


def test_seed_derivation_distinct_and_stable():
    assert seed_derivation(7, 0) != seed_derivation(7, 1)
    assert seed_derivation(7, 0) == seed_derivation(7, 0)
    seeds = {seed_derivation(7, t) for t in range(1000)}
    assert len(seeds) == 1000


def test_gen_writes_loadable_graph(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["gen", "--n", "12", "--seed", "3", "--out", str(out)]) == 0
    g = load(out)
    assert g.n == 12
    assert g.num_edges == 12 * 11


def test_sssp_reports(tmp_path):
    j = tmp_path / "r.json"
    c = tmp_path / "r.csv"
    rc = main(["sssp", "--n", "60", "--dist", "exp", "--algo", "fb",
               "--seed", "7", "--trials", "5",
               "--json", str(j), "--csv", str(c)])
    assert rc == 0
    payload = json.loads(j.read_text())
    assert len(payload["rows"]) == 5
    assert payload["aggregate"]["forward_scans"]["mean"] > 0
    lines = c.read_text().splitlines()
    assert len(lines) == 6  # header + 5 rows
    assert lines[0].startswith("trial,seed,algo,n,model")


def test_sssp_csv_is_reproducible(tmp_path):
    args = ["sssp", "--n", "40", "--algo", "fb", "--seed", "11",
            "--trials", "3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--csv", str(a)]) == 0
    assert main(args + ["--csv", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sssp_from_graph_file(tmp_path):
    gfile = tmp_path / "g.txt"
    main(["gen", "--n", "15", "--seed", "5", "--out", str(gfile)])
    j = tmp_path / "r.json"
    rc = main(["sssp", "--n", "15", "--graph", str(gfile), "--algo",
               "dijkstra", "--trials", "1", "--json", str(j)])
    assert rc == 0
    payload = json.loads(j.read_text())
    assert payload["rows"][0]["algo"] == "dijkstra"


def test_verify_accepts_own_tree(tmp_path):
    for mode in ("full", "forward", "fb"):
        assert main(["verify", "--n", "50", "--seed", "2", "--mode", mode,
                     "--algo", "fb"]) == 0


def test_apsp_matrix_dump(tmp_path):
    dump = tmp_path / "m.bin"
    j = tmp_path / "a.json"
    rc = main(["apsp", "--n", "18", "--seed", "4", "--threads", "2",
               "--dump", str(dump), "--json", str(j)])
    assert rc == 0
    blob = dump.read_bytes()
    assert blob[:8] == b"FBSPAPSP"
    (n,) = struct.unpack("<Q", blob[8:16])
    assert n == 18
    mat = np.frombuffer(blob[16:], dtype=np.float64).reshape(18, 18)
    assert np.all(np.diag(mat) == 0.0)
    payload = json.loads(j.read_text())
    assert payload["total_scans"] > 0


def test_sample_outputs(tmp_path):
    j = tmp_path / "s.json"
    c = tmp_path / "s.csv"
    rc = main(["sample", "--n", "80", "--trials", "20", "--seed", "3",
               "--tail-threshold", "0", "--json", str(j), "--csv", str(c)])
    assert rc == 0
    payload = json.loads(j.read_text())
    assert payload["tail"]["fraction"] == 1.0
    assert payload["aggregate"]["lambda_in"]["mean"] > 0
    lines = c.read_text().splitlines()
    assert lines[0] == ("trial,seed,n,directed,out_spt,in_spt,out_non_spt,"
                        "in_non_spt,total,lambda_in,lambda_out")
    assert len(lines) == 21


def test_bench_scan_scaling(tmp_path, capsys):
    j = tmp_path / "b.json"
    rc = main(["bench", "scan-scaling", "--algo", "fb", "--n", "50,100",
               "--trials", "2", "--seed", "1", "--json", str(j)])
    assert rc == 0
    table = json.loads(j.read_text())["table"]
    assert [row["n"] for row in table] == [50, 100]
    captured = capsys.readouterr().out
    assert "scans/n" in captured


def test_bench_verify_compare(tmp_path):
    j = tmp_path / "v.json"
    rc = main(["bench", "verify-compare", "--n", "128", "--trials", "3",
               "--seed", "5", "--json", str(j)])
    assert rc == 0
    summary = json.loads(j.read_text())["summary"]
    assert summary["forward_only_per_nlogn"] > 0.5
    assert summary["fb_per_n"] < 10


def test_invalid_usage_exits_1():
    assert main(["sssp", "--n", "10", "--pq", "binheap",
                 "--bucket-w", "0.5"]) == 1   # width without bucket pq
    assert main(["sssp", "--n", "10", "--dist", "weibull"]) == 1  # no shape
    assert main(["nonsense"]) == 1
    assert main(["sssp"]) == 1  # missing --n
    assert main(["gen", "--n", "0", "--out", "/tmp/x.txt"]) == 1
    assert main(["sssp", "--n", "10", "--trials", "0"]) == 1
    assert main(["sample", "--n", "10", "--trials", "-3"]) == 1


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FBSP_OUT_DIR", str(tmp_path))
    assert main(["gen", "--n", "8", "--seed", "1", "--out", "sub.txt"]) == 0
    assert (tmp_path / "sub.txt").exists()


def test_end_to_end_determinism(tmp_path):
    # full experiment rerun: identical CSV bytes, wall times only in JSON
    args = ["sample", "--n", "60", "--trials", "10", "--seed", "9"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--csv", str(a)]) == 0
    assert main(args + ["--csv", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
