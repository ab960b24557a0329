import json
import warnings

import pytest

from turan_workbench.cache import ResultCache
from turan_workbench.cli import (EXIT_BUDGET, EXIT_FOUND, EXIT_OK, EXIT_USAGE,
                                 cli_dispatch, load_graph, save_graph)
from turan_workbench.graphs import PartitionedGraph, canonical_json
from turan_workbench.zarankiewicz import ZarKey, z_exact


def run(capsys, *argv):
    code = cli_dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_formulas(capsys):
    code, out = run(capsys, "formulas", "turan", "--r", "3", "--k", "5")
    assert code == EXIT_OK and out.strip() == "8"
    code, out = run(capsys, "formulas", "g", "--n", "2", "--r", "2", "--k", "3",
                    "--t", "2", "--z", "3")
    assert out.strip() == "11"
    code, out = run(capsys, "formulas", "chromatic", "--k", "3", "--q", "4", "--t", "2")
    assert out.strip() == "3"


def test_usage_error_exit_code(capsys):
    assert cli_dispatch(["nonsense"]) == EXIT_USAGE
    assert cli_dispatch(["zar", "exact", "--t", "0", "--sizes", "2,2"]) == EXIT_USAGE


def test_graph_round_trip(tmp_path):
    g = PartitionedGraph([2, 2], [(0, 2), (1, 3)])
    p = tmp_path / "g.json"
    save_graph(g, p)
    raw = p.read_bytes()
    g2 = load_graph(p)
    save_graph(g2, p)
    assert p.read_bytes() == raw
    assert g2 == g


def test_load_rejects_intra_part_edge(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(canonical_json({"parts": [2, 2], "edges": [[0, 1]]}))
    with pytest.raises(Exception):
        load_graph(p)


def test_construct_and_check_free(tmp_path, capsys):
    out = tmp_path / "c4.json"
    code, _ = run(capsys, "construct", "c4free", "--n", "32", "--t", "2",
                  "--out", str(out))
    assert code == EXIT_OK
    manifest = json.loads((tmp_path / "c4.json.manifest.json").read_text())
    assert manifest["outputs"][str(out)]
    assert manifest["seed"] == 0
    code, _ = run(capsys, "check-free", str(out), "--pattern", "ktt", "--t", "2")
    assert code == EXIT_OK
    # an octahedron yields exit 1 plus a witness
    octa = tmp_path / "octa.json"
    g = PartitionedGraph([2, 2, 2],
                         [(u, v) for u in range(6) for v in range(u + 1, 6)
                          if u // 2 != v // 2])
    save_graph(g, octa)
    code, out_text = run(capsys, "check-free", str(octa), "--pattern", "kqt",
                         "--q", "3", "--t", "2", "--json")
    assert code == EXIT_FOUND
    assert json.loads(out_text)["verdict"] == "witness"


def test_check_free_budget_exit(tmp_path, capsys):
    big = tmp_path / "k9.json"
    g = PartitionedGraph([1] * 9, [(u, v) for u in range(9) for v in range(u + 1, 9)])
    save_graph(g, big)
    code, _ = run(capsys, "check-free", str(big), "--pattern", "kqt",
                  "--q", "3", "--t", "3", "--budget", "2")
    assert code == EXIT_BUDGET


def test_construct_manifest_deterministic(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        run(capsys, "construct", "template", "--r", "2", "--k", "3", "--n", "4",
            "--out", str(out))
    assert out1.read_bytes() == out2.read_bytes()
    m1 = json.loads((tmp_path / "a.json.manifest.json").read_text())
    m2 = json.loads((tmp_path / "b.json.manifest.json").read_text())
    assert list(m1["outputs"].values()) == list(m2["outputs"].values())


def test_construct_improved_cli(tmp_path, capsys):
    from turan_workbench.zarankiewicz import z_lower_construction
    b = tmp_path / "B.json"
    save_graph(z_lower_construction(32, 2).witness, b)
    out = tmp_path / "h.json"
    code, text = run(capsys, "construct", "improved", "--n", "32", "--r", "3",
                     "--k", "5", "--t", "2", "--class1", str(b),
                     "--out", str(out), "--json")
    assert code == EXIT_OK
    doc = json.loads(text)
    g = load_graph(out)
    assert doc["edges"] == g.edge_count()
    manifest = json.loads((tmp_path / "h.json.manifest.json").read_text())
    assert str(b) in manifest["inputs"]


def test_construct_stack_cli(tmp_path, capsys):
    out = tmp_path / "stack.json"
    code, text = run(capsys, "construct", "stack", "--a", "2", "--n", "2",
                     "--t", "2", "--out", str(out),
                     "--cache", str(tmp_path / "c.jsonl"), "--json")
    assert code == EXIT_OK
    doc = json.loads(text)
    assert doc["edges"] == 4
    g = load_graph(out)
    assert g.part_sizes == (2, 2, 2)


def test_zar_and_gaps_cli(tmp_path, capsys):
    code, text = run(capsys, "zar", "exact", "--sizes", "4,4", "--t", "2",
                     "--cache", str(tmp_path / "c.jsonl"), "--json")
    assert code == EXIT_OK and json.loads(text)["value"] == 9
    code, text = run(capsys, "zar", "lower", "--n", "7", "--t", "2", "--json")
    assert json.loads(text)["value"] == 21
    code, text = run(capsys, "gaps", "--t", "2", "--max", "3",
                     "--cache", str(tmp_path / "c.jsonl"), "--json")
    assert code == EXIT_OK and json.loads(text)["e3_asserted"]


def test_ex_cli(tmp_path, capsys):
    code, text = run(capsys, "ex", "turan", "--n", "1", "--k", "4", "--r", "2",
                     "--cache", str(tmp_path / "c.jsonl"), "--json")
    assert code == EXIT_OK and json.loads(text)["holds"]
    code, text = run(capsys, "ex", "exact", "--sizes", "2,2", "--q", "2",
                     "--t", "2", "--cache", str(tmp_path / "c.jsonl"), "--json")
    assert json.loads(text)["value"] == 3


def test_analyze_cli(tmp_path, capsys):
    from turan_workbench.constructions import TemplateSpec, build_template
    spec = TemplateSpec.standard(2, 3, 4)
    g = build_template(spec)
    gpath = tmp_path / "t.json"
    save_graph(g, gpath)
    spath = tmp_path / "spec.json"
    spath.write_text(canonical_json(spec.to_document()))
    code, text = run(capsys, "analyze", "closest-template", str(gpath),
                     "--r", "2", "--json")
    assert code == EXIT_OK and json.loads(text)["distance"] == 0
    code, text = run(capsys, "analyze", "classify", str(gpath), "--r", "2",
                     "--t", "2", "--spec", str(spath), "--epsilon", "1/2", "--json")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["ambiguous"] == []
    code, text = run(capsys, "analyze", "structure", str(gpath), "--r", "2",
                     "--t", "2", "--spec", str(spath), "--json")
    assert code == EXIT_OK and json.loads(text)["class1_ktt_free"]


def test_cache_path_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TURAN_WORKBENCH_CACHE", str(tmp_path / "env.jsonl"))
    cache = ResultCache()
    assert cache.path == tmp_path / "env.jsonl"
    z_exact(ZarKey.of((2, 2), 2), cache=cache)
    assert (tmp_path / "env.jsonl").exists()


def test_cache_round_trip_and_corruption(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResultCache(path)
    rec = z_exact(ZarKey.of((3, 3), 2), cache=cache)
    assert path.exists()
    hit = cache.get_zar(ZarKey.of((3, 3), 2))
    assert hit is not None and hit.value == rec.value
    # corrupt line is skipped with a warning, not silently repaired
    with open(path, "a") as fh:
        fh.write("{not json\n")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        hit2 = cache.get_zar(ZarKey.of((3, 3), 2))
    assert hit2 is not None and hit2.value == rec.value
    assert any("corrupt" in str(w.message) for w in caught)


def test_zar_and_ex_share_one_cache_file(tmp_path):
    from turan_workbench.extremal import ExInstance, ex_exact
    path = tmp_path / "cache.jsonl"
    cache = ResultCache(path)
    z_exact(ZarKey.of((3, 3), 2), cache=cache)
    ex_exact(ExInstance((1, 1, 1), 3, 1), cache=cache)
    types = [json.loads(line)["type"] for line in path.read_text().splitlines()]
    assert sorted(types) == ["ex", "zar"]
    assert cache.get_ex(ExInstance((1, 1, 1), 3, 1)).value == 2
    assert cache.get_zar(ZarKey.of((3, 3), 2)).value == 6


def test_cache_rejects_tampered_witness(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResultCache(path)
    z_exact(ZarKey.of((2, 2), 2), cache=cache)
    lines = path.read_text().splitlines()
    doc = json.loads(lines[0])
    doc["value"] += 1          # witness no longer matches the value
    path.write_text(json.dumps(doc) + "\n")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert cache.get_zar(ZarKey.of((2, 2), 2)) is None
    assert any("invalid" in str(w.message) for w in caught)
