import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest

from palimpsest.cli import main


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    return json.loads(text)


@pytest.fixture
def bern_pair(tmp_path):
    # X ~ Bern(0.1), Y ~ Bern(0.3): not stationary
    path = tmp_path / "bern.json"
    path.write_text(json.dumps({"alphabet": ["0", "1"],
                                "joint": [["7/10", "1/5"], ["0", "1/10"]],
                                "storage_alphabet_size": 2}))
    return str(path)


def test_info_typewriter():
    doc = run_json("info", "typewriter", "--json")
    assert doc["H_X"] == doc["H_Y"] == 3.0
    assert doc["stationary"] is True
    assert doc["malleability_bound"]["1"] == "1/2"
    assert doc["H_Y_given_X"] == 1.5


def test_info_huffman_example_table():
    code, text = run("info", "huffman_example")
    assert code == 0
    rows = dict(line.split("\t") for line in text.strip().splitlines()[1:])
    assert rows["H_X"] == "1.75" and rows["bound_n1"] == "3/8"


def test_info_rejects_bad_sum(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"alphabet": ["a", "b"], "joint": [["1/2", "1/2"], ["1/2", "0"]]}')
    code, _ = run("info", str(bad))
    assert code == 2
    broken = tmp_path / "broken.json"
    broken.write_text('{"alphabet": ["a",\n "b"] "joint": []}')
    assert run("info", str(broken))[0] == 2
    assert run("info", str(tmp_path / "missing.json"))[0] == 2


def test_scheme_ppm_typewriter():
    doc = run_json("scheme", "typewriter", "--scheme", "ppm", "--n", "1")
    assert (doc["K"], doc["L"], doc["M"]) == ("8", "8", "1")
    assert doc["exact"] is True and doc["delta"] == "0"


def test_scheme_identity_binary(bern_pair):
    doc = run_json("scheme", bern_pair, "--scheme", "identity")
    assert (doc["K"], doc["L"], doc["M"]) == ("1", "1", "1/5")


def test_scheme_huffman_example():
    doc = run_json("scheme", "huffman_example", "--scheme", "huffman")
    assert doc["K"] == "7/4" and doc["M"] == "3/8"


def test_scheme_incremental_and_mc():
    doc = run_json("scheme", "huffman_example", "--scheme", "incremental")
    assert doc["K"] == "7/4" and doc["L"] == "47/16" and doc["M"] == "19/16"
    mc = run_json("scheme", "typewriter", "--scheme", "ppm", "--mc", "20000", "--seed", "7")
    assert mc["seed"] == 7 and mc["rng"] == "PCG64" and mc["exact"] is False
    assert abs(mc["M"] - 1) <= 3 * mc["halfwidth"]["M"] + 1e-12


def test_scheme_identity_needs_matching_alphabets():
    assert run("scheme", "typewriter", "--scheme", "identity")[0] == 2


@pytest.mark.parametrize("host,M,rho", [("hypercube:3", "1/2", "0")])
def test_embed_typewriter(host, M, rho):
    doc = run_json("embed", "typewriter", "--host", host)
    assert doc["M"] == M and doc["rho"] == rho and doc["verified"] is True
    assert (doc["K"], doc["L"]) == ("3", "3")


def test_embed_editprocess2():
    three = run_json("embed", "editprocess2", "--host", "hypercube:3")
    assert three["M"] == "19/40" and three["rho"] == "1/40" and three["proven_optimal"]
    assert sorted(sorted(e[:2]) for e in three["deleted_edges"]) == [["G", "k"], ["J", "c"]]
    assert all(e[2] == "1/80" for e in three["deleted_edges"])
    four = run_json("embed", "editprocess2", "--host", "hypercube:4")
    assert four["M"] == "9/20" and four["deleted_edges"] == []
    assert len(set(four["codebook"].values())) == 8


def test_embed_huffman_family_and_figure(tmp_path):
    fig = tmp_path / "embed.svg"
    doc = run_json("embed", "huffman_example", "--host", "levgraph:3",
                   "--labels", "huffman-family", "--figure", str(fig))
    assert (doc["K"], doc["L"], doc["M"]) == ("7/4", "7/4", "3/8")
    assert doc["family_size"] == 8 and doc["metric"] == "levenshtein"
    ET.parse(fig)


def test_embed_infeasible_exit_code():
    assert run("embed", "editprocess2", "--host", "hypercube:2")[0] == 4
    assert run("embed", "editprocess2", "--host", "torus:3")[0] == 2


def test_codebook_round_trip(tmp_path):
    for argv, metric in [(("embed", "editprocess2", "--host", "hypercube:3"), "hamming"),
                         (("scheme", "huffman_example", "--scheme", "huffman"), "levenshtein"),
                         (("scheme", "huffman_example", "--scheme", "incremental"),
                          "extended_hamming"),
                         (("scheme", "typewriter", "--scheme", "ppm", "--n", "2"), "hamming")]:
        book = tmp_path / "book.json"
        first = run_json(*argv, "--codebook-out", str(book))
        again = run_json("evaluate", argv[1], "--codebook", str(book), "--metric", metric)
        for k in ("K", "L", "M", "delta"):
            assert again[k] == first[k], (argv, k)


def test_evaluate_rejects_bad_codebook(tmp_path):
    book = tmp_path / "book.json"
    book.write_text('{"alphabet_size": 2, "block_n": 1, "codebook": {"q": "0"}}')
    assert run("evaluate", "typewriter", "--codebook", str(book))[0] == 2
    book.write_text("{not json")
    assert run("evaluate", "typewriter", "--codebook", str(book))[0] == 2


def test_frontier_stationary_single_point():
    code, text = run("frontier", "typewriter")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["K_loss"]) == float(rows[0]["L_loss"]) == 0


def test_frontier_bernoulli_curve(bern_pair, tmp_path):
    out = tmp_path / "f.csv"
    assert run("frontier", bern_pair, "--grid", "11", "--output", str(out))[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 11
    k = [float(r["K_loss"]) for r in rows]
    ell = [float(r["L_loss"]) for r in rows]
    assert k[0] == 0 and ell[-1] == 0
    assert all(a <= b + 1e-12 for a, b in zip(k, k[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(ell, ell[1:]))


def test_frontier_svg(bern_pair, tmp_path):
    code, text = run("frontier", bern_pair, "--out", "svg")
    assert code == 0
    root = ET.fromstring(text)
    assert root.get("width") == "800pt" and root.get("height") == "600pt"
    labels = {t.text for t in root.iter("{http://www.w3.org/2000/svg}text")}
    assert {"K", "L"} <= labels
    out = tmp_path / "f.svg"
    assert run("frontier", bern_pair, "--out", "svg", "--output", str(out))[0] == 0
    assert out.read_text() == text


def test_block_identity_source(tmp_path):
    same = tmp_path / "same.json"
    same.write_text(json.dumps({"alphabet": ["0", "1"], "joint": [["1/2", "0"], ["0", "1/2"]]}))
    doc = run_json("block", str(same), "--n", "8", "--delta", "1/10")
    assert doc["degree_min"] == doc["degree_max"] == 1
    assert doc["graph_edges"] == 0 and doc["self_loops"] == doc["T_X"]


def test_block_independent_source_needs_exponential_length(tmp_path):
    indep = tmp_path / "indep.json"
    indep.write_text(json.dumps({"alphabet": ["0", "1"], "joint": [["1/4", "1/4"], ["1/4", "1/4"]]}))
    doc = run_json("block", str(indep), "--n", "6", "--nK", "12")
    t5 = doc["theorem5"]
    assert t5["analytic_requirement"] == 64 and t5["analytic_ok"] is False


def test_block_graph_out_and_cap(tmp_path):
    g = tmp_path / "g.txt"
    doc = run_json("block", "typewriter", "--n", "2", "--delta", "1", "--graph-out", str(g))
    assert g.read_text().startswith(f"# vertices {doc['vertices']} edges {doc['graph_edges']}")
    assert run("block", "typewriter", "--n", "8")[0] == 3
    assert run("block", "typewriter", "--n", "2", "--delta", "x")[0] == 2


@pytest.mark.parametrize("argv", [
    ("info", "editprocess2", "--json"),
    ("scheme", "huffman_example", "--scheme", "huffman", "--n", "2"),
    ("scheme", "typewriter", "--scheme", "ppm", "--mc", "5000", "--seed", "3"),
    ("embed", "editprocess2", "--host", "hypercube:3"),
    ("frontier", "huffman_example", "--out", "svg"),
    ("block", "editprocess2", "--n", "3", "--nK", "9"),
])
def test_outputs_are_byte_identical(argv):
    a = run(*argv)
    b = run(*argv)
    assert a[0] == 0 and a == b
