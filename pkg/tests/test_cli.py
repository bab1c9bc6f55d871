import json
import re

import pytest

from shiftdecomp import graph as gm
from shiftdecomp.cli import main
from shiftdecomp.render import center_color, render_grid_svg

RECT = re.compile(r"<rect ")


@pytest.fixture
def path5(tmp_path):
    g = tmp_path / "p.el"
    assert main(["gen", "--kind", "path", "--n", "5", "-o", str(g)]) == 0
    shifts = tmp_path / "shifts.txt"
    shifts.write_text("0 0.3\n1 2.1\n2 0.5\n3 0.9\n4 1.7\n")
    return g, shifts


def run(*argv):
    return main([str(a) for a in argv])


def test_gen_path(tmp_path):
    out = tmp_path / "p.el"
    assert run("gen", "--kind", "path", "--n", 5, "-o", out) == 0
    assert out.read_text().splitlines()[0] == "p 5 4"


def test_gen_grid_and_gnp(tmp_path):
    assert run("gen", "--kind", "grid", "--rows", 30, "--cols", 40, "-o", tmp_path / "g.el") == 0
    with open(tmp_path / "g.el") as fh:
        g = gm.load_edgelist(fh)
    assert (g.n, g.m) == (1200, 30 * 39 + 40 * 29)
    assert run("gen", "--kind", "gnp", "--n", 30, "--p", 0.2, "--graph-seed", 4, "-o", tmp_path / "a.el") == 0
    assert run("gen", "--kind", "gnp", "--n", 30, "--p", 0.2, "--graph-seed", 4, "-o", tmp_path / "b.el") == 0
    assert (tmp_path / "a.el").read_bytes() == (tmp_path / "b.el").read_bytes()


@pytest.mark.slow
def test_gen_million_vertex_grid(tmp_path):
    out = tmp_path / "big.el"
    assert run("gen", "--kind", "grid", "--rows", 1000, "--cols", 1000, "-o", out) == 0
    with open(out) as fh:
        assert fh.readline() == "p 1000000 1998000\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--kind", "grid", "--rows", "0", "--cols", "3", "-o", "x"],
        ["gen", "--kind", "grid", "--rows", "3", "-o", "x"],
        ["gen", "--kind", "hexagon", "-o", "x"],
        ["gen", "--kind", "gnp", "--n", "4", "--p", "2", "-o", "x"],
    ],
)
def test_gen_bad_params(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_partition_with_injected_shifts(path5, tmp_path):
    g, shifts = path5
    labels, report = tmp_path / "l.txt", tmp_path / "r.json"
    rc = run("partition", g, "--beta", 0.5, "--shifts-file", shifts, "-o", labels, "--report", report)
    assert rc == 0
    assert labels.read_text() == "0 1\n1 1\n2 1\n3 3\n4 4\n"
    doc = json.loads(report.read_text())
    for key in ("n", "m", "beta", "seed", "retries", "cut_edges", "cut_fraction", "delta_max",
                "max_piece_radius", "levels", "edge_touches", "pieces"):
        assert key in doc
    assert doc["cut_edges"] == 2 and doc["cut_fraction"] == 0.5 and doc["pieces"] == 3


def test_partition_beta_above_half(path5, tmp_path):
    g, _ = path5
    assert run("partition", g, "--beta", 0.6, "-o", tmp_path / "l") == 2


def test_partition_single_vertex(tmp_path):
    g = tmp_path / "one.el"
    g.write_text("p 1 0\n")
    labels = tmp_path / "l.txt"
    assert run("partition", g, "--beta", 0.3, "-o", labels, "--report", tmp_path / "r") == 0
    assert labels.read_text() == "0 0\n"


def test_partition_parse_error(tmp_path):
    g = tmp_path / "bad.el"
    g.write_text("p 2 2\n0 1\n")
    assert run("partition", g, "--beta", 0.3, "-o", tmp_path / "l") == 2
    assert run("partition", tmp_path / "missing.el", "--beta", 0.3, "-o", tmp_path / "l") == 2


def test_partition_thresholds_unmet_writes_best(path5, tmp_path):
    g, _ = path5
    labels = tmp_path / "l.txt"
    rc = run("partition", g, "--beta", 0.5, "--cut-threshold", 1e-9, "--max-retries", 3,
             "--seed", 1, "-o", labels, "--report", tmp_path / "r.json")
    doc = json.loads((tmp_path / "r.json").read_text())
    if doc["cut_edges"] > 0:
        assert rc == 3 and doc["retries"] == 3 and doc["thresholds_met"] is False
    assert len(labels.read_text().splitlines()) == 5


def test_partition_end_to_end_determinism(tmp_path):
    g = tmp_path / "g.el"
    run("gen", "--kind", "grid", "--rows", 40, "--cols", 40, "-o", g)
    outs = []
    for i, threads in enumerate((1, 2, 4)):
        lab, rep = tmp_path / f"l{i}", tmp_path / f"r{i}"
        assert run("partition", g, "--beta", 0.05, "--seed", 2**64 - 1, "--threads", threads,
                   "--tiebreak", "permutation", "-o", lab, "--report", rep) == 0
        outs.append((lab.read_bytes(), rep.read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_sweep_csv(tmp_path):
    csv_out = tmp_path / "s.csv"
    assert run("sweep", "--kind", "grid", "--rows", 20, "--cols", 20, "--betas", "0.05,0.2",
               "--trials", 2, "--seed", 3, "-o", csv_out, "--render-dir", tmp_path / "svg") == 0
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "beta,trials,mean_cut_fraction,std_cut_fraction,mean_max_diameter,mean_delta_max,mean_retries"
    assert len(lines) == 3
    assert sorted(p.name for p in (tmp_path / "svg").iterdir()) == ["beta_0.05.svg", "beta_0.2.svg"]
    again = tmp_path / "t.csv"
    run("sweep", "--kind", "grid", "--rows", 20, "--cols", 20, "--betas", "0.05,0.2",
        "--trials", 2, "--seed", 3, "-o", again)
    assert again.read_bytes() == csv_out.read_bytes()


def test_sweep_single_trial_std_zero(tmp_path, path5):
    g, _ = path5
    out = tmp_path / "s.csv"
    assert run("sweep", "--graph", g, "--betas", "0.1", "--trials", 1, "-o", out) == 0
    row = out.read_text().splitlines()[1].split(",")
    assert row[1] == "1" and float(row[3]) == 0.0


def test_sweep_bad_input(tmp_path):
    out = tmp_path / "s.csv"
    assert run("sweep", "--kind", "path", "--n", 10, "--betas", "", "-o", out) == 2
    assert run("sweep", "--kind", "path", "--n", 10, "--betas", "0.9", "-o", out) == 2
    assert run("sweep", "--betas", "0.1", "-o", out) == 2
    assert run("sweep", "--kind", "path", "--n", 10, "--render-dir", tmp_path, "-o", out) == 2


def test_render(tmp_path):
    labels = tmp_path / "l.txt"
    labels.write_text("0 0\n")
    svg = tmp_path / "o.svg"
    assert run("render", "--rows", 1, "--cols", 1, "--labels", labels, "-o", svg) == 0
    assert len(RECT.findall(svg.read_text())) == 1
    assert run("render", "--rows", 2, "--cols", 1, "--labels", labels, "-o", svg) == 2
    assert run("render", "--rows", 1, "--cols", 1, "--labels", tmp_path / "nope", "-o", svg) == 2


def test_render_monochrome():
    svg = render_grid_svg(3, 4, [5] * 12)
    fills = set(re.findall(r'fill="(#[0-9a-f]{6})"', svg))
    assert fills == {center_color(5)}
    assert len(RECT.findall(svg)) == 12


def test_grid_render_workflow_small(tmp_path):
    g, lab, svg = tmp_path / "g.el", tmp_path / "l.txt", tmp_path / "o.svg"
    run("gen", "--kind", "grid", "--rows", 60, "--cols", 50, "-o", g)
    assert run("partition", g, "--beta", 0.05, "--seed", 7, "-o", lab, "--report", tmp_path / "r") == 0
    assert run("render", "--rows", 60, "--cols", 50, "--labels", lab, "-o", svg) == 0
    text = svg.read_text()
    assert len(RECT.findall(text)) == 60 * 50
    centers = {line.split()[1] for line in lab.read_text().splitlines()}
    assert len(set(re.findall(r'fill="(#[0-9a-f]{6})"', text))) <= len(centers)


def test_validate_cmd(path5, tmp_path, capsys):
    g, shifts = path5
    labels = tmp_path / "l.txt"
    run("partition", g, "--beta", 0.5, "--shifts-file", shifts, "-o", labels, "--report", tmp_path / "r")
    assert run("validate", g, labels, "--beta", 0.5) == 0
    labels.write_text("0 4\n1 1\n2 1\n3 3\n4 4\n")
    capsys.readouterr()
    assert run("validate", g, labels, "--beta", 0.5) == 4
    assert "violation:" in capsys.readouterr().out
    assert run("validate", g, tmp_path / "missing", "--beta", 0.5) == 2
    assert run("validate", tmp_path / "missing.el", labels, "--beta", 0.5) == 2
