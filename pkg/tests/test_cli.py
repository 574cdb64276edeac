import json
import re
import xml.etree.ElementTree as ET
from collections import Counter

import pytest

from thhmay.chart import ChartModel, Dot, Stroke, chart_from_page, render_ascii, render_svg
from thhmay.cli import main, report
from thhmay.scenarios import run

SVG = "{http://www.w3.org/2000/svg}"


def ascii_multiset(text):
    grid = text.split("\n\nstrokes:")[0]
    out = Counter()
    offset = 0
    for block in grid.split("\n\n"):
        width = 0
        for line in block.splitlines():
            m = re.match(r"^\s*(\d+) \|(.*)$", line)
            if not m:
                continue
            t, cells = int(m.group(1)), m.group(2)
            width = len(cells)
            for i, ch in enumerate(cells):
                if ch == "o":
                    out[(offset + i, t)] += 1
                elif ch.isdigit():
                    out[(offset + i, t)] += int(ch)
        offset += width
    return out


def svg_multiset(text):
    root = ET.fromstring(text.encode())
    return Counter((int(c.get("data-s")), int(c.get("data-t")))
                   for c in root.iter(SVG + "circle"))


@pytest.fixture(scope="module")
def v1_chart():
    (res,) = run("v1-may", 3, 36).values()
    return chart_from_page(res.pages[res.chart_page])


def test_ascii_and_svg_agree(v1_chart):
    want = Counter({k: n for k, n in v1_chart.dot_multiset().items()})
    assert ascii_multiset(render_ascii(v1_chart)) == want
    assert svg_multiset(render_svg(v1_chart)) == want


def test_v1_chart_columns(v1_chart):
    cols = v1_chart.column_counts()
    assert sorted(s for s in cols if s <= 21) == [0, 3, 12, 13, 15, 16, 17, 18, 20, 21]
    assert all(cols[s] == 1 for s in cols if s <= 21)
    assert cols[30] == 2
    root = ET.fromstring(render_svg(v1_chart).encode())
    lines = [l for l in root.iter(SVG + "line") if l.get("class") == "stroke"]
    assert lines
    assert "d_2: (17, 1) -> (16, 3)" in render_ascii(v1_chart)


def test_small_charts():
    one = ChartModel([Dot(0, 0, "1", 1)])
    assert render_ascii(one).count("o") == 1
    assert len(list(ET.fromstring(render_svg(one).encode()).iter(SVG + "circle"))) == 1
    empty = render_ascii(ChartModel())
    assert "|" in empty and "o" not in empty
    two = ChartModel([Dot(2, 1, "a, b", 2)])
    assert "2" in render_ascii(two).splitlines()[0]
    with pytest.raises(ValueError):
        ChartModel([Dot(0, 0, "", 1)], [Stroke((0, 0), (1, 1), 1)])


def test_json_report_round_trip(tmp_path):
    assert main(["--scenario", "v1-may", "--max-degree", "30", "--emit", "json",
                 "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "v1-may-p3-N30.json").read_text())
    (res,) = run("v1-may", 3, 30).values()
    assert doc == json.loads(json.dumps(report(res)))
    assert doc["prime"] == 3 and doc["cutoff"] == 30 and doc["status"] == "match (window)"
    assert {"scenario", "columns", "strokes", "verdicts", "version", "convention"} <= set(doc)
    assert all(v["ok"] for v in doc["verdicts"])


def test_csv_and_ascii_outputs(tmp_path):
    assert main(["--scenario", "bokstedt", "--max-degree", "20", "--emit", "csv",
                 "--emit", "ascii", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "bokstedt-p3-N20.csv").read_text().splitlines()
    assert rows[0] == "degree,expected,got,ok" and rows[1] == "0,1,1,true"
    assert (tmp_path / "bokstedt-p3-N20.txt").exists()


def test_bad_prime(capsys):
    assert main(["--prime", "4"]) == 2
    assert "prime required" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["--emit", "pdf"], ["--scenario", "nope"],
                                  ["--max-degree", "0"], ["--config", "/nonexistent"]])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nprime = 5\nmax_degree = 20\nscenario = thh-j-ell\nemit = json\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "thh-j-ell-p5-N20.json").exists()
    # flags beat the file
    assert main(["--config", str(cfg), "--prime", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "thh-j-ell-p3-N20.json").exists()
    cfg.write_text("colour = red\n")
    assert main(["--config", str(cfg)]) == 2


def test_mismatch_exit(monkeypatch, tmp_path):
    import thhmay.cli as cli
    from thhmay.scenarios import Verdict
    (res,) = run("thh-j-ell", 3, 14).values()
    res.verdicts.append(Verdict(99, 1, 0))
    monkeypatch.setattr(cli, "run", lambda *a: {"thh-j-ell": res})
    assert main(["--scenario", "thh-j-ell", "--out", str(tmp_path)]) == 1


def test_deterministic_files(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["--scenario", "v1-may", "--max-degree", "30", "--emit", "json,svg",
                     "--out", str(d)]) == 0
    names = sorted(x.name for x in a.iterdir())
    assert names == ["v1-may-p3-N30.json", "v1-may-p3-N30.svg"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
