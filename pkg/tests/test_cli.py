import json

from sosim.cli import main
from sosim.eventlog import read_log

from helpers import demo_scenario_doc


def write_demo(tmp_path):
    path = tmp_path / "demo.json"
    path.write_text(json.dumps(demo_scenario_doc()))
    return path


def test_run_writes_log_and_prints_metrics(tmp_path, capsys):
    scenario = write_demo(tmp_path)
    log = tmp_path / "out.ndjson"
    assert main(["run", "--scenario", str(scenario), "--out", str(log),
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["missions_done"] == 1
    records = read_log(str(log))
    assert records[-1].kind.value == "MetricSample"


def test_metrics_reads_log_and_renders_plots(tmp_path, capsys):
    scenario = write_demo(tmp_path)
    log = tmp_path / "out.ndjson"
    main(["run", "--scenario", str(scenario), "--out", str(log)])
    capsys.readouterr()
    plots = tmp_path / "figs"
    assert main(["metrics", str(log), "--format", "table",
                 "--plots", str(plots)]) == 0
    out = capsys.readouterr().out
    assert "completion_rate" in out
    pngs = sorted(p.name for p in plots.glob("*.png"))
    assert any("utilization" in n for n in pngs)
    assert any("summary" in n for n in pngs)


def test_compare_renders_table_csv_and_figures(tmp_path, capsys):
    scenario = write_demo(tmp_path)
    out_dir = tmp_path / "report"
    assert main(["compare", "--scenario", str(scenario),
                 "--coordinators", "holonic,centralized",
                 "--out-dir", str(out_dir)]) == 0
    table = capsys.readouterr().out
    assert "holonic" in table and "centralized" in table
    csv_text = (out_dir / "comparison.csv").read_text()
    assert csv_text.count("demo-city") == 2
    assert list(out_dir.glob("compare_*.png"))


def test_run_seed_override_changes_header_only(tmp_path, capsys):
    scenario = write_demo(tmp_path)
    log1, log2 = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
    main(["run", "--scenario", str(scenario), "--out", str(log1), "--seed", "7"])
    main(["run", "--scenario", str(scenario), "--out", str(log2), "--seed", "7"])
    assert log1.read_bytes() == log2.read_bytes()
