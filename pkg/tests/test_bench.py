"""Benchmark harness, op-count verification, convergence study, emit, CLI."""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from radialheat import (BenchScenario, bench, build_bench_case,
                        convergence_study, emit, load_config,
                        manufactured_single_layer, manufactured_two_layer,
                        verify_op_counts)
from radialheat.bench import ScenarioError, default_layers, spread_contacts
from radialheat.cli import main as cli_main
from radialheat.config import ConfigError


def test_default_layers_hit_requested_node_count():
    for n, k in ((1000, 11), (500, 3), (49, 0)):
        layers = default_layers(n, k)
        assert sum(l.cells for l in layers) == n - 1
        assert len(layers) == k + 1
        assert all(l.cells >= 4 for l in layers)


def test_scenario_validation():
    with pytest.raises(ScenarioError):
        BenchScenario(n_values=(20,), k=11)  # too small for 12 layers
    with pytest.raises(ScenarioError):
        BenchScenario(n_values=(10**8,))  # huge without the flag
    BenchScenario(n_values=(10**8,), allow_huge=True)
    with pytest.raises(ScenarioError):
        BenchScenario(n_values=(100,), solvers=("XXX",))


def test_spread_contacts_spacing():
    for n, k in ((10, 3), (100, 5), (1000, 11)):
        contacts = spread_contacts(n, k)
        assert len(contacts) == k
        assert all(2 <= i <= n - 3 for i in contacts)
        assert all(b - a >= 2 for a, b in zip(contacts, contacts[1:]))


def test_bench_small_run_all_solvers():
    scenario = BenchScenario(n_values=(400,), k=3, repetitions=2, seed=1,
                             exact_cap=1000)
    rows = bench(scenario)
    by_solver = {r.solver: r for r in rows}
    assert set(by_solver) == {"NPDM", "MNPDM", "NTDM", "SPDM", "STDM"}
    for solver in ("NPDM", "MNPDM", "NTDM"):
        assert by_solver[solver].err_inf < 5e-15
        assert by_solver[solver].op_count is not None
    for solver in ("SPDM", "STDM"):
        assert by_solver[solver].err_inf == 0
        assert by_solver[solver].op_count is None
    assert by_solver["NPDM"].path == "pd-shift"
    assert by_solver["NTDM"].path == "td-shift"


def test_bench_exact_cap_skips():
    scenario = BenchScenario(n_values=(400,), k=3, repetitions=1,
                             solvers=("SPDM",), exact_cap=100)
    rows = bench(scenario)
    assert "skipped" in rows[0].note


def test_exact_case_recovers_profile_exactly():
    case = build_bench_case(200, 3, seed=5, exact=True, use_mpq=False)
    from radialheat import exact_solve_pd, exact_solve_td
    assert exact_solve_pd(case.pd_system) == case.y_bar.tolist()
    assert exact_solve_td(case.td_system) == case.y_bar.tolist()


def test_verify_op_counts_passes_with_exact_slopes():
    report = verify_op_counts(n_values=(200, 400, 800), k_values=(0, 2, 5))
    assert report.passed
    measured = dict(report.constants)
    assert measured["NPDM"] == (-29, -29)
    assert measured["MNPDM"][0] == -8 and measured["MNPDM"][1] == -14
    assert measured["NTDM"][0] == -8 and measured["NTDM"][1] == 2
    assert any("reference law" in line for line in report.lines())


def test_emit_writes_csv_and_metadata(tmp_path, capsys):
    scenario = BenchScenario(n_values=(200,), k=2, repetitions=1,
                             solvers=("NTDM",))
    rows = bench(scenario)
    out = tmp_path / "bench.csv"
    emit(rows, out, metadata={"seed": 0})
    printed = capsys.readouterr().out
    assert "NTDM" in printed
    text = out.read_text().splitlines()
    assert text[0] == "N,solver,wall_s,op_count,err_inf"
    assert text[1].startswith("200,NTDM,")
    meta = json.loads((tmp_path / "bench.csv.meta.json").read_text())
    assert meta["seed"] == 0 and "host" in meta


def test_emit_rejects_empty():
    with pytest.raises(ValueError):
        emit([], None)


def test_rerun_same_seed_identical_but_wall_clock(tmp_path):
    scenario = BenchScenario(n_values=(300,), k=2, repetitions=1, seed=7,
                             exact_cap=1000)
    paths = []
    for tag in ("one", "two"):
        rows = bench(scenario)
        path = tmp_path / f"{tag}.csv"
        emit(rows, path)
        paths.append(path)
    lines1 = paths[0].read_text().splitlines()
    lines2 = paths[1].read_text().splitlines()
    assert len(lines1) == len(lines2)
    for a, b in zip(lines1[1:], lines2[1:]):
        fa, fb = a.split(","), b.split(",")
        assert fa[0] == fb[0] and fa[1] == fb[1]  # N, solver
        assert fa[3] == fb[3] and fa[4] == fb[4]  # op_count, err_inf


def test_wall_clock_scales_roughly_linearly():
    # doubling N roughly doubles numerical solver time
    scenario1 = BenchScenario(n_values=(40000,), k=11, repetitions=5,
                              solvers=("NTDM", "MNPDM"))
    scenario2 = BenchScenario(n_values=(80000,), k=11, repetitions=5,
                              solvers=("NTDM", "MNPDM"))
    t1 = {r.solver: r.wall_s for r in bench(scenario1)}
    t2 = {r.solver: r.wall_s for r in bench(scenario2)}
    for solver in ("NTDM", "MNPDM"):
        ratio = t2[solver] / t1[solver]
        assert 1.6 <= ratio <= 2.6, f"{solver} doubling ratio {ratio}"


def test_convergence_single_layer_second_order():
    layers, materials, ms = manufactured_single_layer()
    report = convergence_study(layers, materials, ms, cells_factors=(1, 2, 4))
    assert report.observed_order is not None
    assert report.observed_order >= 1.9
    assert report.monotone


def test_convergence_two_layer_second_order():
    layers, materials, ms = manufactured_two_layer()
    report = convergence_study(layers, materials, ms, cells_factors=(1, 2, 4))
    assert report.observed_order >= 1.9


def test_convergence_report_lines_and_inconclusive_flag():
    layers, materials, ms = manufactured_single_layer()
    report = convergence_study(layers, materials, ms, cells_factors=(1, 2))
    assert any("observed order" in line for line in report.lines())
    report.errors[1] = report.errors[0] * 2  # force non-monotone
    report.monotone = False
    assert report.inconclusive


# ---------------------------------------------------------------------------
# config file interface
# ---------------------------------------------------------------------------

CONFIG_TEXT = """
[layer.inner]
r_start = 1
r_end = 3/2
cells = 6
material = steel

[layer.outer]
r_start = 3/2
r_end = 2.5
cells = 8
material = oxide

[material.steel]
rho = 7800
cv = 450
conductivity = 15 1/100
valid_range = -1000 3000

[material.oxide]
rho = 3900
cv = 880
conductivity = 30
source = 5
"""


def test_config_roundtrip(tmp_path):
    path = tmp_path / "case.cfg"
    path.write_text(CONFIG_TEXT)
    layers, materials = load_config(path)
    assert [l.material_id for l in layers] == ["steel", "oxide"]
    assert layers[0].r_end == 1.5 and layers[1].cells == 8
    assert materials["steel"].conductivity(100.0) == 16.0
    assert materials["steel"].valid_range == (-1000.0, 3000.0)
    assert materials["oxide"].source(0.0) == 5.0

    layers_x, materials_x = load_config(path, exact=True)
    assert layers_x[0].r_end == Fraction(3, 2)
    assert materials_x["steel"].conductivity(Fraction(100)) == Fraction(16)


def test_config_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[layer.x]\nr_start = 1\nr_end = 2\ncells = 4\n"
                    "material = nope\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("[material.m]\nrho = 1\ncv = 1\nconductivity = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_bench_writes_csv(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = cli_main(["bench", "--n", "300", "--k", "2", "--reps", "1",
                     "--solvers", "NTDM,MNPDM", "--out", str(out)])
    assert code == 0
    assert out.exists()
    assert "NTDM" in capsys.readouterr().out


def test_cli_bench_rejects_huge_without_flag(capsys):
    code = cli_main(["bench", "--n", "100000000", "--reps", "1",
                     "--solvers", "NTDM"])
    assert code != 0


def test_cli_verify_counts(capsys):
    code = cli_main(["verify-counts"])
    assert code == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_cli_simulate(tmp_path, capsys):
    cfg = tmp_path / "case.cfg"
    cfg.write_text(CONFIG_TEXT)
    out = tmp_path / "profile.csv"
    code = cli_main(["simulate", "--config", str(cfg), "--tau", "0.1",
                     "--steps", "3", "--u0", "2.0", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,u"
    assert len(lines) == 1 + 6 + 8 + 1  # header + nodes
