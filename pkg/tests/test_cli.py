import json
from pathlib import Path

import pytest

from outer_billiards.cli import (
    EXIT_BAD_INPUT,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    SIDES_ROW,
    TIMES_ROW,
    RunConfig,
    UsageError,
    build_config,
    main,
)

FIXTURES = Path(__file__).parent / "fixtures"


def run(tmp_path, *args):
    return main([*args, f"output={tmp_path}"])


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_unknown_command():
    assert main(["fly"]) == EXIT_USAGE


def test_unknown_key():
    assert main(["orbit", "colour=red"]) == EXIT_USAGE


def test_help_is_usage():
    assert main(["--help"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "args",
    [
        ["orbit", "point=1"],
        ["orbit", "point=a,b"],
        ["orbit", "table=heptagon", "point=3,3"],
        ["scan", "window=0,0,-1,1"],
        ["scan", "resolution=ten"],
        ["scan", "workers=0"],
        ["verify", "checks=everything"],
        ["orbit"],
        ["witness", "table=square"],
    ],
)
def test_bad_input(tmp_path, args):
    assert run(tmp_path, *args) == EXIT_BAD_INPUT


def test_orbit_inside_table_is_bad_input(tmp_path):
    assert run(tmp_path, "orbit", "table=square", "point=1/4,1/4") == EXIT_BAD_INPUT


def test_orbit_writes_jsonl_and_svg(tmp_path, capsys):
    assert run(tmp_path, "orbit", "table=square", "point=1/2,3/2") == EXIT_OK
    lines = (tmp_path / "orbit.jsonl").read_text().splitlines()
    assert len(lines) >= 4
    json.loads(lines[0])
    assert (tmp_path / "orbit.svg").read_text().startswith("<")
    assert "4" in capsys.readouterr().out


def test_component_outputs(tmp_path):
    assert run(tmp_path, "component", "table=square", "point=1/2,3/2") == EXIT_OK
    data = json.loads((tmp_path / "component.json").read_text())
    assert data
    assert (tmp_path / "component.svg").exists()


def test_component_of_finite_point(tmp_path):
    assert run(tmp_path, "component", "table=square", "point=2,0") == EXIT_BAD_INPUT


def test_scan_pgm_header(tmp_path):
    assert run(tmp_path, "scan", "table=square", "window=-7/2,-7/2,7/2,7/2", "resolution=7x7", "budget=200") == EXIT_OK
    data = (tmp_path / "scan.pgm").read_bytes()
    assert data.startswith(b"P5\n7 7\n255\n")
    counts = json.loads((tmp_path / "scan_counts.json").read_text())
    assert sum(counts.values()) == 49


def test_scan_svg(tmp_path):
    assert run(tmp_path, "scan", "table=square", "resolution=4x4", "budget=100", "format=svg") == EXIT_OK
    assert (tmp_path / "scan.svg").read_text().lstrip().startswith("<")


def test_scan_identical_across_workers(tmp_path):
    args = ["scan", "table=hexagon_lattice", "window=-3,-3,3,3", "resolution=12x12", "budget=500"]
    outs = []
    for w in (1, 3):
        d = tmp_path / f"w{w}"
        assert main([*args, f"workers={w}", f"output={d}"]) == EXIT_OK
        outs.append((d / "scan.pgm").read_bytes())
    assert outs[0] == outs[1]


def test_return_table_csv(tmp_path):
    assert run(tmp_path, "return-table", "target=middle") == EXIT_OK
    csv_files = list(tmp_path.glob("return_*.csv"))
    assert len(csv_files) == 1
    rows = csv_files[0].read_text(encoding="utf-8").splitlines()
    assert rows[0].startswith(SIDES_ROW)
    assert rows[1].startswith(TIMES_ROW)
    assert rows[1].endswith("53")


def test_return_table_unknown_target(tmp_path):
    assert run(tmp_path, "return-table", "target=nowhere") == EXIT_BAD_INPUT


def test_verify_corrupted_golden_fails(tmp_path, capsys):
    code = run(tmp_path, "verify", f"golden={FIXTURES / 'corrupted_golden.json'}")
    assert code == EXIT_FAILED
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] is False
    assert report["checks"]["golden"]["details"]["A_ср"] is False
    assert "golden: FAIL" in capsys.readouterr().out


def test_verify_correct_golden_passes(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"middle": [[3, 4, 4, 4, 4, 3, 4, 4], [1, 1, 1, 1, 10, 25, 27, 53]]}))
    assert run(tmp_path, "verify", f"golden={good}") == EXIT_OK


def test_verify_missing_golden_file(tmp_path):
    assert run(tmp_path, "verify", f"golden={tmp_path / 'absent.json'}") == EXIT_BAD_INPUT


def test_verify_figures(tmp_path):
    assert run(tmp_path, "verify", "checks=figures") == EXIT_OK


def test_witness_octagon_depth_one(tmp_path, capsys):
    assert run(tmp_path, "witness", "table=octagon", "depth=1") == EXIT_OK
    data = json.loads((tmp_path / "witness_octagon.json").read_text())
    assert data
    assert capsys.readouterr().out.startswith("periods")


def test_config_round_trip():
    cfg = build_config(["scan", "table=hexagon_lattice", "point=1/2,3", "window=-1,-2,3,4", "resolution=5x6", "workers=2", "checks=figures,golden"])
    again = RunConfig.from_text(cfg.to_text())
    assert again == cfg


def test_config_file_with_overrides(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text('# scan settings\n[run]\ncommand = scan\ntable = "triangle_lattice"\nresolution = 3x3\n', encoding="utf-8")
    cfg = build_config(["--config", str(conf), "resolution=4x4"])
    assert cfg.command == "scan"
    assert cfg.table == "triangle_lattice"
    assert cfg.resolution == (4, 4)


def test_config_rejects_bare_line():
    with pytest.raises(UsageError):
        RunConfig.from_text("table square\n")


def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "none.conf"), "scan"]) == EXIT_BAD_INPUT
