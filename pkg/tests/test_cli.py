import csv
import json
import subprocess
import sys

import pytest

from varspec import cli
from varspec.operators import NumericalFailure


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


STRIP_ALL = {
    "family": {"name": "thin_strip", "nx": 8, "nt": 10},
    "window": {"center": [5, 0], "radius": 6},
    "probes": {"count": 3, "seed": 1},
    "checks": ["conditions", "lemma_forward", "lemma_reverse", "strong_variant", "no_pollution",
               "inclusion", "isolated", "hausdorff", "pseudospectrum"],
    "pseudospectrum": {"resolution": [5, 4]},
}


def test_version(capsys):
    assert cli.main(["version"]) == 0
    assert capsys.readouterr().out.strip() == "varspec 0.1.0"


def test_list_families_is_stable(capsys):
    cli.main(["list-families"])
    first = capsys.readouterr().out
    cli.main(["list-families"])
    assert capsys.readouterr().out == first
    for name, anchor in [("shift", "weighted shift"), ("galerkin", "projection onto subspaces"),
                         ("perforated", "perforated domains"), ("thin_strip", "dimensional reduction")]:
        line = next(l for l in first.splitlines() if l.startswith(f"{name}:"))
        assert anchor in line


def test_shift_hausdorff_report(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"family": {"name": "shift", "wrap": True, "window_N": 20,
                                                         "n_list": [2, 5, 10]},
                                              "window": {"center": [0, 0], "radius": 0.9},
                                              "checks": ["hausdorff"]})
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--output-dir", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["hausdorff.csv", "manifest.json"]
    rows = read_csv(out / "hausdorff.csv")
    assert rows[0] == ["eps", "d_forward", "d_backward", "d_H"]
    assert len(rows) == 4
    assert all(float(r[2]) >= 0.8 for r in rows[1:])


def test_strip_conditions_bound(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"family": {"name": "thin_strip"}, "checks": ["conditions"]})
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--output-dir", str(out)]) == 0
    rows = read_csv(out / "conditions.csv")
    assert rows[0] == ["eps", "cond_i_lower", "cond_i_upper", "cond_ii", "cond_iii_M", "cond_iv", "verdict"]
    assert [float(r[0]) for r in rows[1:]] == [0.5, 0.25, 0.125]
    for r in rows[1:]:
        assert float(r[2]) <= 1.2 * float(r[0])


def test_all_checks_and_manifest(tmp_path):
    cfg = write_config(tmp_path / "c.json", STRIP_ALL)
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--output-dir", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["verdict"] == "pass"
    assert list(manifest["outputs"]) == STRIP_ALL["checks"]
    for entry in manifest["outputs"].values():
        assert entry["files"]
        assert all((out / f).exists() for f in entry["files"])
    assert read_csv(out / "isolated.csv")[0] == ["kind", "verdict", "witness_count", "detail_file"]
    assert read_csv(out / "isolated.csv")[1][:2] == ["ISOLATED_EIGENVALUE", "pass"]
    assert json.loads((out / "isolated_detail.json").read_text())["verdict"] == "pass"
    assert read_csv(out / "pseudospectrum.csv")[0] == ["re", "im", "sigma_min", "resolvent_norm"]
    assert len(read_csv(out / "pseudospectrum.csv")) == 1 + 20


def test_csvs_are_byte_identical_across_runs(tmp_path):
    cfg = write_config(tmp_path / "c.json", STRIP_ALL)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    cli.main(["run", cfg, "--output-dir", str(a)])
    cli.main(["run", cfg, "--output-dir", str(b)])
    cli.main(["run", cfg, "--output-dir", str(c), "--parallel", "4"])
    names = sorted(p.name for p in a.iterdir() if p.name != "manifest.json")
    assert names
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()


def test_floats_use_17_significant_digits(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"family": {"name": "thin_strip", "nx": 4, "nt": 5},
                                              "checks": ["conditions"]})
    cli.main(["run", cfg, "--output-dir", str(tmp_path / "o")])
    row = read_csv(tmp_path / "o" / "conditions.csv")[1]
    assert row[2] == format(float(row[2]), ".17g")


@pytest.mark.parametrize("doc, fragment", [
    ({"family": {"name": "moebius"}, "checks": ["conditions"]}, "family.name"),
    ({"family": {"name": "shift"}, "checks": []}, "checks"),
    ({"family": {"name": "shift"}, "checks": ["spectra"]}, "checks[0]"),
    ({"family": {"name": "shift"}, "checks": ["hausdorff"]}, "window"),
    ({"family": {"name": "thin_strip", "nx": 2}, "checks": ["conditions"]}, "family"),
    ({"family": {"name": "thin_strip"}, "checks": ["conditions"], "z0": [0, 0]}, "z0"),
    ({"family": {"name": "thin_strip"}, "checks": ["conditions"], "bogus": 1}, "bogus"),
    ({"family": {"name": "shift", "window_N": 12, "n_list": [2]}, "checks": ["isolated"]}, "lambda"),
    ({"family": {"name": "thin_strip"}, "checks": ["lemma_forward"],
      "K": {"kind": "points", "points": [[0, 0]]}}, "K"),
])
def test_invalid_config_exits_2_without_output(tmp_path, capsys, doc, fragment):
    cfg = write_config(tmp_path / "c.json", doc)
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--output-dir", str(out)]) == 2
    assert not out.exists()
    assert fragment in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text('{\n  "family": {"name": "shift"},\n  "checks": [hausdorff]\n}\n')
    assert cli.main(["run", str(path), "--output-dir", str(tmp_path / "out")]) == 2
    assert "line 3" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_failing_check_exits_1(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"family": {"name": "thin_strip", "nx": 4, "nt": 5},
                                              "checks": ["conditions"], "tolerances": {"cond_i": 1e-9}})
    out = tmp_path / "out"
    assert cli.main(["run", cfg, "--output-dir", str(out)]) == 1
    assert json.loads((out / "manifest.json").read_text())["verdict"] == "fail"
    assert read_csv(out / "conditions.csv")[-1][-1] == "fail"


def test_numerical_failure_exits_3(tmp_path, monkeypatch):
    def boom(cfg):
        raise NumericalFailure("did not converge")
    monkeypatch.setitem(cli.RUNNERS, "conditions", boom)
    cfg = write_config(tmp_path / "c.json", {"family": {"name": "thin_strip", "nx": 4, "nt": 5},
                                              "checks": ["conditions"]})
    assert cli.main(["run", cfg, "--output-dir", str(tmp_path / "out")]) == 3
    assert not (tmp_path / "out").exists()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_OUTPUT_DIR, str(tmp_path / "env"))
    cfg = write_config(tmp_path / "c.json", {"family": {"name": "thin_strip", "nx": 4, "nt": 5},
                                              "checks": ["conditions"]})
    assert cli.main(["run", cfg]) == 0
    assert (tmp_path / "env" / "conditions.csv").exists()


def test_module_entry_point(tmp_path):
    done = subprocess.run([sys.executable, "-m", "varspec", "version"], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout.startswith("varspec ")
