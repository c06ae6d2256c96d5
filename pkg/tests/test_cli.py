import csv
import json

import pytest

from matscale.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_structures(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entry_id", "formula", "spacegroup", "formation_energy"])
        writer.writerows(rows)


@pytest.fixture
def curate_inputs(tmp_path):
    a = tmp_path / "alpha.csv"
    b = tmp_path / "beta.csv"
    write_structures(a, [
        ["a1", "Mg2F4", 136, -2.5],
        ["a2", "Mg2F4", 136, -2.4],
        ["a3", "BaTiO3", 221, -3.0],
        ["a4", "H2O1", 1, -0.5],
        ["a5", "K1Cl1", 225, -2.2],
    ])
    write_structures(b, [
        ["b1", "Mg2F4", 136, -2.6],
        ["b2", "Ti2O4", 136, -3.3],
        ["b3", "K1Cl1", 225, -2.1],
    ])
    return a, b


def test_curate_end_to_end(curate_inputs, tmp_path, capsys):
    a, b = curate_inputs
    out = tmp_path / "out"
    code, stdout, _ = run_cli(
        capsys, "curate", "--input", str(a), "--other", str(b),
        "--split", "0.6,0.2,0.2", "--seed", "11",
        "--hist", "formation_energy:-4:0:4", "--output-dir", str(out),
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["n_common_ids"] == 2  # Mg2F4_136 and K1Cl1_225
    assert (out / "alpha_split.csv").exists()
    assert (out / "beta_split.csv").exists()
    assert (out / "alpha_hist_formation_energy.csv").exists()

    # shared identities land in the same split on both sides
    def split_of(path):
        with open(path, newline="") as fh:
            return {row["structure_id"]: row["split"] for row in csv.DictReader(fh)}

    split_a = split_of(out / "alpha_split.csv")
    split_b = split_of(out / "beta_split.csv")
    for shared in ("Mg2F4_136", "K1Cl1_225"):
        assert split_a[shared] == split_b[shared]


def test_curate_does_not_mutate_inputs(curate_inputs, tmp_path, capsys):
    a, b = curate_inputs
    before = (a.read_bytes(), b.read_bytes())
    code, _, _ = run_cli(
        capsys, "curate", "--input", str(a), "--other", str(b),
        "--output-dir", str(tmp_path / "out"),
    )
    assert code == 0
    assert (a.read_bytes(), b.read_bytes()) == before


def test_curate_outputs_are_deterministic(curate_inputs, tmp_path, capsys):
    a, b = curate_inputs
    outputs = []
    for name in ("run1", "run2"):
        out = tmp_path / name
        code, _, _ = run_cli(
            capsys, "curate", "--input", str(a), "--other", str(b),
            "--seed", "5", "--output-dir", str(out),
        )
        assert code == 0
        outputs.append((out / "alpha_split.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_curate_missing_input_is_config_error(tmp_path, capsys):
    out = tmp_path / "out"
    code, stdout, stderr = run_cli(
        capsys, "curate", "--input", str(tmp_path / "absent.csv"),
        "--output-dir", str(out),
    )
    assert code == 2
    assert "not found" in stderr
    assert not out.exists() or not list(out.iterdir())  # no partial outputs


@pytest.fixture
def spectra_dir(tmp_path):
    sdir = tmp_path / "spectra"
    sdir.mkdir()
    cases = [
        ("calc_a", "LDA", 4, 40, "light", "ZORA", 1.0),
        ("calc_b", "PBE", 4, 40, "light", "ZORA", 2.0),
        ("calc_c", "LDA", 8, 80, "tight", "atomic_ZORA", 1.0),
    ]
    for name, xc, nk, nb, tier, rel, peak in cases:
        (sdir / f"{name}.csv").write_text(
            "energy,dos\n-2.0,0.0\n0.0,%s\n2.0,0.0\n" % peak
        )
        (sdir / f"{name}.json").write_text(json.dumps({
            "fermi_energy": 0.0, "xc": xc, "n_kpt": nk, "n_basis": nb,
            "settings_tier": tier, "relativistic": rel,
        }))
    return sdir


def test_similarity_end_to_end(spectra_dir, tmp_path, capsys):
    out = tmp_path / "simout"
    code, stdout, _ = run_cli(
        capsys, "similarity", "--spectra", str(spectra_dir),
        "--window", "-3,3", "--grid", "8x4", "--sort",
        "--output-dir", str(out),
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["n_spectra"] == 3
    manifest = json.loads((out / "similarity_manifest.json").read_text())
    # sorted: both LDA entries first (kpt 4 then 8), PBE last
    assert [lab["xc"] for lab in manifest["labels"]] == ["LDA", "LDA", "PBE"]
    rows = (out / "similarity_matrix.csv").read_text().splitlines()
    matrix = [[float(v) for v in row.split(",")] for row in rows]
    for i in range(3):
        assert matrix[i][i] == 1.0
        for j in range(3):
            assert matrix[i][j] == matrix[j][i]


def test_similarity_threads_flag_same_output(spectra_dir, tmp_path, capsys):
    outputs = []
    for name, flags in (("t1", []), ("t4", ["--threads", "4"])):
        out = tmp_path / name
        code, _, _ = run_cli(
            capsys, *flags, "similarity", "--spectra", str(spectra_dir),
            "--window", "-3,3", "--grid", "8x4", "--output-dir", str(out),
        )
        assert code == 0
        outputs.append((out / "similarity_matrix.csv").read_bytes())
    assert outputs[0] == outputs[1]


@pytest.fixture
def ce_inputs(tmp_path):
    """Targets equal the product of the two single-site correlations."""
    configs = tmp_path / "configs.csv"
    rows = []
    idx = 0
    for s0 in (1, -1):
        for s1 in (1, -1):
            occ = [s0, s1, 1, 1, 1, 1]
            rows.append((f"c{idx}", " ".join(str(v) for v in occ), s0 * s1))
            idx += 1
    with open(configs, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entry_id", "occupations", "target"])
        writer.writerows(rows)
    clusters = tmp_path / "clusters.json"
    clusters.write_text("[[0], [1]]")
    group = tmp_path / "group.json"
    group.write_text(json.dumps([list(range(6))]))
    return configs, clusters, group


def test_ce_fit_planted_quadratic(ce_inputs, tmp_path, capsys):
    configs, clusters, group = ce_inputs
    out = tmp_path / "ceout"
    code, stdout, _ = run_cli(
        capsys, "ce-fit", "--configs", str(configs), "--clusters", str(clusters),
        "--group", str(group), "--degree", "1,2", "--output-dir", str(out),
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["degrees"]["2"]["rmse"] < 1e-8
    assert summary["degrees"]["1"]["rmse"] > 0.5

    with open(out / "fit_trace.csv", newline="") as fh:
        trace_rows = list(csv.DictReader(fh))
    finals = {}
    for row in trace_rows:
        finals[row["degree"]] = float(row["rmse"])  # last row per degree wins
    assert finals["2"] < 1e-8

    with open(out / "predictions_d2.csv", newline="") as fh:
        preds = list(csv.DictReader(fh))
    assert len(preds) == 4
    for row in preds:
        assert abs(float(row["target"]) - float(row["predicted"])) < 1e-8


def test_complexity_subcommands(capsys):
    code, stdout, _ = run_cli(capsys, "complexity", "--nn", "2,3,1")
    assert code == 0
    assert json.loads(stdout) == {
        "model": "nn", "layer_widths": [2, 3, 1],
        "weights": 9, "biases": 4, "parameters": 13,
    }
    code, stdout, _ = run_cli(capsys, "complexity", "--rf", "3,5")
    assert json.loads(stdout)["splits"] == 6
    code, stdout, _ = run_cli(capsys, "complexity", "--sisso", "rung=2,dim=3,bias")
    assert json.loads(stdout) == {"model": "sisso", "rung": 2, "dimension": 4}


def test_estimate_workflow_reference_numbers(capsys):
    code, stdout, _ = run_cli(
        capsys, "estimate", "workflow", "--structures", "30000",
        "--settings", "9", "--files-per-run", "41", "--mb-per-run", "30",
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["runs"] == 270_000
    assert payload["files"] == 11_070_000
    assert payload["storage"] == "8.1 TB"


def test_estimate_training_and_nas(capsys):
    code, stdout, _ = run_cli(
        capsys, "estimate", "training", "--steps", "2000000",
        "--t-batch", "0.0010", "--t-grad", "0.0023",
    )
    assert code == 0
    assert json.loads(stdout)["seconds"] == pytest.approx(6600.0, abs=1e-9)

    code, stdout, _ = run_cli(
        capsys, "estimate", "nas", "--archs", "2000", "--hours", "20",
        "--price", "3",
    )
    assert json.loads(stdout) == {"gpu_hours": 40000.0, "cost": 120000.0}


def test_estimate_workflow_binary_units(capsys):
    code, stdout, _ = run_cli(
        capsys, "estimate", "workflow", "--structures", "1", "--settings", "1",
        "--files-per-run", "1", "--mb-per-run", "1048.576", "--binary",
    )
    assert code == 0
    assert json.loads(stdout)["storage"] == "1000 MiB"


def test_estimate_human_format(capsys):
    code, stdout, _ = run_cli(
        capsys, "estimate", "workflow", "--structures", "30000",
        "--settings", "9", "--files-per-run", "41", "--mb-per-run", "30",
        "--format", "human",
    )
    assert code == 0
    assert "storage: 8.1 TB" in stdout


def test_bad_flags_exit_code_two(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["curate"])  # --input is required
    assert exc.value.code == 2

    a = tmp_path / "a.csv"
    write_structures(a, [["x", "H1", 1, 0.0]])
    code, _, stderr = run_cli(
        capsys, "curate", "--input", str(a), "--split", "0.5,0.5",
        "--output-dir", str(tmp_path / "o"),
    )
    assert code == 2
    assert "three" in stderr


def test_module_error_exit_code_one(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("entry_id,formula,spacegroup\nx,NotAnElement5,1\n")
    code, _, stderr = run_cli(
        capsys, "curate", "--input", str(bad), "--output-dir", str(tmp_path / "o"),
    )
    assert code == 1
    assert stderr
