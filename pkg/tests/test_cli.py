import json
import shutil
import subprocess
import sys

import pytest

from costlens import record_from_profile
from costlens.cli import format_fixed, main

from support import data_file


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def vit16(tmp_path):
    with data_file("specs/vit_b16.json") as p:
        target = tmp_path / "vit_b16.json"
        shutil.copy(p, target)
    return str(target)


@pytest.fixture()
def records_csv():
    with data_file("records/depth_width_scaling.csv") as p:
        yield p


class TestFormatFixed:
    def test_six_significant_digits(self):
        assert format_fixed(86567656) == "86567700"
        assert format_fixed(17.563828224) == "17.5638"
        assert format_fixed(0.93) == "0.93"
        assert format_fixed(0) == "0"
        assert format_fixed(-1234.5678) == "-1234.57"


class TestProfile:
    def test_json_profile_with_hardware(self, vit16, capsys):
        code, out, err = run_cli(
            ["profile", vit16, "--hw", "tpu_like", "--batch", "256",
             "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["name"] == "vit_b16"
        assert doc["params"] == 86_567_656
        assert abs(doc["gflops"] - 17.63) / 17.63 < 0.03
        assert doc["latency_sec"] > 0
        assert doc["throughput_examples_per_sec"] > 0
        assert err == ""

    def test_no_hardware_warns_and_omits_speed(self, vit16, capsys):
        code, out, err = run_cli(["profile", vit16, "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert "latency_sec" not in doc
        assert "throughput_examples_per_sec" not in doc
        assert err.count("warning") == 1

    def test_builder_flags_equal_spec_file(self, vit16, capsys):
        code, from_file, _ = run_cli(["profile", vit16, "--format", "json"], capsys)
        assert code == 0
        code, from_flags, _ = run_cli(
            ["profile", "--family", "vit", "--patch", "16", "--depth", "12",
             "--model-dim", "768", "--num-heads", "12", "--ffn-dim", "3072",
             "--format", "json"], capsys)
        assert code == 0
        a, b = json.loads(from_file), json.loads(from_flags)
        for key in ("params", "flops", "macs", "activation_elements", "mac_bytes"):
            assert a[key] == b[key]

    def test_round_trip_profile_to_record(self, vit16, capsys):
        code, out, _ = run_cli(
            ["profile", vit16, "--hw", "default", "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        record = record_from_profile(doc)
        assert record.indicators["params"] == float(doc["params"])
        assert record.indicators["flops"] == float(doc["flops"])
        assert record.indicators["latency"] == doc["latency_sec"]
        assert record.indicators["throughput"] == doc["throughput_examples_per_sec"]
        assert record.indicators["memory"] == float(doc["peak_training_bytes"])

    def test_energy_and_pricing(self, vit16, tmp_path, capsys):
        energy = tmp_path / "energy.json"
        energy.write_text('{"ee_train_kwh": 100, "co2e_per_kwh": 0.5}')
        pricing = tmp_path / "pricing.json"
        pricing.write_text('{"total_train_hours": 100, "num_chips": 64,'
                           ' "price_per_chip_hour": 2.0}')
        code, out, _ = run_cli(
            ["profile", vit16, "--energy", str(energy), "--pricing",
             str(pricing), "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["carbon_kg_co2e"] == 50.0
        assert doc["monetary_cost"] == 12_800.0

    def test_malformed_json_exits_2_with_offset(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema_version": 1, "arch": }')
        code, out, err = run_cli(["profile", str(bad)], capsys)
        assert code == 2
        payload = json.loads(err)
        assert "offset" in payload
        assert str(payload["offset"]) in payload["error"]

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run_cli(["profile", "/nonexistent/spec.json"], capsys)
        assert code == 2
        assert "no such file" in json.loads(err)["error"]

    def test_arch_and_builder_both_rejected(self, tmp_path, capsys):
        doc = {"schema_version": 1,
               "arch": {"input": {"kind": "token_sequence", "length": 4,
                                  "vocab": 10}, "layers": []},
               "builder": {"family": "vit"}}
        p = tmp_path / "both.json"
        p.write_text(json.dumps(doc))
        code, _, err = run_cli(["profile", str(p)], capsys)
        assert code == 2
        assert "exactly one" in json.loads(err)["error"]

    def test_invalid_architecture_exits_2(self, tmp_path, capsys):
        doc = {"schema_version": 1,
               "arch": {"input": {"kind": "image", "height": 224, "width": 224,
                                  "channels": 3},
                        "layers": [{"kind": "patch_embed", "patch": 60,
                                    "in_channels": 3, "embed_dim": 64}]}}
        p = tmp_path / "bad_arch.json"
        p.write_text(json.dumps(doc))
        code, _, err = run_cli(["profile", str(p)], capsys)
        assert code == 2
        assert "does not divide" in json.loads(err)["error"]

    def test_table_and_csv_formats(self, vit16, capsys):
        code, table, _ = run_cli(["profile", vit16], capsys)
        assert code == 0
        assert "params" in table
        code, csv_text, _ = run_cli(["profile", vit16, "--format", "csv"], capsys)
        assert code == 0
        lines = csv_text.strip().splitlines()
        assert len(lines) == 2
        assert len(lines[0].split(",")) == len(lines[1].split(","))


class TestCompare:
    def test_records_compare(self, records_csv, capsys):
        code, out, _ = run_cli(
            ["compare", "--records", records_csv, "--indicators",
             "params,latency"], capsys)
        assert code == 0
        assert "D48 < W3072 on params but D48 > W3072 on latency" in out
        assert "kendall tau-b" in out

    def test_sorted_by_first_indicator(self, records_csv, capsys):
        code, out, _ = run_cli(["compare", "--records", records_csv], capsys)
        assert code == 0
        lines = [l for l in out.splitlines() if l and not l.startswith(" ")]
        names = [l.split()[0] for l in lines[1:12]]
        assert names[0] == "W768"      # smallest params
        assert names[-1] == "W4096"    # largest params

    def test_spec_files_compare(self, tmp_path, capsys):
        paths = []
        for name in ("vit_b16.json", "vit_b32.json"):
            with data_file(f"specs/{name}") as p:
                target = tmp_path / name
                shutil.copy(p, target)
                paths.append(str(target))
        code, out, _ = run_cli(["compare", *paths], capsys)
        assert code == 0
        assert "vit_b16" in out and "vit_b32" in out
        # quality-free records: frontier analysis is explicitly skipped
        assert "skipped (no quality scores)" in out

    def test_identical_specs_tau_one(self, vit16, capsys):
        code, out, _ = run_cli(["compare", vit16, vit16], capsys)
        assert code == 0
        assert "tau = 1" in out
        assert "none" in out

    def test_single_model_exits_1(self, vit16, capsys):
        code, _, err = run_cli(["compare", vit16], capsys)
        assert code == 1

    def test_missing_quality_column_exits_2(self, tmp_path, capsys):
        p = tmp_path / "r.csv"
        p.write_text("name,family,params\na,x,1\nb,y,2\n")
        code, _, err = run_cli(["compare", "--records", str(p)], capsys)
        assert code == 2
        assert "quality" in json.loads(err)["error"]

    def test_unknown_indicator_exits_2(self, records_csv, capsys):
        code, _, err = run_cli(
            ["compare", "--records", records_csv, "--indicators", "sparkles"],
            capsys)
        assert code == 2

    def test_non_numeric_cell_exits_2(self, tmp_path, capsys):
        p = tmp_path / "r.csv"
        p.write_text("name,quality,params\na,1.0,fast\n")
        code, _, err = run_cli(["compare", "--records", str(p)], capsys)
        assert code == 2
        assert "not numeric" in json.loads(err)["error"]

    def test_non_finite_cell_exits_2(self, tmp_path, capsys):
        p = tmp_path / "r.csv"
        p.write_text("name,quality,params\na,1.0,inf\nb,2.0,3\n")
        code, _, err = run_cli(["compare", "--records", str(p)], capsys)
        assert code == 2
        assert "finite" in json.loads(err)["error"]

    def test_empty_cells_are_missing_indicators(self, tmp_path, capsys):
        p = tmp_path / "r.csv"
        p.write_text("name,quality,params,latency\na,1.0,1.0,\nb,2.0,2.0,0.5\n")
        code, out, _ = run_cli(["compare", "--records", str(p)], capsys)
        assert code == 0
        assert "a is missing latency" in out


class TestPareto:
    def test_frontier_listing(self, records_csv, capsys):
        code, out, _ = run_cli(
            ["pareto", records_csv, "--cost", "flops"], capsys)
        assert code == 0
        assert "9 of 11 records" in out
        assert "W768" in out and "W4096" in out
        assert "dominated: W1536, W3072" in out

    def test_missing_cost_column_named(self, records_csv, capsys):
        code, _, err = run_cli(
            ["pareto", records_csv, "--cost", "carbon"], capsys)
        assert code == 2
        assert "carbon" in json.loads(err)["error"]

    def test_single_record(self, tmp_path, capsys):
        p = tmp_path / "one.csv"
        p.write_text("name,quality,flops\nonly,1.0,2.0\n")
        code, out, _ = run_cli(["pareto", str(p), "--cost", "flops"], capsys)
        assert code == 0
        assert "1 of 1 records" in out

    def test_svg_written_and_output_identical(self, records_csv, tmp_path, capsys):
        code, without_svg, _ = run_cli(
            ["pareto", records_csv, "--cost", "flops"], capsys)
        svg_path = tmp_path / "scatter.svg"
        code2, with_svg, _ = run_cli(
            ["pareto", records_csv, "--cost", "flops", "--svg", str(svg_path)],
            capsys)
        assert code == code2 == 0
        assert without_svg == with_svg
        svg = svg_path.read_text()
        assert svg.startswith("<?xml")
        assert svg.count("<circle") == 11
        assert "<polyline" in svg


class TestDeterminism:
    def run_twice(self, argv):
        runs = []
        for _ in range(2):
            proc = subprocess.run(
                [sys.executable, "-m", "costlens", *argv],
                capture_output=True,
            )
            runs.append((proc.returncode, proc.stdout, proc.stderr))
        return runs

    def test_profile_byte_identical(self, vit16):
        a, b = self.run_twice(["profile", vit16, "--hw", "default",
                               "--format", "json"])
        assert a == b
        assert a[0] == 0

    def test_compare_byte_identical(self, records_csv):
        a, b = self.run_twice(["compare", "--records", records_csv])
        assert a == b

    def test_pareto_and_svg_byte_identical(self, records_csv, tmp_path):
        svg1 = tmp_path / "a.svg"
        svg2 = tmp_path / "b.svg"
        a = self.run_twice(["pareto", records_csv, "--cost", "flops",
                            "--svg", str(svg1)])[0]
        b = self.run_twice(["pareto", records_csv, "--cost", "flops",
                            "--svg", str(svg2)])[0]
        assert a == b
        assert svg1.read_bytes() == svg2.read_bytes()
