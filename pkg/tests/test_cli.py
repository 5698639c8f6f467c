import csv
import io
import json
import math

import numpy as np
import pytest

from sparsedct.cli import main, read_signal, write_signal
from sparsedct.experiments import (
    TIMING_FIELDS,
    TRIAL_FIELDS,
    MissingThresholdError,
    bound_for,
    run_bench,
    run_noise_study,
    run_trial,
    write_csv,
)
from sparsedct.transforms import dct2_naive


def write_values(path, values, comment=None):
    lines = [f"# {comment}"] if comment else []
    path.write_text("\n".join(lines + [repr(float(v)) for v in values]) + "\n")


def load(path):
    return read_signal(str(path))


def test_signal_file_roundtrip_text(tmp_path):
    x = np.random.default_rng(0).standard_normal(16)
    p = tmp_path / "x.txt"
    write_signal(str(p), x, header="test")
    np.testing.assert_array_equal(load(p), x)


def test_signal_file_roundtrip_bin(tmp_path):
    x = np.random.default_rng(1).standard_normal(32)
    p = tmp_path / "x.bin"
    write_signal(str(p), x, fmt="bin")
    assert p.read_bytes() == x.astype("<f8").tobytes()
    np.testing.assert_array_equal(read_signal(str(p), "bin"), x)


def test_signal_file_comments(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("# header\n1.0\n\n2.0  # trailing\n")
    np.testing.assert_array_equal(load(p), [1.0, 2.0])


def test_transform_constant(tmp_path):
    src, out = tmp_path / "in.txt", tmp_path / "out.txt"
    write_values(src, np.ones(8))
    assert main(["transform", str(src), "--kind", "dct2", "--out", str(out)]) == 0
    np.testing.assert_allclose(load(out), [np.sqrt(8)] + [0] * 7, atol=1e-14)


def test_transform_roundtrip(tmp_path):
    x = np.random.default_rng(2).standard_normal(64)
    a, b, c = (tmp_path / n for n in ("a.txt", "b.txt", "c.txt"))
    write_values(a, x)
    assert main(["transform", str(a), "--kind", "dct2", "--out", str(b)]) == 0
    assert main(["transform", str(b), "--kind", "dct3", "--out", str(c)]) == 0
    assert np.abs(load(c) - x).max() < 1e-10


def test_transform_fast_vs_naive(tmp_path):
    x = np.random.default_rng(3).standard_normal(256)
    src, f, n = tmp_path / "x.txt", tmp_path / "f.txt", tmp_path / "n.txt"
    write_values(src, x)
    for kind in ("dct2", "dct3", "dct4", "dst4"):
        assert main(["transform", str(src), "--kind", kind, "--fast", "--out", str(f)]) == 0
        assert main(["transform", str(src), "--kind", kind, "--naive", "--out", str(n)]) == 0
        assert np.abs(load(f) - load(n)).max() < 1e-10


def test_transform_bad_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\n3\n")
    assert main(["transform", str(bad)]) == 2
    junk = tmp_path / "junk.txt"
    junk.write_text("1\nabc\n")
    assert main(["transform", str(junk)]) == 2
    assert main(["transform", str(tmp_path / "missing.txt")]) == 3
    capsys.readouterr()


def test_unwritable_output_is_io_error(tmp_path):
    src = tmp_path / "x.txt"
    write_values(src, np.ones(4))
    assert main(["transform", str(src), "--out", str(tmp_path / "no" / "dir.txt")]) == 3


def test_recover_tail_pair(tmp_path):
    x = np.zeros(16)
    x[13], x[14] = 1.0, 2.0
    xs, spec, out, stats = (tmp_path / n for n in ("x.txt", "xh.txt", "r.txt", "s.jsonl"))
    write_values(xs, x)
    assert main(["transform", str(xs), "--out", str(spec)]) == 0
    assert main(["recover", str(spec), "--bound", "2", "--out", str(out), "--stats", str(stats)]) == 0
    np.testing.assert_allclose(load(out), x, atol=1e-12)
    record = json.loads(stats.read_text().splitlines()[0])
    assert record["support_mu"] == 13 and record["branches"] == ["init", "u0", "u1"]


def test_recover_zero_spectrum(tmp_path, capsys):
    spec, out = tmp_path / "z.txt", tmp_path / "r.txt"
    write_values(spec, np.zeros(64))
    assert main(["recover", str(spec), "--bound", "4", "--out", str(out)]) == 0
    np.testing.assert_array_equal(load(out), np.zeros(64))
    record = json.loads(capsys.readouterr().out)
    assert record["empty_support"] is True


def test_recover_spike_via_gen(tmp_path):
    x, spec, out = tmp_path / "x.txt", tmp_path / "xh.txt", tmp_path / "r.txt"
    rc = main(["gen", "--n", "2^12", "--m", "1", "--mu", "777", "--seed", "3", "--out", str(x), "--spectrum-out", str(spec)])
    assert rc == 0
    assert main(["recover", str(spec), "--bound", "4", "--out", str(out), "--stats", str(tmp_path / "s")]) == 0
    truth = load(x)
    assert np.flatnonzero(truth).tolist() == [777]
    assert np.abs(load(out) - truth).max() < 1e-10


def test_recover_exact_variant_binary(tmp_path):
    x = np.zeros(16)
    x[7], x[8] = 2.0, 5.0
    spec, out = tmp_path / "xh.bin", tmp_path / "r.bin"
    write_signal(str(spec), dct2_naive(x), fmt="bin")
    rc = main(["recover", str(spec), "--m", "2", "--epsilon", "1e-8", "--format", "bin", "--out", str(out), "--stats", str(tmp_path / "s")])
    assert rc == 0
    np.testing.assert_allclose(read_signal(str(out), "bin"), x, atol=1e-12)


def test_recover_argument_errors(tmp_path, capsys):
    spec = tmp_path / "xh.txt"
    write_values(spec, np.ones(16))
    assert main(["recover", str(spec)]) == 2
    assert main(["recover", str(spec), "--bound", "2", "--m", "2"]) == 2
    assert main(["recover", str(spec), "--bound", "32"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["recover", str(spec), "--bound", "0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["recover", str(spec), "--bound", "2", "--epsilon", "-1"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_gen_rejects_non_dyadic(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--n", "100", "--m", "3"])
    assert exc.value.code == 2
    capsys.readouterr()


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_bench_csv_and_manifest(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--n", "1024", "--m", "10", "400", "--trials", "4", "--seed", "5", "--epsilon", "1e-8", "--out", str(out)]) == 0
    rows = _rows(out)
    assert list(rows[0].keys()) == TRIAL_FIELDS
    trials = [r for r in rows if r["row_type"] == "trial"]
    means = [r for r in rows if r["row_type"] == "mean"]
    assert len(trials) == 4 and len(means) == 1  # m=400 skipped since 3m > N
    assert float(means[0]["error_l2_over_N"]) < 1e-10
    assert all(r["support_correct"] == "1" for r in trials)
    assert all(r["baseline_seconds"] for r in trials)
    manifest = json.loads((tmp_path / "bench.csv.manifest.json").read_text())
    assert manifest["seeds"] == [5] and manifest["command"] == "bench"
    assert "PCG64" in manifest["rng_algorithm"]


def test_bench_zero_trials_header_only(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--n", "256", "--m", "4", "--trials", "0", "--out", str(out)]) == 0
    assert out.read_text().strip() == ",".join(TRIAL_FIELDS)


def test_bench_deterministic_modulo_timing(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["bench", "--n", "2^10", "--m", "10", "20", "--trials", "5", "--seed", "9", "--out", str(p)]) == 0
    a, b = (_rows(p) for p in paths)
    strip = lambda rows: [{k: v for k, v in r.items() if k not in TIMING_FIELDS} for r in rows]
    assert strip(a) == strip(b)


def test_bench_exact_rule_uses_exact_variant():
    records, aggregates = run_bench(1024, [10], "exact", trials=3, seed=1, epsilon=1e-8, baseline=False)
    assert all(r.M == 10 and r.variant == "exact" for r in records)
    assert aggregates[0].error_l2_over_N < 1e-10
    assert records[0].baseline_seconds is None


def test_dense_baseline_agrees_with_sparse():
    rec = run_trial(2**12, 30, "3m", epsilon=1e-8, seed=2, baseline=True)
    assert rec.error_l2_over_N < 1e-10
    assert rec.baseline_error_l2_over_N < 1e-10


def test_bound_rules():
    assert bound_for(7, "exact")[0] == 7
    assert bound_for(7, "3m")[0] == 21
    with pytest.raises(ValueError):
        bound_for(7, "5m")


def test_noise_study_missing_threshold():
    with pytest.raises(MissingThresholdError, match="25"):
        run_noise_study(1024, 100, snr_list=[20, 25], trials=1)


def test_noise_study_cli_missing_threshold(tmp_path, capsys):
    rc = main(["noise-study", "--n", "1024", "--m", "7", "--snr", "10", "--out", str(tmp_path / "n.csv")])
    assert rc == 2
    assert "10 dB" in capsys.readouterr().err


def test_noise_study_infinite_snr():
    _, aggregates = run_noise_study(2**12, 20, "3m", snr_list=[math.inf], epsilon_table={}, trials=20, seed=3)
    agg = aggregates[0]
    assert agg.support_correct == 1.0
    assert agg.error_l2_over_N < 1e-10


def test_noise_study_custom_table_cli(tmp_path):
    out = tmp_path / "n.csv"
    rc = main(["noise-study", "--n", "2^12", "--m", "20", "--snr", "30", "50", "--epsilon-table", "30:0.4,50:0.05", "--trials", "10", "--out", str(out)])
    assert rc == 0
    means = [r for r in _rows(out) if r["row_type"] == "mean"]
    assert [float(r["snr_db"]) for r in means] == [30.0, 50.0]
    assert [float(r["epsilon"]) for r in means] == [0.4, 0.05]


def test_noise_study_rates_m100_exact_bound():
    _, aggregates = run_noise_study(2**14, 100, "exact", snr_list=[20], trials=100, seed=4)
    assert aggregates[0].support_correct >= 0.90
    assert aggregates[0].support_within_3m == aggregates[0].support_correct


def test_noise_study_rate_high_snr():
    _, aggregates = run_noise_study(2**14, 100, "3m", snr_list=[50], trials=200, seed=5)
    assert aggregates[0].support_correct >= 0.99


def test_write_csv_to_stream():
    buf = io.StringIO()
    rec = run_trial(256, 4, "3m", epsilon=1e-8, seed=0)
    write_csv(buf, [rec])
    lines = buf.getvalue().strip().splitlines()
    assert len(lines) == 2 and lines[1].startswith("trial,256,4,12,bounded,inf")
