import pytest

from pumplab.cli import _parse_seeds, _parse_tt, load_instance, main
from pumplab.formats import read_native


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_parse_helpers():
    assert _parse_seeds("1..3") == [1, 2, 3]
    assert _parse_seeds("1:3") == [1, 2, 3]
    assert _parse_seeds("4,7") == [4, 7]
    assert _parse_tt("5:9") == (5, 9)
    assert _parse_tt("5,9") == (5, 9)


def test_builtin_instance_aliases():
    assert load_instance("fractional-stall").n == 2
    assert load_instance("zero-frac-stall").n == 5
    assert load_instance("zero-frac-stall:4").n == 6


def test_solve_reports_found_point(capsys):
    rc, out, _ = run_cli(capsys, "solve", "--alg", "wfp", "--l", "2",
                         "--seed", "7", "fractional-stall")
    assert rc == 0
    assert "outcome: found" in out
    assert "x: 1 0" in out


def test_solve_exit_one_when_trapped(capsys):
    rc, out, _ = run_cli(capsys, "solve", "--alg", "orig", "--max-iter", "80",
                         "fractional-stall")
    assert rc == 1
    assert "outcome: iter_limit" in out


def test_solve_rejects_unknown_algorithm():
    with pytest.raises(SystemExit) as e:
        main(["solve", "--alg", "mystery", "fractional-stall"])
    assert e.value.code == 2


def test_missing_file_is_a_clean_error(capsys):
    rc, _, err = run_cli(capsys, "solve", "--alg", "wfp", "no/such/file.pl")
    assert rc == 2
    assert "error:" in err


def test_gen_writes_loadable_file(tmp_path, capsys):
    path = tmp_path / "ss.pl"
    rc, out, err = run_cli(capsys, "gen", "--family", "subset-sum", "--k", "2",
                           "--n", "3", "--seed", "5", "-o", str(path), "--witness")
    assert rc == 0 and out == ""
    assert "witness x:" in err
    inst = load_instance(str(path))
    assert inst.n == 6 and len(inst.rows) == 2
    rc, _, _ = run_cli(capsys, "solve", "--alg", "wfp", "--seed", "1", str(path))
    assert rc == 0


def test_gen_stdout_and_mps_format(tmp_path, capsys):
    rc, out, _ = run_cli(capsys, "gen", "--family", "fractional-stall")
    assert rc == 0
    assert read_native(out).n == 2

    path = tmp_path / "stall.mps"
    rc, _, _ = run_cli(capsys, "gen", "--family", "zero-frac-stall", "--t-max", "2",
                       "--format", "mps", "-o", str(path))
    assert rc == 0
    assert load_instance(str(path)).n == 4


def test_trace_header_and_events(capsys):
    rc, out, _ = run_cli(capsys, "trace", "--alg", "wfp", "--seed", "5",
                         "fractional-stall")
    assert rc == 0
    head = out.splitlines()[0]
    assert head.startswith("# algorithm=wfp instance=fractional-stall seed=5 outcome=found")
    assert "event=project" in out
    assert "t=" in out


def test_bench_family_table_and_csv(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    rc, out, err = run_cli(
        capsys, "bench", "--family", "subset-sum", "--ks", "1", "--ns", "3,4",
        "--per-config", "1", "--algs", "orig,wfp", "--seeds", "1..2",
        "--max-iter", "200", "--csv", str(csv_path),
    )
    assert rc == 0
    assert "sgm shifts:" in out and "# found" in out and "(vs orig)" in out
    assert "wrote 8 rows" in err
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "instance,algorithm,seed,outcome,iterations,perturbations,restarts,wall_time_s"
    assert len(lines) == 9


def test_bench_accepts_instance_files(tmp_path, capsys):
    path = tmp_path / "inst.pl"
    run_cli(capsys, "gen", "--family", "subset-sum", "--k", "1", "--n", "4",
            "--seed", "2", "-o", str(path))
    rc, out, _ = run_cli(capsys, "bench", "--instances", str(path),
                         "--algs", "wfp", "--seeds", "1,2", "--max-iter", "200")
    assert rc == 0
    assert "wfp" in out


def test_bench_without_inputs_fails(capsys):
    rc, _, err = run_cli(capsys, "bench")
    assert rc == 2
    assert "bench needs" in err


def test_verify_bounds_small_pass(capsys):
    rc, out, _ = run_cli(capsys, "verify-bounds", "--theorem", "1", "--runs", "10",
                         "--ks", "1", "--ns", "2,3", "--base-seed", "3")
    assert "theorem T1" in out
    assert rc == 0
    assert "PASS" in out
