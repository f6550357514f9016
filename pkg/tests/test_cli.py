import pytest

from fermicode import config
from fermicode.circuits import count_gates, parse_program
from fermicode.cli import main
from fermicode.codes import codebook, derive_params, format_codeword
from fermicode.hermite import scan
from fermicode.resources import (
    qubit_series,
    sim_cost,
    sim_cost_text,
    threshold_scan,
    threshold_to_csv,
)


@pytest.fixture
def keep_config():
    saved = {k: getattr(config, k) for k in dir(config) if k.isupper()}
    yield
    for k, v in saved.items():
        setattr(config, k, v)


# ---------------------------------------------------------------------------
# parameter derivation and codebook listing


def test_params_auto_degree_picks_one(capsys):
    assert main(["params", "--modes", "1000000", "--fermions", "10",
                 "--degree", "auto"]) == 0
    out = capsys.readouterr().out
    assert "D 1" in out.splitlines()
    assert "Q 404609" in out.splitlines()


def test_codebook_nine_words(capsys):
    assert main(["codebook", "--degree", "1", "--raw-g", "1",
                 "--lprime", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 9
    params = derive_params(9, 1, G=1)
    assert lines == [format_codeword(w, params) for w in codebook(params)]
    assert lines[0] == "100 100 100"


def test_lprime_mismatch_rejected(capsys):
    assert main(["params", "--modes", "8", "--degree", "1", "--raw-g", "1",
                 "--lprime", "5"]) == 1
    assert "derived field size" in capsys.readouterr().err


def test_missing_flags_diagnosed(capsys):
    assert main(["params", "--modes", "100"]) == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# encode / decode round trip through files


def test_encode_decode_roundtrip(tmp_path, capsys):
    p = tmp_path / "params.txt"
    assert main(["params", "--modes", "8", "--degree", "1", "--raw-g", "2",
                 "--output", str(p)]) == 0
    bits = tmp_path / "bits.txt"
    bits.write_text("10000000\n01100000\n00000001\n")
    words = tmp_path / "words.txt"
    back = tmp_path / "back.txt"
    assert main(["encode", "--params-file", str(p), "--input", str(bits),
                 "--output", str(words)]) == 0
    assert main(["decode", "--params-file", str(p), "--input", str(words),
                 "--output", str(back)]) == 0
    assert back.read_text() == bits.read_text()
    capsys.readouterr()


def test_encode_rejects_overweight_pattern(tmp_path, capsys):
    p = tmp_path / "params.txt"
    assert main(["params", "--modes", "8", "--degree", "1", "--raw-g", "1",
                 "--output", str(p)]) == 0
    rc = main(["encode", "--params-file", str(p), "--bits", "01100000"])
    assert rc == 1
    assert "weight" in capsys.readouterr().err


def test_decode_rejects_non_codeword(capsys):
    rc = main(["decode", "--modes", "8", "--degree", "1", "--raw-g", "1",
               "--word", "010 100 100"])
    assert rc == 1
    assert capsys.readouterr().err.startswith("error:")


def test_verify_reports_pass(capsys):
    assert main(["verify", "--modes", "8", "--degree", "1", "--raw-g", "1"]) == 0
    out = capsys.readouterr().out
    assert "mode exhaustive" in out
    assert "passed yes" in out


# ---------------------------------------------------------------------------
# synthesis subcommands emit parseable programs


def test_synth_parity_program(tmp_path, capsys):
    out = tmp_path / "par.prog"
    assert main(["synth-parity", "--modes", "8", "--degree", "1",
                 "--raw-g", "1", "--bit", "3", "--output", str(out)]) == 0
    prog = parse_program(out.read_text())
    L = 3
    assert count_gates(prog).controlled == L * (2 * L - 1)
    capsys.readouterr()


def test_synth_hop_deterministic(tmp_path, capsys):
    args = ["synth-hop", "--modes", "8", "--degree", "1", "--raw-g", "2",
            "--mode-i", "5", "--mode-j", "6", "--phi", "1/2 pi"]
    a, b = tmp_path / "a.prog", tmp_path / "b.prog"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    prog = parse_program(a.read_text())
    assert prog.qubit_count == 27
    capsys.readouterr()


def test_synth_term_manifest(tmp_path, capsys):
    ham = tmp_path / "h.txt"
    ham.write_text("# two-mode check\n0.5 : 0^ 0\n0.25 : 1^ 0\n0.25 : 0^ 1\n")
    out_dir = tmp_path / "terms"
    assert main(["synth-term", "--modes", "8", "--degree", "1", "--raw-g", "2",
                 "--hamiltonian", str(ham), "--out-dir", str(out_dir)]) == 0
    stdout = capsys.readouterr().out
    assert stdout.splitlines()[0].startswith("terms ")
    assert "lambda " in stdout
    manifest = (out_dir / "manifest.csv").read_text().splitlines()
    assert manifest[0].startswith("index,x_bits,z_bits,coefficient")
    n_terms = int(stdout.split()[1])
    assert len(manifest) == n_terms + 1
    for k in range(n_terms):
        parse_program((out_dir / f"term_{k:03d}.prog").read_text())


def test_mcphase_route_and_simulate(tmp_path, capsys):
    prog_file = tmp_path / "mc.prog"
    assert main(["synth-mcphase", "--size", "3",
                 "--output", str(prog_file)]) == 0
    routed_file = tmp_path / "mc_routed.prog"
    assert main(["route", "--program", str(prog_file),
                 "--output", str(routed_file)]) == 0
    swaps_line = capsys.readouterr().out.strip()
    assert swaps_line.startswith("swaps ")
    routed = parse_program(routed_file.read_text())
    for g in routed.gates:
        wires = g.controls + g.targets
        if len(wires) == 2:
            assert abs(wires[0] - wires[1]) == 1

    assert main(["simulate", "--program", str(prog_file),
                 "--state", "1110"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1
    idx, re_part, im_part = out[0].split()
    assert idx == "7"
    assert float(re_part) == pytest.approx(-1.0, abs=1e-10)
    assert float(im_part) == pytest.approx(0.0, abs=1e-10)


# ---------------------------------------------------------------------------
# scans, estimates, comparison tables


def test_scan_hermite_matches_library(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert main(["scan-hermite", "--kind", "majority", "--from", "3",
                 "--to", "7", "--precision-bits", "160",
                 "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ("kind,size,degree,least_local_min,x_at_min,"
                        "minima_count,precision_bits")
    rows = scan("majority", [3, 5, 7], 160)
    for line, row in zip(lines[1:], rows):
        fields = line.split(",")
        assert int(fields[1]) == row.size
        assert float(fields[3]) == pytest.approx(float(row.least_local_min),
                                                 abs=1e-12)
    capsys.readouterr()


def test_scan_hermite_jobs_order_stable(tmp_path, capsys):
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    base = ["scan-hermite", "--kind", "ctrl_phase", "--from", "2", "--to", "5",
            "--precision-bits", "160"]
    assert main(base + ["--output", str(serial)]) == 0
    assert main(base + ["--jobs", "3", "--output", str(parallel)]) == 0
    assert serial.read_bytes() == parallel.read_bytes()
    capsys.readouterr()


def test_scan_threshold_csv_and_figure(tmp_path, capsys):
    out = tmp_path / "thr.csv"
    fig = tmp_path / "thr.png"
    assert main(["scan-threshold", "--l-max", "41", "--output", str(out),
                 "--figure", str(fig)]) == 0
    assert out.read_text() == threshold_to_csv(threshold_scan(41))
    assert fig.stat().st_size > 0
    assert capsys.readouterr().out.startswith("max_k ")


def test_estimate_projection_matches_library(capsys):
    assert main(["estimate", "--modes", "1000", "--fermions", "2",
                 "--degree", "auto", "--kind", "qdrift", "--lam", "1.0",
                 "--duration", "1.0", "--epsilon", "0.01"]) == 0
    out = capsys.readouterr().out
    from fermicode.resources import optimal_degree

    _, params = optimal_degree(1000, 2)
    expected = sim_cost_text(sim_cost("qdrift", 1.0, 1.0, 0.01, params))
    assert out.strip() == expected.strip()


def test_estimate_series_csv(tmp_path, capsys):
    out = tmp_path / "series.csv"
    fig = tmp_path / "series.png"
    assert main(["estimate", "--series", "1000,10000", "--fermions", "2",
                 "--output", str(out), "--figure", str(fig)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "encoding,modes,qubits"
    series = qubit_series([1000, 10000], 2)
    expected = sum(len(v) for v in series.values())
    assert len(lines) == expected + 1
    assert fig.stat().st_size > 0
    capsys.readouterr()


def test_compare_text_csv_figure(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    fig = tmp_path / "cmp.png"
    assert main(["compare", "--modes", "100", "--fermions", "2",
                 "--output", str(out), "--figure", str(fig)]) == 0
    text = capsys.readouterr().out
    assert "segment" in text and "*" in text
    assert out.read_text().startswith("encoding,qubits,gates,best,parameters")
    assert fig.stat().st_size > 0


def test_config_file_overrides_cost_constant(tmp_path, capsys, keep_config):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("cost_c = 4.0  # doubled\n")
    base = ["estimate", "--modes", "1000", "--fermions", "2", "--degree",
            "auto", "--kind", "qdrift", "--lam", "1.0", "--duration", "1.0",
            "--epsilon", "0.01"]
    assert main(base) == 0
    plain = capsys.readouterr().out
    assert main(["--config", str(cfg)] + base) == 0
    overridden = capsys.readouterr().out
    n_plain = int(plain.splitlines()[1].split()[-1])
    n_over = int(overridden.splitlines()[1].split()[-1])
    assert n_over == 2 * n_plain


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("bogus = 3\n")
    assert main(["--config", str(cfg), "params", "--modes", "8",
                 "--degree", "1", "--raw-g", "1"]) == 1
    assert "unknown setting" in capsys.readouterr().err


def test_repeated_runs_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    args = ["codebook", "--degree", "1", "--raw-g", "1", "--lprime", "3"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()
