import os
import stat
import subprocess
import sys

import numpy as np
import pytest

from chaoscomp.analysis import read_bitstream, bits_from_bytes
from chaoscomp.cli import KEY_ENV, main
from chaoscomp.corpus import text_corpus
from chaoscomp.keys import KEY_FILE_SIZE, parse_key, serialize_key


@pytest.fixture
def keyfile(tmp_path, key):
    path = tmp_path / "k.key"
    path.write_bytes(serialize_key(key))
    return path


def test_keygen(tmp_path):
    a, b = tmp_path / "a.key", tmp_path / "b.key"
    assert main(["keygen", "--out", str(a)]) == 0
    assert main(["keygen", "--out", str(b)]) == 0
    assert a.stat().st_size == b.stat().st_size == KEY_FILE_SIZE
    assert stat.S_IMODE(a.stat().st_mode) == 0o600
    assert parse_key(a.read_bytes()) != parse_key(b.read_bytes())
    # refuses to clobber without --force
    assert main(["keygen", "--out", str(a)]) == 12
    assert main(["keygen", "--out", str(a), "--force"]) == 0


def test_key_only_accepted_as_path():
    from chaoscomp.cli import build_parser
    subparsers = build_parser()._subparsers._group_actions[0].choices
    for name, sub in subparsers.items():
        for action in sub._actions:
            if "key" in action.dest:
                assert action.dest == "key" and action.metavar == "PATH", name


def test_error_messages_do_not_echo_key(tmp_path, keyfile, capsys):
    blob = keyfile.read_bytes()
    bad = tmp_path / "bad.key"
    bad.write_bytes(blob[:-1] + bytes([blob[-1] ^ 1]))
    assert main(["encrypt", "--key", str(bad), "-i", "-", "-o", "-"]) == 3
    err = capsys.readouterr().err
    assert blob[6:20].hex() not in err and "checksum" in err


def test_roundtrip_files(tmp_path, keyfile):
    src, enc, dec = tmp_path / "p", tmp_path / "c", tmp_path / "d"
    src.write_bytes(text_corpus(300_000))
    assert main(["encrypt", "--key", str(keyfile), "-i", str(src), "-o", str(enc),
                 "--chunk-size", "64K"]) == 0
    assert enc.read_bytes()[:4] == b"SOC1"
    assert main(["decrypt", "--key", str(keyfile), "-i", str(enc), "-o", str(dec)]) == 0
    assert dec.read_bytes() == src.read_bytes()


@pytest.mark.parametrize("mode", ["sce", "cte", "etc"])
def test_roundtrip_modes_via_env(tmp_path, keyfile, monkeypatch, mode):
    monkeypatch.setenv(KEY_ENV, str(keyfile))
    src, enc, dec = tmp_path / "p", tmp_path / "c", tmp_path / "d"
    src.write_bytes(b"mode test " * 1000)
    assert main(["encrypt", "-i", str(src), "-o", str(enc), "--mode", mode,
                 "--codec", "store"]) == 0
    assert main(["decrypt", "-i", str(enc), "-o", str(dec)]) == 0
    assert dec.read_bytes() == src.read_bytes()


def test_wrong_key_leaves_no_output(tmp_path, keyfile, random_keys, capsys):
    src, enc, dec = tmp_path / "p", tmp_path / "c", tmp_path / "d"
    src.write_bytes(text_corpus(50_000))
    main(["encrypt", "--key", str(keyfile), "-i", str(src), "-o", str(enc)])
    other = tmp_path / "other.key"
    other.write_bytes(serialize_key(random_keys[0]))
    code = main(["decrypt", "--key", str(other), "-i", str(enc), "-o", str(dec)])
    assert code in (5, 6)
    assert not dec.exists()
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".d")] == []
    assert other.read_bytes().hex() not in capsys.readouterr().err


@pytest.mark.parametrize("args,code", [
    (["encrypt", "-i", "/nonexistent", "-o", "-"], 12),
    (["decrypt", "-o", "-"], 4),
])
def test_error_exit_codes(tmp_path, keyfile, args, code, monkeypatch):
    monkeypatch.setenv(KEY_ENV, str(keyfile))
    if "-i" not in args:
        bad = tmp_path / "junk"
        bad.write_bytes(b"not a container at all")
        args = args + ["-i", str(bad)]
    assert main(args) == code


def test_missing_key_is_usage_error(tmp_path, monkeypatch):
    monkeypatch.delenv(KEY_ENV, raising=False)
    assert main(["encrypt", "-i", "-", "-o", str(tmp_path / "x")]) == 2


def test_damaged_key_file(tmp_path):
    bad = tmp_path / "bad.key"
    bad.write_bytes(b"\x00" * KEY_FILE_SIZE)
    assert main(["encrypt", "--key", str(bad), "-i", "-", "-o", "-"]) == 3


def test_empty_input_exit_code(tmp_path, keyfile):
    empty = tmp_path / "e"
    empty.write_bytes(b"")
    assert main(["encrypt", "--key", str(keyfile), "-i", str(empty),
                 "-o", str(tmp_path / "c")]) == 8
    assert not (tmp_path / "c").exists()


def _run(args, **kw):
    return subprocess.run([sys.executable, "-m", "chaoscomp.cli", *args],
                          capture_output=True, **kw)


MAXRSS = ("import resource, runpy, sys; sys.argv = ['chaoscomp'] + sys.argv[1:]\n"
          "try:\n    runpy.run_module('chaoscomp.cli', run_name='__main__')\n"
          "finally:\n    sys.stderr.write('MAXRSS %d\\n' % "
          "resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)\n")


def _peak_rss_kb(args, stdin_path, stdout_path):
    with open(stdin_path, "rb") as fin, open(stdout_path, "wb") as fout:
        r = subprocess.run([sys.executable, "-c", MAXRSS, *args], stdin=fin, stdout=fout,
                           stderr=subprocess.PIPE, check=True)
    line = [l for l in r.stderr.decode().splitlines() if l.startswith("MAXRSS")][-1]
    return int(line.split()[1])


def test_stdin_stdout_streaming_bounded_memory(tmp_path, keyfile):
    text = text_corpus(1 << 20)
    small, big = tmp_path / "small", tmp_path / "big"
    small.write_bytes(text)
    with open(big, "wb") as fh:
        for i in range(100):
            fh.write(bytes([i]) + text[1:])
    env_args = ["--key", str(keyfile)]
    rss = {}
    for name, path in (("small", small), ("big", big)):
        enc, dec = tmp_path / f"{name}.c", tmp_path / f"{name}.d"
        rss[name, "enc"] = _peak_rss_kb(["encrypt", *env_args], path, enc)
        rss[name, "dec"] = _peak_rss_kb(["decrypt", *env_args], enc, dec)
        assert dec.stat().st_size == path.stat().st_size
    assert (tmp_path / "big.d").read_bytes() == big.read_bytes()
    # 100x more data may not cost more than a few chunks of extra memory
    for stage in ("enc", "dec"):
        assert rss["big", stage] - rss["small", stage] < 32 * 1024, rss


def test_characterize_lyapunov(tmp_path):
    out = tmp_path / "le.csv"
    assert main(["characterize", "logistic", "lyapunov", "--param", "4",
                 "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    value = float(rows[1].split(",")[-1])
    assert value == pytest.approx(0.6931, abs=0.01)


def test_characterize_bifurcation_shape(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["characterize", "logistic", "bifurcation", "--steps", "30",
                 "--samples", "16", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 30 * 16


def test_characterize_and_bench_maps(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["characterize", "henon", "bench", "--length", "64K", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 2 and float(rows[1].split(",")[1]) > 0
    assert main(["bench", "maps", "--length", "64K", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == len({r.split(",")[0] for r in rows}) >= 4
    assert all(float(r.split(",")[1]) > 0 for r in rows)


def test_bench_codec_and_pipeline(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["bench", "codec", "--length", "200K", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "codec,ratio,seconds"
    assert main(["bench", "pipeline", "--corpus", "zipf", "--length", "100K",
                 "--codecs", "baseline", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "mode,codec,ratio,encrypt_s,decrypt_s" and len(rows) == 4


def test_analyze_nist_prints_seven_pvalues(keyfile, capsys):
    assert main(["analyze", "nist", "--key", str(keyfile)]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if "p = " in l]
    assert len(lines) == 7
    assert all(0 <= float(l.split("p = ")[1]) <= 1 for l in lines)


def test_analyze_nist_short_input(tmp_path):
    f = tmp_path / "short"
    f.write_bytes(b"\x55" * 10)
    assert main(["analyze", "nist", "--input", str(f)]) == 9


def test_analyze_chen(keyfile, capsys):
    assert main(["analyze", "chen", "--key", str(keyfile), "--trials", "100"]) == 0
    assert "0 violations" in capsys.readouterr().out


def test_analyze_sensitivity_csv(tmp_path, keyfile, capsys):
    out = tmp_path / "s.csv"
    assert main(["analyze", "ptsens", "--key", str(keyfile), "--length", "64K",
                 "--trials", "3", "--seed", "1", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0].startswith("metric,bit,cc") and len(rows) == 4
    first = out.read_text()
    main(["analyze", "ptsens", "--key", str(keyfile), "--length", "64K",
          "--trials", "3", "--seed", "1", "--out", str(out)])
    assert out.read_text() == first  # deterministic given a seed


def test_analyze_cc_files(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(bytes(range(256)))
    b.write_bytes(bytes(range(256)))
    assert main(["analyze", "cc", "--input", str(a), "--other", str(b)]) == 0
    assert "cc = 1 over 256 bytes" in capsys.readouterr().out


def test_export_bits(tmp_path):
    src, out = tmp_path / "c", tmp_path / "bits.txt"
    data = np.random.default_rng(1).bytes(500)
    src.write_bytes(data)
    assert main(["analyze", "export-bits", "--input", str(src), "--out", str(out)]) == 0
    text = out.read_text()
    assert set(text) == {"0", "1"} and len(text) == 4000
    assert np.array_equal(read_bitstream(out), bits_from_bytes(data))


def test_help_lists_subcommands():
    r = _run(["--help"], check=True)
    for name in ("keygen", "encrypt", "decrypt", "characterize", "analyze", "bench"):
        assert name in r.stdout.decode()
