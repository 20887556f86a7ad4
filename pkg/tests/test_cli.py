import json

import numpy as np

from rkem.cli import EXIT_DECAP, EXIT_IO, EXIT_OK, EXIT_USAGE, run


def _keygen(tmp_path, *extra, preset="toy8", seed="7", name="k"):
    pub, priv = tmp_path / f"{name}.pub", tmp_path / f"{name}.priv"
    rc = run(["keygen", "--preset", preset, "--seed", seed, "--out-pub", str(pub), "--out-priv", str(priv), *extra])
    assert rc == EXIT_OK
    return pub, priv


def test_keygen_is_reproducible(tmp_path):
    a_pub, a_priv = _keygen(tmp_path, name="a")
    b_pub, b_priv = _keygen(tmp_path, name="b")
    assert a_pub.read_bytes() == b_pub.read_bytes()
    assert a_priv.read_bytes() == b_priv.read_bytes()
    c_pub, _ = _keygen(tmp_path, seed="8", name="c")
    assert c_pub.read_bytes() != a_pub.read_bytes()


def test_keygen_rm16_is_reproducible(tmp_path):
    a_pub, _ = _keygen(tmp_path, preset="rm16", name="a")
    b_pub, _ = _keygen(tmp_path, preset="rm16", name="b")
    assert a_pub.read_bytes() == b_pub.read_bytes()


def test_encap_decap_roundtrip(tmp_path, capsys):
    pub, priv = _keygen(tmp_path)
    capsys.readouterr()
    ct = tmp_path / "m.ct"
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--seed", "3"]) == EXIT_OK
    sent = capsys.readouterr().out.strip()
    assert run(["decap", "--priv", str(priv), "--ct", str(ct)]) == EXIT_OK
    got = capsys.readouterr().out.strip()
    assert sent == got
    assert len(sent) == 2

    first = ct.read_bytes()
    run(["encap", "--pub", str(pub), "--ct", str(ct), "--seed", "3"])
    assert ct.read_bytes() == first


def test_encap_with_given_key_and_json(tmp_path, capsys):
    pub, priv = _keygen(tmp_path)
    ct = tmp_path / "m.ct"
    capsys.readouterr()
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--key", "a5", "--seed", "1", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["key"] == "a5" and data["seed"] == 1 and data["budget"] == 1
    assert run(["decap", "--priv", str(priv), "--ct", str(ct), "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["key"] == "a5"


def test_missing_seed_is_reported(tmp_path, capsys):
    pub, _ = _keygen(tmp_path)
    capsys.readouterr()
    assert run(["encap", "--pub", str(pub), "--ct", str(tmp_path / "m.ct")]) == EXIT_OK
    assert "seed:" in capsys.readouterr().err


def test_common_randomness_files(tmp_path, capsys):
    pub, priv = _keygen(tmp_path, "--r1-size", "5", "--r2-size", "3")
    bob, alice = tmp_path / "bob.bits", tmp_path / "alice.bits"
    rc = run(["simulate", "rtt", "--seed", "2", "--pub", str(pub), "--bits-a", str(alice), "--bits-b", str(bob),
              "--private-noise", "1e-9"])
    assert rc == EXIT_OK
    lines = bob.read_text().splitlines()
    assert [len(line) for line in lines] == [5, 3]
    capsys.readouterr()
    ct = tmp_path / "m.ct"
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--seed", "4", "--cr-bits", str(bob)]) == EXIT_OK
    sent = capsys.readouterr().out.strip()
    assert run(["decap", "--priv", str(priv), "--ct", str(ct), "--cr-bits", str(alice)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == sent


def test_decap_failure_exit_code(tmp_path, capsys):
    pub, priv = _keygen(tmp_path, "--cr-full-mask", preset="rm16")
    s = 901
    bob, alice = tmp_path / "bob.bits", tmp_path / "alice.bits"
    bob.write_text("0" * s + "\n\n")
    bits = np.random.default_rng(0).integers(0, 2, s)
    alice.write_text("".join(map(str, bits)) + "\n\n")
    ct = tmp_path / "m.ct"
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--seed", "1", "--cr-bits", str(bob)]) == EXIT_OK
    capsys.readouterr()
    assert run(["decap", "--priv", str(priv), "--ct", str(ct), "--cr-bits", str(alice)]) == EXIT_DECAP
    assert capsys.readouterr().err.startswith("Error:")


def test_error_exit_codes(tmp_path, capsys):
    pub, priv = _keygen(tmp_path)
    ct = tmp_path / "m.ct"
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--budget", "2", "--seed", "1"]) == EXIT_USAGE
    garbage = tmp_path / "garbage.priv"
    garbage.write_bytes(b"not a key")
    run(["encap", "--pub", str(pub), "--ct", str(ct), "--seed", "1"])
    assert run(["decap", "--priv", str(garbage), "--ct", str(ct)]) == EXIT_IO
    assert run(["decap", "--priv", str(tmp_path / "missing"), "--ct", str(ct)]) == EXIT_IO
    assert run(["decap", "--priv", str(pub), "--ct", str(ct)]) == EXIT_IO
    assert run([]) == EXIT_USAGE
    assert run(["keygen", "--preset", "rm64", "--out-pub", "a", "--out-priv", "b"]) == EXIT_USAGE

    # toy8 keys are 8 bits: "zz" is not hex and "fff" is out of range
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--key", "zz", "--seed", "1"]) == EXIT_USAGE
    assert run(["encap", "--pub", str(pub), "--ct", str(ct), "--key", "fff", "--seed", "1"]) == EXIT_USAGE

    _, big_priv = _keygen(tmp_path, preset="rm16", name="big")
    capsys.readouterr()
    assert run(["decap", "--priv", str(big_priv), "--ct", str(ct)]) == EXIT_IO
    assert "expects 875" in capsys.readouterr().err


def test_analyze_table(capsys):
    assert run(["analyze", "--preset", "rm16"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "788375" in out and "53" in out
    assert "7.60" in out
    assert run(["analyze", "--format", "csv"]) == EXIT_OK
    csv = capsys.readouterr().out.splitlines()
    assert csv[0].startswith("scheme,")
    assert len(csv) == 4
    assert run(["analyze", "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["count"] == 3


def test_simulate_rtt_csv(capsys):
    assert run(["simulate", "rtt", "--packets", "50", "--seed", "1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "packet_index,rtt_a,rtt_b,bit_a,bit_b"
    assert len(lines) == 51


def test_simulate_consolidation_is_reproducible(capsys):
    argv = ["simulate", "consolidation", "--preset", "toy8", "--eps-sweep", "0:0.2:3", "--trials", "30", "--seed", "5"]
    assert run(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert run(argv + ["--workers", "3"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert first.splitlines()[0].startswith("epsilon,block_error_rate,key_failure_rate,trials")
    assert run(argv[:-4] + ["--eps-sweep", "bad"]) == EXIT_USAGE


def test_attack_toy(capsys):
    assert run(["attack", "toy", "--sec", "7", "--seed", "3"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["candidates_tested"] == 196
    assert data["true_key_accepted"] is True
    assert run(["attack", "toy", "--sec", "64", "--seed", "3"]) == EXIT_USAGE
