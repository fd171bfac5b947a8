import json

import numpy as np
import pytest

from faamp.cli import main
from faamp.measurement import load_matrix, make_rademacher, save_matrix
from faamp.signal_model import Alphabet, draw_signal, observe


@pytest.fixture
def toy_instance(tmp_path):
    """Noiseless consistent instance whose AMP recovery is exact."""
    rng = np.random.default_rng(21)
    alph = Alphabet((-1.0, 1.0))
    m = make_rademacher(12, 9, rng)
    sig = draw_signal(alph, 2, 12, rng)
    v = observe(m, sig, 0.0, rng).samples
    mpath = tmp_path / "matrix.csv"
    vpath = tmp_path / "obs.txt"
    save_matrix(m, mpath)
    np.savetxt(vpath, v)
    return mpath, vpath, sig


def test_gen_matrix_roundtrip(tmp_path, capsys):
    out = tmp_path / "m.csv"
    rc = main(["--seed", "3", "--out", str(out), "gen-matrix",
               "--kind", "rademacher", "--W", "16", "--R", "8"])
    assert rc == 0
    m = load_matrix(out)
    assert m.entries.shape == (8, 16)
    assert m.meta["seed"] == 3


def test_gen_matrix_demodulator(tmp_path):
    out = tmp_path / "m.csv"
    rc = main(["--out", str(out), "gen-matrix", "--kind", "random_demodulator",
               "--W", "16", "--Rprime", "4"])
    assert rc == 0
    assert load_matrix(out).entries.shape == (8, 16)


def test_gen_matrix_missing_out_fails(capsys):
    rc = main(["gen-matrix", "--kind", "rademacher", "--W", "8", "--R", "4"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_recover_prints_exact_signal(toy_instance, capsys):
    mpath, vpath, sig = toy_instance
    # the assumed noise level regularizes message passing on a tiny graph;
    # the observation itself is noiseless and the recovery is exact
    rc = main(["recover", "--matrix", str(mpath), "--observation", str(vpath),
               "--sigma2", "0.01", "--K", "2"])
    assert rc == 0
    line = capsys.readouterr().out.splitlines()[0]
    got = np.array([float(x) for x in line.split(":")[1].split()])
    np.testing.assert_array_equal(got, sig.entries)


def test_oracle_matches_truth(toy_instance, capsys):
    mpath, vpath, sig = toy_instance
    rc = main(["oracle", "--matrix", str(mpath), "--observation", str(vpath),
               "--sigma2", "1e-6", "--K", "2"])
    assert rc == 0
    line = capsys.readouterr().out.splitlines()[0]
    got = np.array([float(x) for x in line.split(":")[1].split()])
    np.testing.assert_array_equal(got, sig.entries)


def test_sweep_writes_csv(tmp_path, capsys):
    cfg = dict(matrix_kind="rademacher", W=16, R=8, K=2,
               sigma2_grid_db=[14.0], trials_per_point=2, master_seed=5,
               T=10, algorithms=["amp_discrete", "amp_bpdn_k_largest"])
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "out.csv"
    rc = main(["--config", str(cfg_path), "--out", str(out), "sweep"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("matrix_kind,algorithm,decision_rule")


def test_sweep_requires_config(capsys):
    assert main(["sweep"]) == 1


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0


def test_selftest_reports(capsys, monkeypatch):
    import faamp.cli as cli

    def tiny_suite(master_seed):
        from faamp.selftest import run_equivalence_suite
        return run_equivalence_suite(n_instances=5, master_seed=master_seed)

    monkeypatch.setattr(cli, "run_equivalence_suite", tiny_suite)
    rc = main(["selftest"])
    assert rc == 0
    assert "PASS" in capsys.readouterr().out
