import os

import pytest

from ldit.config import RunConfig, load_config

ROOT = os.path.join(os.path.dirname(__file__), "..")


def test_defaults():
    cfg = RunConfig()
    assert cfg.clustering.k == 60 and cfg.clustering.seed == 42 and cfg.trackability.seed == 42
    assert cfg.trackability.trials == 20 and cfg.trackability.subset_fraction == 0.5
    assert cfg.trackability.window_days == 7.0 and cfg.trackability.step_s == 30.0
    assert cfg.ledger_path.endswith("ledger.ldit")
    assert os.path.exists(cfg.stations_path)


def test_bundled_config_resolves_paths():
    cfg = load_config(os.path.join(ROOT, "configs", "fixture.toml"))
    assert os.path.exists(cfg.inputs.tle)
    assert all(os.path.exists(p) for p in cfg.inputs.rcs)


def test_relative_paths_and_string_rcs(tmp_path):
    (tmp_path / "c.toml").write_text('out = "o"\n[inputs]\ntle = "x.tle"\nrcs = "r.csv"\n')
    cfg = load_config(tmp_path / "c.toml")
    assert cfg.inputs.tle == os.path.join(str(tmp_path), "x.tle")
    assert cfg.inputs.rcs == [os.path.join(str(tmp_path), "r.csv")]
    assert cfg.out == os.path.join(str(tmp_path), "o")


@pytest.mark.parametrize("body", [
    "bogus = 1\n",
    "[clustering]\nkk = 3\n",
    "[clustering]\nk = 0\n",
    "[trackability]\nsubset_fraction = 2.0\n",
    "[trackability]\nstep_s = 0.1\n",
])
def test_invalid_configs(tmp_path, body):
    (tmp_path / "c.toml").write_text(body)
    with pytest.raises(ValueError):
        load_config(tmp_path / "c.toml")
