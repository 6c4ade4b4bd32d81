import pytest
from hypothesis import given, settings, strategies as st

from jsnlse.config import SCENARIOS, SCHEMA, parse_config
from jsnlse.errors import ConfigError, ConfigTypeError, MissingKey, UnknownKey


@pytest.mark.parametrize("scenario", ["evolve", "verify", "separability"])
def test_empty_text_gives_defaults(scenario):
    cfg = parse_config("", scenario)
    for key, spec in SCHEMA[scenario].items():
        if key != "out.dir":
            assert cfg[key] == spec.default


def test_values_comments_and_shift_steps():
    cfg = parse_config("# run\ngrid.n = 512\ngrid.length = 12.8  # dx = 0.025\nl = 0.1\n", "evolve")
    assert cfg["grid.n"] == 512
    assert cfg.shift_steps == 4
    assert cfg.evolution_config().params.length_scale_l == 0.1


def test_weight_out_of_range():
    with pytest.raises(ConfigTypeError, match="line 2"):
        parse_config("l = 0.2\npi = 1.5\n", "evolve")


def test_unknown_key_strict_and_lenient():
    with pytest.raises(UnknownKey, match="line 1"):
        parse_config("bogus = 1\n", "evolve")
    with pytest.warns(UserWarning):
        cfg = parse_config("bogus = 1\n", "evolve", strict=False)
    assert "bogus" not in cfg.values


def test_missing_required_key():
    with pytest.raises(MissingKey):
        parse_config("input.rho0 = a.csv\n", "measures")


def test_bad_type_duplicate_and_syntax():
    with pytest.raises(ConfigTypeError, match="line 3"):
        parse_config("\n\nsteps = many\n", "evolve")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("dt = 1e-3\ndt = 2e-3\n", "evolve")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words\n", "evolve")
    with pytest.raises(ConfigTypeError):
        parse_config("scheme = euler\n", "evolve")


def test_incommensurate_length_scale_rejected():
    with pytest.raises(ConfigTypeError, match="line 1"):
        parse_config("l = 0.15\n", "evolve")


def test_sweep_values_and_manifest():
    cfg = parse_config("sweep.parameter = dt\nsweep.values = 1e-3, 5e-4\n", "sweep", seed=7,
                       output_dir="o")
    assert cfg["sweep.values"] == [1e-3, 5e-4]
    text = cfg.manifest_text()
    assert "seed = 7" in text and "output_dir = o" in text
    keys = [line.split(" = ")[0] for line in text.splitlines()[3:]]
    assert keys == sorted(keys)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SCENARIOS), st.integers(1, 10 ** 6))
def test_unknown_keys_always_rejected(scenario, n):
    with pytest.raises(UnknownKey):
        parse_config(f"nope_{n} = 1\n", scenario)
