import pytest
import yaml

from znelab.config import ConfigError, ExperimentConfig, load_config, parse_config, shipped_scenarios
from znelab.noise import AR1, StepChange

SMALL = """
scenario: small
master_seed: 11
circuit: {n_qubits: 3, observable: z0}
sweep:
  noise_presets: [ideal]
  trotter_depths: [1]
  axes:
  - {name: n_shots, default: 256, alternatives: [128]}
  - {name: n_reps, default: 5}
  - {name: folding, default: local_left}
  - {name: extrapolation, default: richardson}
  - {name: scale_factors, default: [1, 3, 5]}
"""


def test_shipped_scenarios_round_trip():
    names = shipped_scenarios()
    assert {"default-sweep", "baseline-sweep", "weekend-drift", "day-drift", "constant-drift"} <= set(names)
    for name in names:
        config = load_config(name)
        again = parse_config(config.dump())
        assert again == config
        assert again.to_dict() == config.to_dict()
        assert again.digest == config.digest


def test_default_sweep_shape():
    config = load_config("default-sweep")
    assert len(config.sweep.points()) == 132
    assert len(load_config("baseline-sweep").sweep.points()) == 12


def test_weekend_profile_is_frozen():
    spec = load_config("weekend-drift").drift
    assert spec.schedule.n_points == 97 and spec.n_reps == 30
    assert spec.profile == StepChange(39.0, -0.005)


def test_defaults_fill_in():
    config = parse_config(SMALL)
    assert config.alpha == 0.05 and config.output_dir == "out"
    assert config.sweep.correction_family == "all"
    assert parse_config(config.dump()) == config


def test_profiles_round_trip():
    text = SMALL.replace("sweep:", """drift:
  interval_h: 1
  duration_h: 3
  noise_preset: kyoto-depolarising
  profile: {kind: ar1, rho: 0.8, sigma: 0.001, seed: 4}
sweep:""")
    config = parse_config(text)
    assert config.drift.profile == AR1(0.8, 0.001, 4)
    assert parse_config(config.dump()) == config


def test_digest_ignores_formatting_but_not_values():
    a = parse_config(SMALL)
    b = parse_config(yaml.safe_dump(yaml.safe_load(SMALL), default_flow_style=True))
    assert a.digest == b.digest
    assert a.with_seed(12).digest != a.digest


@pytest.mark.parametrize(
    "mutation, message",
    [
        (lambda d: d.pop("scenario"), "scenario"),
        (lambda d: d.update(colour=1), "unknown keys"),
        (lambda d: d["sweep"].update(noise_presets=["heron"]), "heron"),
        (lambda d: d["sweep"]["axes"].pop(), "exactly once"),
        (lambda d: d["sweep"]["axes"][0].update(alternatives=[256]), "exclude the default"),
        (lambda d: d["sweep"]["axes"][4].update(default=[1, 1]), "distinct"),
        (lambda d: d.update(alpha=2), "alpha"),
        (lambda d: d["circuit"].update(observable="x0"), "observable"),
        (lambda d: d.pop("sweep"), "'sweep' or a 'drift'"),
    ],
)
def test_invalid_configs(mutation, message):
    data = yaml.safe_load(SMALL)
    mutation(data)
    with pytest.raises(ConfigError, match=message):
        ExperimentConfig.from_dict(data)


def test_bad_yaml_and_missing_file():
    with pytest.raises(ConfigError, match="malformed"):
        parse_config("a: [1,")
    with pytest.raises(ConfigError, match="shipped"):
        load_config("/no/such/file.yaml")
