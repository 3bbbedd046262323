import pytest

from services.config import BoostConfig, RunConfig
from services.errors import ConfigError


def test_defaults():
    cfg = RunConfig.from_sources()
    assert cfg.trials == 10_000
    assert cfg.noise == 'exact'
    assert cfg.level_offset == 6
    assert cfg.fan_in == 2


def test_flags_override_file_values():
    cfg = RunConfig.from_sources({'trials': '500', 'seed': '3'}, {'trials': 20, 'seed': None})
    assert cfg.trials == 20
    assert cfg.seed == 3


def test_values_are_coerced():
    cfg = RunConfig.from_sources({'allow_large_level': 'yes', 'eps': '1e-6', 'work-budget': '1000'})
    assert cfg.allow_large_level is True
    assert cfg.eps == 1e-6
    assert cfg.work_budget == 1000


def test_unknown_key_gets_a_hint():
    with pytest.raises(ConfigError) as exc:
        RunConfig.from_sources({'trails': '10'})
    assert "did you mean 'trials'" in str(exc.value)


def test_noise_alias_resolves():
    assert RunConfig.from_sources(flag_values={'noise': 'plus'}).noise == 'fixed_plus'


@pytest.mark.parametrize("values", [
    {'noise': 'gaussian'},
    {'strategy': 'bush'},
    {'fan_in': '1'},
    {'eps': '2.0'},
    {'trials': 'many'},
    {'control': 'maybe'},
    {'enum_cap': '99'},
    {'level': '4096'},
    {'level_offset': '1001'},
])
def test_bad_values_are_rejected(values):
    with pytest.raises(ConfigError):
        RunConfig.from_sources(values)


def test_from_file_reads_dotenv(tmp_path):
    path = tmp_path / 'run.env'
    path.write_text("# sweep settings\nTRIALS=250\nnoise=fixed_minus\neps=0.001\n")
    cfg = RunConfig.from_file(str(path), {'seed': 9})
    assert cfg.trials == 250
    assert cfg.noise == 'fixed_minus'
    assert cfg.seed == 9


def test_missing_file():
    with pytest.raises(ConfigError):
        RunConfig.from_file('/nonexistent/run.env')


def test_environment_budget(monkeypatch):
    monkeypatch.setenv('LB_WORK_BUDGET', '12345')
    assert BoostConfig.work_budget() == 12345
    assert RunConfig.from_sources().effective_work_budget() == 12345
    assert RunConfig.from_sources({'work_budget': '7'}).effective_work_budget() == 7
    monkeypatch.setenv('LB_WORK_BUDGET', 'lots')
    with pytest.raises(ConfigError):
        BoostConfig.work_budget()


def test_environment_budget_unset(monkeypatch):
    monkeypatch.delenv('LB_WORK_BUDGET', raising=False)
    assert BoostConfig.work_budget() == BoostConfig.WORK_BUDGET_DEFAULT


def test_validate_config_rejects_bad_constants(monkeypatch):
    monkeypatch.setattr(BoostConfig, 'ENUM_CAP_DEFAULT', 50)
    with pytest.raises(ValueError):
        BoostConfig.validate_config()
    monkeypatch.setattr(BoostConfig, 'ENUM_CAP_DEFAULT', 30)
    monkeypatch.setattr(BoostConfig, 'NORM_TOL', 0.5)
    with pytest.raises(ValueError):
        BoostConfig.validate_config()


def test_level_limit_is_inclusive():
    assert RunConfig.from_sources({'level': str(BoostConfig.LEVEL_MAX)}).level == BoostConfig.LEVEL_MAX
