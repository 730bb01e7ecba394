import warnings

import pytest

from hodgeforge.config.loader import DEFAULT_CONFIG_PATH, apply_env_overrides, load_config


def test_packaged_defaults():
    cfg = load_config()
    assert cfg.report.format == "md"
    assert cfg.checks.fw_shift == -4
    assert cfg.checks.fw_shift_literal == 0
    assert cfg.checks.saito_shift == -2
    assert cfg.probe.trials == 200
    assert cfg.pool.threads == 4
    assert cfg.toric.ray_order == "forward"
    assert load_config(str(DEFAULT_CONFIG_PATH)).model_dump() == cfg.model_dump()


def test_partial_file_keeps_defaults(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("checks:\n  fw_shift: 0\nreport:\n", encoding="utf-8")
    cfg = load_config(str(path))
    assert cfg.checks.fw_shift == 0
    assert cfg.checks.saito_shift == -2
    assert cfg.report.format == "md"
    assert cfg.pool.threads == 4


def test_empty_file_is_all_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(str(path)).model_dump() == load_config().model_dump()


def test_loading_uses_no_deprecated_model_api(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("pool:\n  threads: 2\n", encoding="utf-8")
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        cfg = load_config(str(path))
        with pytest.raises(ValueError):
            path.write_text("colour: blue\n", encoding="utf-8")
            load_config(str(path))
    assert cfg.pool.threads == 2


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "nope.yaml"))


@pytest.mark.parametrize("text,needle", [
    ("fw: -4\n", "Legacy config key 'fw'"),
    ("seed: 1\n", "Legacy config key 'seed'"),
    ("colour: blue\n", "Unknown config keys: colour"),
    ("- a\n- b\n", "must be a mapping"),
])
def test_rejected_files(tmp_path, text, needle):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ValueError) as exc:
        load_config(str(path))
    assert needle in str(exc.value)


def test_environment_wins(monkeypatch):
    monkeypatch.setenv("HODGEFORGE_THREADS", "0")
    monkeypatch.setenv("HODGEFORGE_FW_SHIFT", "0")
    monkeypatch.setenv("HODGEFORGE_SEED", "17")
    monkeypatch.setenv("HODGEFORGE_LOG_LEVEL", "DEBUG")
    cfg = apply_env_overrides(load_config())
    assert cfg.pool.threads == 1
    assert cfg.checks.fw_shift == 0
    assert cfg.probe.seed == 17
    assert cfg.log_level == "DEBUG"


def test_malformed_environment_is_ignored(monkeypatch):
    monkeypatch.setenv("HODGEFORGE_SAITO_SHIFT", "minus two")
    assert apply_env_overrides(load_config()).checks.saito_shift == -2
