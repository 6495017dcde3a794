from pathlib import Path

from core.config import Settings


def test_settings_defaults_without_environment():
    assert Settings.from_env({}) == Settings()
    assert Settings().window_ps == 1000


def test_settings_read_prefixed_variables(tmp_path):
    settings = Settings.from_env(
        {
            "ERASER_OUTPUT_DIR": str(tmp_path),
            "ERASER_WINDOW_PS": " 2500 ",
            "ERASER_SCENARIO_DIR": str(tmp_path / "labs"),
            "WINDOW_PS": "7",
        }
    )
    assert settings.output_dir == Path(tmp_path)
    assert settings.window_ps == 2500
    assert settings.scenario_dir == tmp_path / "labs"


def test_malformed_picosecond_values_fall_back():
    settings = Settings.from_env({"ERASER_OFFSET_BIN_PS": "fast", "ERASER_OFFSET_SPAN_PS": "-5"})
    assert settings.offset_bin_ps == 100
    assert settings.offset_span_ps == 2_000_000
