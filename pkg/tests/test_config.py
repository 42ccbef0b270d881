import pathlib

import pytest

from opachain import ConfigError, parse_config, read_config

FIXTURE = pathlib.Path(__file__).resolve().parent.parent / "configs" / "paper_replica.cfg"


def test_minimal_squeezer_config():
    cfg = parse_config(
        "squeezer.a_per_w = 19.1\n"
        "squeezer.loss = 0.425\n"
        "squeezer.pump_w = 0.1\n"
    )
    params = cfg.squeezer()
    assert params.a_per_w == 19.1
    assert params.loss == 0.425
    assert params.pump_w == 0.1
    levels = cfg.levels()
    assert levels.r_minus < 1.0 < levels.r_plus


def test_comments_and_blanks_ignored():
    cfg = parse_config(
        "# a comment\n"
        "\n"
        "gain.db = 23  # inline comment\n"
    )
    assert cfg.gain().g == pytest.approx(199.52623149688787, rel=1e-12)


def test_duplicate_key_names_both_lines():
    text = "gain.g = 10\n\ngain.g = 20\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 3
    assert "line 1" in str(info.value)


@pytest.mark.parametrize("text, line", [
    ("nonsense\n", 1),
    ("gain.g.extra = 1\n", 1),
    ("mystery.key = 1\n", 1),
    ("gain.watts = 1\n", 1),
    ("gain.g = ten\n", 1),
    ("\ngain.g = inf\n", 2),
    ("lockloop.max_steps = 1.5\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line


def test_gain_requires_exactly_one_form():
    with pytest.raises(ConfigError):
        parse_config("gain.g = 10\ngain.db = 10\n").gain()
    with pytest.raises(ConfigError):
        parse_config("").gain()


def test_missing_section_fields_are_named():
    cfg = parse_config("squeezer.a_per_w = 19.1\n")
    with pytest.raises(ConfigError) as info:
        cfg.squeezer()
    message = str(info.value)
    assert "squeezer.loss" in message
    assert "squeezer.pump_w" in message
    with pytest.raises(ConfigError):
        cfg.grid()
    with pytest.raises(ConfigError):
        cfg.lockloop()


def test_reference_fixture_parses():
    cfg = read_config(FIXTURE)
    assert cfg.gain().g == 200.0
    assert cfg.dispersion().d_ps_per_nm == 0.033
    assert cfg.grid().size == 901
    loop = cfg.lockloop()
    assert loop.ki == 1000.0
    assert loop.lock_nm == 1545.0
    assert cfg.seed() == 20260809
    levels = cfg.levels()
    assert abs(levels.r_minus_db - (-2.86)) < 0.01


def test_dispersion_defaults():
    cfg = parse_config("dispersion.d_ps_per_nm = 0.033\ndispersion.f0_thz = 194\n")
    model = cfg.dispersion()
    assert model.phi0_rad == 0.0


def test_seed_default():
    assert parse_config("").seed() == 0
    assert parse_config("run.seed = 7\n").seed() == 7
