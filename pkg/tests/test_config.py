import pytest

from trisw.config import ConfigError, parse_config


def test_tokens_valid():
    cfg = parse_config(["scenario=steady_slope", "regime=supercritical", "nx=200", "ny=16"])
    assert cfg.scenario == "steady_slope"
    assert cfg.params == {"regime": "supercritical"}
    assert (cfg.nx, cfg.ny, cfg.cfl) == (200, 16, 0.25)


def test_file_and_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# dam break\nscenario = dam_break\nt_end = 5\ncfl=0.3\n"
                 "gauges = A:1.0:0.5; B:2.0:0.5\nsnapshot_times = 1, 2.5\n")
    cfg = parse_config(str(p), ["--t-end=2", "closed=true"])
    assert cfg.t_end == 2.0 and cfg.cfl == 0.3
    assert cfg.params == {"closed": True}
    assert cfg.gauges == [("A", 1.0, 0.5), ("B", 2.0, 0.5)]
    assert cfg.snapshot_times == [1.0, 2.5]


def test_cfl_range():
    with pytest.raises(ConfigError) as e:
        parse_config(["scenario=dam_break", "cfl=1.5"])
    assert e.value.key == "cfl"


def test_empty_lists_required_keys():
    with pytest.raises(ConfigError, match="missing required key.*scenario"):
        parse_config([])


@pytest.mark.parametrize("tokens,key", [
    (["scenario=dam_break", "nx=abc"], "nx"),
    (["scenario=dam_break", "speed=3"], "speed"),
    (["scenario=dam_break", "regime=subcritical"], "regime"),
    (["scenario=atlantis"], "scenario"),
    (["scenario=dam_break", "mesh=/nonexistent.mesh"], "mesh"),
    (["scenario=periodic_wave", "series=/nonexistent.csv"], "series"),
    (["scenario=dam_break", "snapshot_format=png"], "snapshot_format"),
    (["scenario=dam_break", "gauges=A:1"], "gauges"),
])
def test_errors_name_the_key(tokens, key):
    with pytest.raises(ConfigError) as e:
        parse_config(tokens)
    assert e.value.key == key
    assert key in str(e.value)


def test_bad_line_reports_line_number(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("scenario=dam_break\nnonsense\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config(str(p))


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/no/such/file.cfg")
