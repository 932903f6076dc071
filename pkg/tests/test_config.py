import pytest

from shiftspec import builtins as bi
from shiftspec.config import ConfigError, dump_config, load_config, parse_sequence_arg
from shiftspec.strobo import SequenceSpec


@pytest.mark.parametrize("name", sorted(bi.DIAGRAM))
def test_builtin_round_trip(name):
    cfg = bi.builtin_config(name)
    again = load_config(dump_config(cfg))
    assert again == cfg
    assert {k: v.value for k, v in bi.verdicts_for(again).items()} == {k: v.value for k, v in bi.verdicts_for(cfg).items()}


def test_parse_sequence_arg():
    assert parse_sequence_arg("naturals") == SequenceSpec.naturals()
    assert parse_sequence_arg("naturals:50").prefix()[-1] == 49
    assert parse_sequence_arg("arithmetic:3:6:10").prefix()[:3] == [3, 9, 15]
    assert parse_sequence_arg("explicit:1,4,9").prefix() == [1, 4, 9]
    for bad in ("primes", "arithmetic:1", "explicit:3,2", "naturals:x"):
        with pytest.raises(ConfigError):
            parse_sequence_arg(bad)


@pytest.mark.parametrize(
    "text",
    [
        "",
        'kind = "torus"\n[index_set]\nkind = "integers"\n[map]\nrule = "affine"\na = 1\nb = 0\n',
        'kind = "generalized_shift"\n[index_set]\nkind = "integers"\n[map]\nrule = "table"\ntable = [[1, 2]]\n',
        'kind = "generalized_shift"\n[index_set]\nkind = "integers"\n[map]\nrule = "affine"\na = 1\nb = 0\nextra = 3\n',
        'kind = "fort"\n[index_set]\nkind = "finite"\natoms = ["x"]\n[map]\nrule = "table"\ntable = [["x", "x"]]\n[fort]\nb = "y"\n',
    ],
)
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        load_config(text)


def test_toml_syntax_error_reports_position():
    with pytest.raises(ConfigError, match="line"):
        load_config("kind = = 2\n", "broken.toml")
