"""Config defaults and validation."""

import pytest

from pvembed import DbowError, EmbedConfig


def test_defaults():
    cfg = EmbedConfig()
    assert cfg.dim == 300
    assert cfg.epochs == 10
    assert cfg.window == 15
    assert cfg.min_count == 5
    assert cfg.negative == 5
    assert cfg.subsample == 0.001
    cfg.validate()


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"dim": 0}, "dim"),
        ({"epochs": 0}, "epochs"),
        ({"window": -1}, "window"),
        ({"min_count": -1}, "min_count"),
        ({"negative": -1}, "negative"),
        ({"subsample": -0.1}, "subsample"),
        ({"alpha": 0.0}, "alpha"),
        ({"min_alpha": 0.0}, "min_alpha"),
        ({"alpha": 0.001, "min_alpha": 0.01}, "min_alpha"),
    ],
)
def test_invalid_config(kwargs, message):
    with pytest.raises(DbowError, match=message):
        EmbedConfig(**kwargs).validate()


def test_hash_depends_on_values():
    assert EmbedConfig().hash() == EmbedConfig().hash()
    assert EmbedConfig().hash() != EmbedConfig(dim=299).hash()
    assert len(EmbedConfig().hash()) == 16
