"""Settings and caps: env overrides and the key=value parser."""

import pytest
from pydantic import ValidationError

from linrec.config import Caps, Settings


def test_defaults():
    caps = Settings(_env_file=None).caps
    assert caps == Caps()
    assert caps.ceiling_bits == 2**20


def test_caps_string_overrides_fields(monkeypatch):
    monkeypatch.setenv("LINREC_MAX_TREES", "50")
    monkeypatch.setenv("LINREC_CAPS", "max_states=7, fuel=9")
    caps = Settings(_env_file=None).caps
    assert (caps.max_trees, caps.max_states, caps.fuel) == (50, 7, 9)


def test_parse_on_top_of_a_base():
    base = Caps(max_trees=5)
    caps = Caps.parse("max_label_size=3", base)
    assert (caps.max_trees, caps.max_label_size) == (5, 3)
    assert Caps.parse("") == Caps()


@pytest.mark.parametrize("text", ["nope=1", "max_trees", "max_trees=x"])
def test_parse_rejects_malformed_items(text):
    with pytest.raises(ValueError):
        Caps.parse(text)


def test_caps_must_be_positive():
    with pytest.raises(ValidationError):
        Caps.parse("max_trees=0")
    with pytest.raises(ValidationError):
        Caps(max_states=-1)
