"""Tests for logging setup."""

import logging

import pytest

from boxkernel.logs import ENV_LOG_LEVEL, configure_logging, resolve_level


@pytest.mark.parametrize(
    "value, expected",
    [
        ("debug", logging.DEBUG),
        ("INFO", logging.INFO),
        (" error ", logging.ERROR),
        ("loud", logging.WARNING),
    ],
)
def test_level_from_environment(monkeypatch, value, expected):
    monkeypatch.setenv(ENV_LOG_LEVEL, value)
    assert resolve_level() == expected


def test_default_level(monkeypatch):
    monkeypatch.delenv(ENV_LOG_LEVEL, raising=False)
    assert resolve_level() == logging.WARNING


def test_verbose_raises_to_info(monkeypatch):
    monkeypatch.setenv(ENV_LOG_LEVEL, "error")
    assert resolve_level(verbose=True) == logging.INFO
    monkeypatch.setenv(ENV_LOG_LEVEL, "debug")
    assert resolve_level(verbose=True) == logging.DEBUG


def test_configure_is_idempotent(monkeypatch):
    monkeypatch.delenv(ENV_LOG_LEVEL, raising=False)
    configure_logging()
    logger = configure_logging(verbose=True)
    ours = [h for h in logger.handlers if getattr(h, "_boxkernel", False)]
    assert len(ours) == 1
    assert logger.level == logging.INFO
