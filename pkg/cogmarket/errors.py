"""
Exception hierarchy.

Each class carries the process exit code the CLI maps it to.
"""
from __future__ import annotations


class CoglabError(Exception):
    """Base class for every error raised deliberately by cogmarket."""

    exit_code = 1


class InputError(CoglabError, ValueError):
    """Malformed or inconsistent input data (reports, prices, samples)."""

    exit_code = 2


class ConfigError(CoglabError, ValueError):
    """Invalid model configuration."""

    exit_code = 3


class NumericError(CoglabError, ArithmeticError):
    """A computation is undefined for the given data (zero variance, rank deficiency...)."""

    exit_code = 4
