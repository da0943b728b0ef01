"""Shared exception types.

Exit-code mapping lives in the CLI: input problems exit 2, resource caps
exit 3, verification failures exit 4.
"""
from __future__ import annotations


class InvalidInput(ValueError):
    """Malformed game/comm-graph/predicate/profile input."""


class IncompatibleSuccessor(ValueError):
    """Successor vertex not reachable by any single-player deviation."""


class CapExceeded(RuntimeError):
    """A configured resource cap was hit; raised with a diagnostic message."""


class StateCapExceeded(CapExceeded):
    pass


class LarCapExceeded(CapExceeded):
    pass


class KnowledgeMismatch(RuntimeError):
    """Derived knowledge disagrees with the literal update oracle."""


class ProfileInputRejected(ValueError):
    """A profile machine received an observation inconsistent with a single
    honest deviation (malformed messages, impossible vertex, ...)."""


class NormednessViolation(ValueError):
    """A profile broke one of the message-discipline conditions."""


class StrategyUndefined(RuntimeError):
    """A strategy had no entry for a reachable state of the verification product."""
