"""Exception hierarchy shared by the tools, the runner, the CLI and the API."""

from __future__ import annotations

from typing import Any


class KdomError(Exception):
    """Base class for every error raised by the workbench."""


class InputError(KdomError, ValueError):
    """A precondition on the inputs does not hold."""


class RoundLimitExceeded(KdomError):
    """Some node was still running after max_rounds; carries the partial trace."""

    def __init__(self, msg: str, trace: Any):
        super().__init__(msg)
        self.trace = trace


class BudgetExceeded(KdomError):
    """An exhaustive search ran out of budget before it could certify an answer."""

    def __init__(self, msg: str, explored: int):
        super().__init__(msg)
        self.explored = explored


class ContractFailure(KdomError):
    """A partition meeting the boundary target was not found within the radius cap."""

    def __init__(self, msg: str, achieved: float, radius_cap: int | None):
        super().__init__(msg)
        self.achieved = achieved
        self.radius_cap = radius_cap
