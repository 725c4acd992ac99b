"""Observation panel and hypothesis specification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, EmptyPanelError, NonFiniteError, TooShortError

MIN_T = 3


class Side(str, enum.Enum):
    TWO_SIDED = "two"
    LEFT = "left"


class TestKind(str, enum.Enum):
    T = "t"
    FSV = "fsv"
    FSM = "fsm"
    FSS = "fss"
    RFSV = "rfsv"
    RFSM = "rfsm"
    RFSS = "rfss"

    __test__ = False  # keep pytest from collecting the enum

    @property
    def shrinks_variance(self) -> bool:
        return self in (TestKind.FSV, TestKind.FSS, TestKind.RFSV, TestKind.RFSS)

    @property
    def shrinks_mean(self) -> bool:
        return self in (TestKind.FSM, TestKind.FSS, TestKind.RFSM, TestKind.RFSS)

    def compatible_with(self, side: Side) -> bool:
        if self is TestKind.T:
            return True
        one_sided = self.value.startswith("r")
        return one_sided == (side is Side.LEFT)


def parse_kinds(text: str | Sequence[str]) -> list[TestKind]:
    items = text.split(",") if isinstance(text, str) else list(text)
    try:
        return [TestKind(s.strip().lower()) for s in items if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"unknown test kind in {text!r}") from exc


@dataclass(frozen=True)
class HypothesisSpec:
    """Null value ``phi0``, alternative side and average type-one error level."""

    phi0: float
    side: Side = Side.TWO_SIDED
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not np.isfinite(self.phi0):
            raise ConfigError("phi0 must be finite")

    def check_kinds(self, kinds: Sequence[TestKind]) -> None:
        bad = [k.value for k in kinds if not k.compatible_with(self.side)]
        if bad:
            raise ConfigError(f"kinds {bad} are incompatible with side={self.side.value}")


@dataclass(frozen=True)
class Panel:
    """N series (rows) observed at T time points (columns)."""

    data: np.ndarray
    series_ids: tuple = field(default=())

    def __post_init__(self):
        data = np.array(self.data, dtype=float)  # private copy
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        ids = tuple(self.series_ids) if len(self.series_ids) else tuple(
            str(i) for i in range(data.shape[0])
        )
        if len(ids) != data.shape[0]:
            raise ConfigError(f"{len(ids)} series ids for {data.shape[0]} series")
        object.__setattr__(self, "series_ids", ids)

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def T(self) -> int:
        return self.data.shape[1]


def validate_panel(raw, series_ids: Sequence | None = None) -> Panel:
    """Check shape and finiteness of ``raw`` and wrap it as a :class:`Panel`."""
    try:
        arr = np.asarray(raw, dtype=float)
    except ValueError as exc:
        raise DataError(f"panel is not a rectangular real matrix: {exc}") from exc
    if arr.ndim == 1 and arr.size == 0:
        raise EmptyPanelError()
    if arr.ndim != 2:
        raise ConfigError(f"panel must be a 2-D matrix, got {arr.ndim} dimensions")
    if arr.shape[0] == 0:
        raise EmptyPanelError()
    if arr.shape[1] < MIN_T:
        raise TooShortError(arr.shape[1], MIN_T)
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        row, col = bad[0]
        raise NonFiniteError(int(row), int(col))
    return Panel(arr, tuple(series_ids) if series_ids is not None else ())
