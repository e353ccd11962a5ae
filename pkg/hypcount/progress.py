"""Rich progress display for family sweeps."""

from __future__ import annotations
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import Any, TypeAlias
from typing_extensions import Self, override

from rich.console import Console, RenderableType
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    ProgressColumn,
    Task,
    TaskID,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Column
from rich.text import Text

__all__ = ["ProgressTheme", "SweepProgress"]


@dataclass(frozen=True)
class _Palette:
    description: str
    progress_bar: str
    progress_bar_finished: str
    count: str
    time: str
    failures: str


def _quaterion_theme() -> _Palette:
    return _Palette(
        description="white",
        progress_bar="#4881AD",
        progress_bar_finished="#67C87A",
        count="white",
        time="grey54",
        failures="#d62d20",
    )


def _cyberpunk_theme() -> _Palette:
    return _Palette(
        description="#FF00CF",
        progress_bar="#001eff",
        progress_bar_finished="#00ff9f",
        count="#FF00CF",
        time="#00b8ff",
        failures="#FF46D6",
    )


def _google_theme() -> _Palette:
    return _Palette(
        description="#008744",
        progress_bar="#0057e7",
        progress_bar_finished="#d62d20",
        count="#ffa700",
        time="white",
        failures="#d62d20",
    )


class ProgressTheme(Enum):
    QUATERION = (_quaterion_theme,)
    CYBERPUNK = (_cyberpunk_theme,)
    GOOGLE = (_google_theme,)

    def __init__(self, load: Callable[[], _Palette]) -> None:
        self.load = load


class _FailedRowsColumn(ProgressColumn):
    """Number of rows flagged as failed so far."""

    def __init__(self, style: str | Any) -> None:
        super().__init__()
        self.style = style

    @override
    def render(self, task: Task) -> RenderableType:
        failed = task.fields.get("failed", 0)
        return Text(f"{failed} failed" if failed else "", style=self.style)


class SweepProgress:
    """One progress bar over the members of a family, used as a context manager."""

    Theme: TypeAlias = ProgressTheme

    def __init__(
        self,
        total: int,
        *,
        description: str = "Sweeping",
        theme: Theme = Theme.CYBERPUNK,
        console: Console | None = None,
        disable: bool = False,
    ) -> None:
        palette = theme.load()
        self.total = total
        self.description = description
        self.failed = 0
        self.progress = Progress(
            TextColumn(
                f"[{palette.description}]{{task.description}}",
                table_column=Column(no_wrap=True, min_width=9),
            ),
            BarColumn(
                complete_style=palette.progress_bar,
                finished_style=palette.progress_bar_finished,
            ),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            _FailedRowsColumn(style=palette.failures),
            console=console,
            disable=disable,
            transient=True,
        )
        self._task: TaskID | None = None

    def __enter__(self) -> Self:
        self.progress.start()
        self._task = self.progress.add_task(self.description, total=self.total, failed=0)
        return self

    def __exit__(self, *exc: object) -> None:
        self.progress.stop()

    def advance(self, label: str, *, failed: bool = False) -> None:
        if self._task is None:
            return
        self.failed += failed
        self.progress.update(
            self._task,
            advance=1,
            description=f"{self.description} ({label})",
            failed=self.failed,
        )
