from __future__ import annotations

import os
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import TextIO

import structlog

logger = structlog.get_logger(__name__)


def _temp_beside(target: Path) -> tuple[Path, TextIO]:
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=directory)
    return Path(tmp_name), os.fdopen(fd, "w", encoding="utf-8", newline="")


@contextmanager
def atomic_text_outputs(*paths: Path | str) -> Iterator[list[TextIO]]:
    """Write several files through sibling temp files, committed together.

    Targets are moved into place only after the body finishes for all of
    them. On any failure every temp file is removed, and targets already
    moved in by this call are deleted again.
    """
    targets = [Path(p) for p in paths]
    tmps: list[Path] = []
    streams: list[TextIO] = []
    try:
        for target in targets:
            tmp, stream = _temp_beside(target)
            tmps.append(tmp)
            streams.append(stream)
        yield streams
        for stream in streams:
            stream.close()
        committed: list[Path] = []
        try:
            for tmp, target in zip(tmps, targets, strict=True):
                os.replace(tmp, target)
                committed.append(target)
        except BaseException:
            for target in committed:
                target.unlink(missing_ok=True)
            raise
    except BaseException:
        for stream in streams:
            stream.close()
        for tmp in tmps:
            tmp.unlink(missing_ok=True)
        raise
    for target in targets:
        logger.info("File written", path=str(target))


@contextmanager
def atomic_text_output(path: Path | str) -> Iterator[TextIO]:
    """Write to a sibling temp file and move it over ``path`` only on success.

    On any exception the temp file is removed and ``path`` is left untouched.
    """
    with atomic_text_outputs(path) as (stream,):
        yield stream
