"""
File helpers
Atomic (temp + rename) text output, gzip-aware by suffix
"""

import gzip
import io
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, Sequence

import numpy as np

from ..exceptions import ReportIOError


def is_gzip(path: str | os.PathLike) -> bool:
    return str(path).endswith(".gz")


@contextmanager
def atomic_text_writer(path: str | os.PathLike) -> Iterator[IO[str]]:
    """
    Open a text sink that only replaces `path` once the block succeeds.

    Args:
        path: Destination file; a ".gz" suffix writes gzip-compressed text

    Raises:
        ReportIOError: the directory is not writable or a write failed
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    except OSError as e:
        raise ReportIOError(f"cannot write {target}: {e}") from e
    try:
        os.chmod(tmp_name, 0o644)
    except OSError:
        pass

    raw = os.fdopen(fd, "wb")
    if is_gzip(target):
        # mtime=0 keeps gzip output byte-identical across runs
        binary: IO[bytes] = gzip.GzipFile(fileobj=raw, mode="wb", mtime=0)
    else:
        binary = raw
    text = io.TextIOWrapper(binary, encoding="utf-8", newline="\n")
    try:
        yield text
        text.flush()
        text.close()
        if binary is not raw:
            raw.close()
        os.replace(tmp_name, target)
    except OSError as e:
        _discard(text, raw, tmp_name)
        raise ReportIOError(f"cannot write {target}: {e}") from e
    except BaseException:
        _discard(text, raw, tmp_name)
        raise


def _discard(text: IO[str], raw: IO[bytes], tmp_name: str) -> None:
    for stream in (text, raw):
        try:
            stream.close()
        except Exception:
            pass
    try:
        os.unlink(tmp_name)
    except OSError:
        pass


def format_number(value: float | int) -> str:
    """Integers verbatim, reals with up to 15 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.15g}"


def write_table(
    path: str | os.PathLike,
    header: Sequence[str],
    columns: Sequence[Sequence[float | int | str]],
) -> Path:
    """Write a headed CSV figure file column-wise (all columns same length)."""
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise ReportIOError(f"ragged columns for {path}: lengths {sorted(lengths)}")
    with atomic_text_writer(path) as sink:
        sink.write(",".join(header) + "\n")
        for row in zip(*columns):
            sink.write(
                ",".join(v if isinstance(v, str) else format_number(v) for v in row)
                + "\n"
            )
    return Path(path)
