#!/usr/bin/env python3
# tab-width:4

"""
Locked, fsynced, atomic replacement of output files.

Writers take an advisory flock on a per-path lockfile, write the payload
to a temporary file in the destination directory, fsync it and rename it
over the destination. Readers never observe a partially written file.
"""

from __future__ import annotations

import errno
import fcntl
import hashlib
import os
import secrets
import sys
from collections.abc import Callable
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any
from typing import TypeVar

__all__ = [
    "lockfile_for",
    "path_lock",
    "atomic_write_bytes",
    "atomic_write_text",
]

DEFAULT_LOCK_DIR = Path("/tmp/qsvtangles-locks")

T = TypeVar("T")


def lock_dir() -> Path:
    """Directory holding the per-output lockfiles; QSVTANGLES_LOCK_DIR overrides it."""
    directory = Path(os.environ.get("QSVTANGLES_LOCK_DIR", DEFAULT_LOCK_DIR))
    directory.mkdir(parents=True, exist_ok=True, mode=0o700)
    return directory


def lockfile_for(output: Path) -> Path:
    # keyed on the resolved path so ../ spellings of one output share a lock
    key = hashlib.sha256(str(Path(output).resolve()).encode("utf-8")).hexdigest()
    return lock_dir() / key


def _retrying(call: Callable[..., T], *args: Any) -> T:
    while True:
        try:
            return call(*args)
        except InterruptedError:
            continue
        except OSError as e:
            if e.errno != errno.EINTR:
                raise


def _open_unmasked(path: Path, flags: int, mode: int) -> int:
    saved = os.umask(0)
    try:
        return _retrying(os.open, path, flags, mode)
    finally:
        os.umask(saved)


@contextmanager
def path_lock(path: Path) -> Iterator[None]:
    """
    Hold the exclusive advisory lock guarding `path` for the duration of the block.

    The lock lives on lockfile_for(path), not on the output, so the output
    can be renamed over while the lock is held.

    Raises:
        OSError: if the filesystem refuses flock (ENOLCK)
    """
    # 0o666 so a lockfile created by root can still be locked by a normal user
    lock_fd = _open_unmasked(
        lockfile_for(path),
        os.O_CREAT | os.O_RDWR | os.O_NOFOLLOW,
        0o666,
    )
    try:
        try:
            _retrying(fcntl.flock, lock_fd, fcntl.LOCK_EX)
        except OSError as e:
            if e.errno == errno.ENOLCK:
                raise OSError(f"cannot lock {path}: the filesystem does not support flock (ENOLCK)") from e
            raise
        yield
    finally:
        try:
            fcntl.flock(lock_fd, fcntl.LOCK_UN)
        except OSError as e:
            print(f"Warning: failed to unlock lockfile for {path}: {e}", file=sys.stderr)
        os.close(lock_fd)


def _fsync_directory(directory: Path) -> None:
    dir_fd = _retrying(os.open, directory, os.O_RDONLY | os.O_DIRECTORY)
    try:
        _retrying(os.fsync, dir_fd)
    finally:
        os.close(dir_fd)


def atomic_write_bytes(
    *,
    path: Path,
    payload: bytes,
    make_parents: bool = False,
) -> int:
    """
    Replace `path` with `payload` atomically. Returns the number of bytes written.

    The temporary file is removed if anything fails before the rename; a
    failure to remove it is reported on stderr and never masks the
    original exception.
    """
    if not isinstance(payload, bytes):
        raise TypeError(f"atomic_write_bytes() payload must be bytes, got {type(payload).__name__}")
    path = Path(path)
    if make_parents:
        path.parent.mkdir(parents=True, exist_ok=True)

    with path_lock(path):
        tmp_path = path.with_name(f".{path.name}.{secrets.token_hex(8)}.tmp")
        fd = _open_unmasked(
            tmp_path,
            os.O_CREAT | os.O_EXCL | os.O_WRONLY | os.O_NOFOLLOW,
            0o644,
        )
        try:
            try:
                view = memoryview(payload)
                while view:
                    written = os.write(fd, view)
                    view = view[written:]
                _retrying(os.fsync, fd)
            finally:
                os.close(fd)
            os.replace(tmp_path, path)
        except BaseException:
            try:
                tmp_path.unlink(missing_ok=True)
            except OSError as e:
                print(f"Warning: failed to remove temporary file {tmp_path}: {e}", file=sys.stderr)
            raise
        _fsync_directory(path.parent)
    return len(payload)


def atomic_write_text(
    *,
    path: Path,
    text: str,
    make_parents: bool = False,
) -> int:
    return atomic_write_bytes(
        path=path,
        payload=text.encode("utf-8"),
        make_parents=make_parents,
    )
