"""Content-addressed blob store for audio bytes.

Blobs are immutable: the key is the SHA-256 of the content, so re-storing the
same bytes is a no-op and nothing ever rewrites a stored file in place.
"""

from __future__ import annotations

import errno
import hashlib
import os
import tempfile
from pathlib import Path
from typing import Iterator


class BlobError(Exception):
    pass


class StorageFull(BlobError):
    pass


class IoFailure(BlobError):
    pass


class BlobMissing(BlobError):
    pass


class BlobStore:
    """Filesystem store with layout ``<root>/<first-2-hex>/<sha256>.wav``."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, digest: str) -> Path:
        return self.root / digest[:2] / f"{digest}.wav"

    def exists(self, digest: str) -> bool:
        return self.path_for(digest).is_file()

    def store(self, data: bytes) -> str:
        """Store bytes under their digest; idempotent. Returns the digest."""
        if not data:
            raise ValueError("refusing to store an empty blob")
        digest = hashlib.sha256(data).hexdigest()
        target = self.path_for(digest)
        if target.is_file():
            return digest
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            # Write to a temp file and rename so a crash never leaves a
            # half-written blob under its final name.
            fd, tmp_path = tempfile.mkstemp(dir=target.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp_path, target)
            except BaseException:
                if os.path.exists(tmp_path):
                    os.unlink(tmp_path)
                raise
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull(str(exc)) from exc
            raise IoFailure(str(exc)) from exc
        return digest

    def read(self, digest: str) -> bytes:
        path = self.path_for(digest)
        try:
            return path.read_bytes()
        except FileNotFoundError as exc:
            raise BlobMissing(digest) from exc
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    def delete(self, digest: str) -> bool:
        path = self.path_for(digest)
        try:
            path.unlink()
            return True
        except FileNotFoundError:
            return False
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    def iter_digests(self) -> Iterator[str]:
        for sub in sorted(self.root.iterdir()):
            if not sub.is_dir():
                continue
            for blob in sorted(sub.glob("*.wav")):
                yield blob.stem
