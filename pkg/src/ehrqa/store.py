"""Content-addressed on-disk cache for service responses.

Keys are hashed into ``root/<namespace>/<aa>/<digest>.<ext>``. Writes go
through a temporary file and ``os.replace`` so concurrent writers of the
same key are harmless: the value is identical and the rename is atomic.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        b = p if isinstance(p, bytes) else str(p).encode("utf-8")
        h.update(len(b).to_bytes(8, "little"))
        h.update(b)
    return h.hexdigest()


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def atomic_write_bytes(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


class ContentStore:
    def __init__(self, root):
        self.root = Path(root)

    def _path(self, namespace, key, ext):
        return self.root / namespace / key[:2] / f"{key}.{ext}"

    def get_array(self, namespace, key):
        p = self._path(namespace, key, "npy")
        if not p.exists():
            return None
        return np.load(p, allow_pickle=False)

    def put_array(self, namespace, key, arr):
        buf = io.BytesIO()
        np.save(buf, np.asarray(arr), allow_pickle=False)
        atomic_write_bytes(self._path(namespace, key, "npy"), buf.getvalue())

    def get_json(self, namespace, key):
        p = self._path(namespace, key, "json")
        if not p.exists():
            return None
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)

    def put_json(self, namespace, key, obj):
        atomic_write_bytes(self._path(namespace, key, "json"), canonical_json(obj).encode("utf-8"))
