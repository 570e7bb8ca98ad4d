"""On-disk store: genesis file, append-only block log, hash-keyed KV file."""

from __future__ import annotations

import os
import struct
from pathlib import Path

from . import ledger as L
from .serial import FormatError, Reader


class Store:
    def __init__(self, home: str | os.PathLike):
        self.home = Path(home)
        self.home.mkdir(parents=True, exist_ok=True)
        self.genesis_path = self.home / "genesis.json"
        self.blocks_path = self.home / "blocks.dat"
        self.kv_path = self.home / "kv.dat"

    # -- genesis

    def write_genesis(self, params: L.ChainParams) -> None:
        self.genesis_path.write_text(params.to_json(), encoding="utf-8")

    def read_genesis(self) -> L.ChainParams | None:
        if not self.genesis_path.exists():
            return None
        return L.ChainParams.from_json(self.genesis_path.read_text(encoding="utf-8"))

    # -- append-only block log

    def append_block(self, block: L.Block) -> None:
        blob = L.ser_block(block)
        with open(self.blocks_path, "ab") as fh:
            fh.write(struct.pack(">I", len(blob)))
            fh.write(blob)

    def iter_blocks(self):
        if not self.blocks_path.exists():
            return
        with open(self.blocks_path, "rb") as fh:
            while True:
                head = fh.read(4)
                if len(head) < 4:
                    return
                (n,) = struct.unpack(">I", head)
                blob = fh.read(n)
                if len(blob) < n:
                    raise FormatError("truncated block log")
                yield L.deser_block(Reader(blob))

    # -- key-value snapshot entries keyed by 32-byte hashes (last write wins)

    def kv_put(self, key: bytes, value: bytes) -> None:
        assert len(key) == 32
        with open(self.kv_path, "ab") as fh:
            fh.write(key)
            fh.write(struct.pack(">I", len(value)))
            fh.write(value)

    def kv_all(self) -> dict[bytes, bytes]:
        out: dict[bytes, bytes] = {}
        if not self.kv_path.exists():
            return out
        with open(self.kv_path, "rb") as fh:
            while True:
                key = fh.read(32)
                if len(key) < 32:
                    return out
                (n,) = struct.unpack(">I", fh.read(4))
                out[key] = fh.read(n)

    def kv_get(self, key: bytes) -> bytes | None:
        return self.kv_all().get(key)
