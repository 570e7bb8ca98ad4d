"""Byte-level primitives shared by all canonical serializations."""

from __future__ import annotations

import hashlib


class FormatError(Exception):
    """Malformed bytes while decoding a canonical serialization."""


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def uleb(n: int) -> bytes:
    """Unsigned LEB128."""
    if n < 0:
        raise ValueError("uleb of negative number")
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


class Reader:
    """Cursor over immutable bytes with bounds-checked reads."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError("unexpected end of input")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def byte(self) -> int:
        return self.take(1)[0]

    def uleb(self) -> int:
        result = 0
        shift = 0
        while True:
            b = self.byte()
            result |= (b & 0x7F) << shift
            if not b & 0x80:
                return result
            shift += 7
            if shift > 63:
                raise FormatError("uleb overflow")

    def done(self) -> bool:
        return self.pos == len(self.data)

    def expect_done(self) -> None:
        if not self.done():
            raise FormatError("trailing bytes after value")
