"""Ed25519 signing with deterministic test keys derived from integer seeds."""

from __future__ import annotations

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .serial import sha256


class SigningKey:
    def __init__(self, private_bytes: bytes):
        self._key = Ed25519PrivateKey.from_private_bytes(private_bytes)
        self.pubkey = self._key.public_key().public_bytes_raw()

    def sign(self, message: bytes) -> bytes:
        return self._key.sign(message)


def key_from_seed(seed: int) -> SigningKey:
    """Deterministic test key: private bytes are SHA-256 of the seed tag."""
    return SigningKey(sha256(b"pfgx-test-key:" + seed.to_bytes(8, "big")))


def verify(pubkey: bytes, signature: bytes, message: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(pubkey).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False
