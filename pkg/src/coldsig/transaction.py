"""Chain-agnostic transaction model, canonical encoding, and signing policy.

The canonical byte form is what gets hashed and what crosses the air gap:
a 1-byte version, the three text fields length-prefixed (4-byte big-endian)
UTF-8, then amount and nonce as 8-byte big-endian integers. Length
prefixes make the encoding injective.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ConfigError, IntegrityError
from .groups import GroupParams

_U64 = 1 << 64


@dataclass(frozen=True)
class Transaction:
    version: int
    asset: str
    source_address: str
    destination_address: str
    amount: int
    nonce: int

    def __post_init__(self):
        if not 0 <= self.version <= 255:
            raise ConfigError("transaction version must fit one byte")
        if not self.source_address or not self.destination_address:
            raise ConfigError("transaction addresses must be non-empty")
        if not 0 < self.amount < _U64:
            raise ConfigError("amount must be a positive 64-bit integer")
        if not 0 <= self.nonce < _U64:
            raise ConfigError("nonce must be an unsigned 64-bit integer")


def _text_field(s: str) -> bytes:
    raw = s.encode("utf-8")
    return len(raw).to_bytes(4, "big") + raw


def tx_canonical_bytes(tx: Transaction) -> bytes:
    return (
        bytes([tx.version])
        + _text_field(tx.asset)
        + _text_field(tx.source_address)
        + _text_field(tx.destination_address)
        + tx.amount.to_bytes(8, "big")
        + tx.nonce.to_bytes(8, "big")
    )


def tx_from_canonical_bytes(data: bytes) -> Transaction:
    """Strict inverse of :func:`tx_canonical_bytes`; rejects trailing bytes."""

    def take(view, n, what):
        if len(view) < n:
            raise IntegrityError(f"transaction bytes truncated in {what}")
        return view[:n], view[n:]

    rest = data
    head, rest = take(rest, 1, "version")
    version = head[0]
    texts = []
    for name in ("asset", "source", "destination"):
        head, rest = take(rest, 4, f"{name} length")
        length = int.from_bytes(head, "big")
        head, rest = take(rest, length, name)
        try:
            texts.append(head.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise IntegrityError(f"transaction {name} is not valid UTF-8") from exc
    head, rest = take(rest, 8, "amount")
    amount = int.from_bytes(head, "big")
    head, rest = take(rest, 8, "nonce")
    nonce = int.from_bytes(head, "big")
    if rest:
        raise IntegrityError(f"{len(rest)} trailing bytes after transaction")
    try:
        return Transaction(version, texts[0], texts[1], texts[2], amount, nonce)
    except ConfigError as exc:
        raise IntegrityError(f"decoded transaction violates invariants: {exc}") from exc


def tx_hash(tx: Transaction, params: GroupParams) -> int:
    """hash_to_scalar of the canonical bytes; the ECDSA message scalar m."""
    return params.hash_to_scalar(tx_canonical_bytes(tx))


def tx_from_json(text: str) -> Transaction:
    """Parse the operator-facing JSON document (version/asset/source/destination/amount/nonce)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"transaction JSON invalid: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("transaction JSON must be an object")
    required = {"version", "asset", "source", "destination", "amount", "nonce"}
    missing = required - doc.keys()
    if missing:
        raise ConfigError(f"transaction JSON missing fields: {', '.join(sorted(missing))}")
    extra = doc.keys() - required
    if extra:
        raise ConfigError(f"transaction JSON has unknown fields: {', '.join(sorted(extra))}")
    try:
        return Transaction(
            version=int(doc["version"]),
            asset=str(doc["asset"]),
            source_address=str(doc["source"]),
            destination_address=str(doc["destination"]),
            amount=int(doc["amount"]),
            nonce=int(doc["nonce"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"transaction JSON field has wrong type: {exc}") from exc


def tx_to_json(tx: Transaction) -> str:
    return json.dumps(
        {
            "version": tx.version,
            "asset": tx.asset,
            "source": tx.source_address,
            "destination": tx.destination_address,
            "amount": tx.amount,
            "nonce": tx.nonce,
        },
        indent=2,
    )


@dataclass(frozen=True)
class Policy:
    """Core-side spending rules: destination whitelist plus optional amount cap."""

    whitelist: frozenset[str]
    max_amount: int | None = None

    def __post_init__(self):
        if not self.whitelist:
            raise ConfigError("policy whitelist must not be empty")
        if self.max_amount is not None and self.max_amount <= 0:
            raise ConfigError("policy max_amount must be positive")


def check_policy(tx: Transaction, policy: Policy) -> list[str]:
    """Every violated rule, named; an empty list means the transaction passes."""
    violations = []
    if tx.destination_address not in policy.whitelist:
        violations.append(f"destination {tx.destination_address!r} is not whitelisted")
    if policy.max_amount is not None and tx.amount > policy.max_amount:
        violations.append(f"amount {tx.amount} exceeds cap {policy.max_amount}")
    return violations


def load_policy(path) -> Policy:
    """One whitelisted address per line; optional ``max_amount <N>`` line; # comments."""
    addresses = set()
    max_amount = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("max_amount"):
                parts = line.replace("=", " ").split()
                if len(parts) != 2 or not parts[1].isdigit():
                    raise ConfigError(f"policy line {lineno}: malformed max_amount")
                max_amount = int(parts[1])
            else:
                addresses.add(line)
    return Policy(whitelist=frozenset(addresses), max_amount=max_amount)
