"""Operator-facing command line.

One invocation per protocol step, matching the physical workflow where
each step happens on a separate device and envelope files travel across
the air gap on removable storage:

    coldsig keygen          write a new encrypted share + public-point envelope
    coldsig keygen-finish   absorb the peer's envelope, print the wallet address
    coldsig sign-init       (gateway/user) write the round-one envelope
    coldsig sign-respond    (core) policy-check and write the round-two envelope
    coldsig sign-finalize   (gateway/user) decrypt/aggregate, print the signature
    coldsig verify          check a signature against a public key and transaction
    coldsig bench-sizes     measure per-step envelope sizes; write CSV + figure

Exit codes: 0 ok, 2 configuration, 3 integrity/policy, 4 failed
cryptographic verification, 5 I/O. The passphrase protecting share and
session files comes from CW_PASSPHRASE or an interactive prompt; secrets
are never printed.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import __version__
from .bench import format_operations_table, format_size_table, measure_sizes, render_size_figure, write_size_csv
from .envelope import decode_envelope, encode_envelope
from .errors import ColdSigError, ConfigError, IntegrityError, StorageIOError, VerifyError
from .groups import Role, Scheme, params_for
from .keygen import (
    KeygenPubMsg,
    WalletDescriptor,
    combine_public_key,
    derive_address,
    generate_share,
    min_paillier_bits,
)
from .paillier import DEFAULT_MODULUS_BITS
from .signatures import Signature, ecdsa_verify, schnorr_verify
from .signing import (
    SESSION_ID_SIZE,
    EcdsaSignMsg1,
    EcdsaSignMsg2,
    SchnorrSignMsg1,
    SchnorrSignMsg2,
    ecdsa_core_respond,
    ecdsa_gateway_finalize,
    ecdsa_gateway_init,
    schnorr_core_respond,
    schnorr_gateway_finalize,
    schnorr_gateway_init,
)
from .storage import load_session, load_share, save_session, save_share, session_lock
from .transaction import load_policy, tx_from_canonical_bytes, tx_from_json, tx_hash

PASSPHRASE_ENV = "CW_PASSPHRASE"

_scheme_opt = click.option("--scheme", type=click.Choice([s.value for s in Scheme]), required=True)
_share_opt = click.option("--share", "share_path", type=click.Path(path_type=Path), required=True,
                          help="Encrypted key-share file.")
_workdir_opt = click.option("--workdir", type=click.Path(path_type=Path), default=Path("."),
                            show_default=True, help="Where envelopes and session files live.")


def _passphrase(confirm: bool = False) -> str:
    env = os.environ.get(PASSPHRASE_ENV)
    if env is not None:
        return env
    return click.prompt("Share passphrase", hide_input=True, confirmation_prompt=confirm)


def _read_envelope(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise StorageIOError(f"cannot read envelope {path}: {exc}") from exc


def _write_file(path: Path, data: bytes):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
    except OSError as exc:
        raise StorageIOError(f"cannot write {path}: {exc}") from exc


def _session_path(workdir: Path, session_id: bytes) -> Path:
    return Path(workdir) / f"session-{session_id.hex()}.cwss"


def _run(fn):
    """Translate ColdSigError subtrees into the exit-code contract."""
    try:
        fn()
    except ColdSigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)


@click.group()
@click.version_option(version=__version__, prog_name="coldsig")
def main():
    """Two-party cold-wallet signing over an air-gapped file channel."""


@main.command()
@_scheme_opt
@click.option("--role", type=click.Choice([r.value for r in Role]), required=True)
@_share_opt
@_workdir_opt
@click.option("--paillier-bits", type=int, default=DEFAULT_MODULUS_BITS, show_default=True,
              help="Paillier modulus size (ECDSA gateway/user only).")
@click.option("--master-seed", default=None, help="Hex seed for a recoverable user share.")
@click.option("--account-id", default=None, help="Account label for a recoverable user share.")
@click.option("--force", is_flag=True, help="Overwrite an existing share file.")
def keygen(scheme, role, share_path, workdir, paillier_bits, master_seed, account_id, force):
    """Generate a local share and write the public-point envelope for the peer."""

    def body():
        scheme_e, role_e = Scheme(scheme), Role(role)
        if share_path.exists() and not force:
            raise StorageIOError(f"share file already exists: {share_path} (use --force to replace)")
        if scheme_e is Scheme.ECDSA and role_e is not Role.CORE:
            floor = min_paillier_bits(params_for(scheme_e))
            if paillier_bits < floor:
                raise ConfigError(f"--paillier-bits must be >= {floor} for ECDSA")
        try:
            seed = bytes.fromhex(master_seed) if master_seed is not None else None
        except ValueError as exc:
            raise ConfigError(f"--master-seed is not valid hex: {exc}") from exc
        passphrase = _passphrase(confirm=True)
        share = generate_share(scheme_e, role_e, paillier_bits=paillier_bits,
                               master_seed=seed, account_id=account_id)
        save_share(share, share_path, passphrase, overwrite=force)
        session_id = os.urandom(SESSION_ID_SIZE)
        env = encode_envelope(KeygenPubMsg(scheme=scheme_e, public_point=share.public_point), session_id)
        out = Path(workdir) / f"keygen-{scheme_e.value}-{role_e.value}.cwenv"
        _write_file(out, env)
        click.echo(f"share written to {share_path}")
        click.echo(f"public-point envelope written to {out}; carry it to the peer")

    _run(body)


@main.command("keygen-finish")
@_share_opt
@click.argument("peer_envelope", type=click.Path(path_type=Path))
def keygen_finish(share_path, peer_envelope):
    """Combine the peer's public point into the shared wallet key."""

    def body():
        passphrase = _passphrase()
        share = load_share(share_path, passphrase)
        msg, _sid = decode_envelope(_read_envelope(peer_envelope))
        if not isinstance(msg, KeygenPubMsg):
            raise IntegrityError("envelope is not a keygen message")
        if msg.scheme is not share.scheme:
            raise IntegrityError(f"peer envelope is for {msg.scheme.value}, share is {share.scheme.value}")
        if share.p_shared is not None:
            prior = derive_address(share.scheme, share.p_shared)
            combine_public_key(share, msg.public_point)
            if derive_address(share.scheme, share.p_shared) != prior:
                raise IntegrityError("peer envelope disagrees with previously combined key")
        else:
            combine_public_key(share, msg.public_point)
            save_share(share, share_path, passphrase, overwrite=True)
        descriptor = WalletDescriptor.from_share(share)
        click.echo(f"shared public key: {descriptor.p_shared.encode().hex()}")
        click.echo(f"wallet address:    {descriptor.address}")

    _run(body)


@main.command("sign-init")
@_share_opt
@_workdir_opt
@click.argument("tx_json", type=click.Path(path_type=Path))
def sign_init(share_path, workdir, tx_json):
    """Start a signing session for a transaction (gateway or user role)."""

    def body():
        passphrase = _passphrase()
        share = load_share(share_path, passphrase)
        try:
            tx = tx_from_json(Path(tx_json).read_text(encoding="utf-8"))
        except OSError as exc:
            raise StorageIOError(f"cannot read transaction {tx_json}: {exc}") from exc
        if share.scheme is Scheme.ECDSA:
            session, msg1 = ecdsa_gateway_init(share, tx)
        else:
            session, msg1 = schnorr_gateway_init(share, tx)
        env = encode_envelope(msg1, session.session_id)
        out = Path(workdir) / f"sign-msg1-{session.session_id.hex()[:8]}.cwenv"
        _write_file(out, env)
        save_session(session, _session_path(workdir, session.session_id), passphrase)
        click.echo(f"session {session.session_id.hex()}")
        click.echo(f"round-one envelope written to {out}; carry it to the core")

    _run(body)


@main.command("sign-respond")
@_share_opt
@_workdir_opt
@click.option("--policy", "policy_path", type=click.Path(path_type=Path), required=True,
              help="Whitelist policy file (required for the core role).")
@click.argument("msg1_envelope", type=click.Path(path_type=Path))
def sign_respond(share_path, workdir, policy_path, msg1_envelope):
    """Policy-check a round-one envelope and answer it (core role)."""

    def body():
        passphrase = _passphrase()
        share = load_share(share_path, passphrase)
        policy = load_policy(policy_path)
        msg1, session_id = decode_envelope(_read_envelope(msg1_envelope))
        expected = EcdsaSignMsg1 if share.scheme is Scheme.ECDSA else SchnorrSignMsg1
        if not isinstance(msg1, expected):
            raise IntegrityError(f"envelope is not a {share.scheme.value} round-one message")
        try:
            if share.scheme is Scheme.ECDSA:
                tx = tx_from_canonical_bytes(msg1.tx_bytes)
                msg2 = ecdsa_core_respond(share, msg1, tx, policy)
            else:
                msg2 = schnorr_core_respond(share, msg1, policy)
        except IntegrityError as exc:
            report = Path(workdir) / f"refusal-{session_id.hex()[:8]}.txt"
            _write_file(report, f"signing refused for session {session_id.hex()}:\n{exc}\n".encode())
            click.echo(f"refusal report written to {report}", err=True)
            raise
        out = Path(workdir) / f"sign-msg2-{session_id.hex()[:8]}.cwenv"
        _write_file(out, encode_envelope(msg2, session_id))
        click.echo(f"round-two envelope written to {out}; carry it back to the initiator")

    _run(body)


@main.command("sign-finalize")
@_share_opt
@_workdir_opt
@click.argument("msg2_envelope", type=click.Path(path_type=Path))
def sign_finalize(share_path, workdir, msg2_envelope):
    """Aggregate the core's response into a final, verified signature."""

    def body():
        passphrase = _passphrase()
        share = load_share(share_path, passphrase)
        raw = _read_envelope(msg2_envelope)
        pk = share.paillier.pk if share.paillier is not None else None
        msg2, session_id = decode_envelope(raw, paillier_pk=pk)
        expected = EcdsaSignMsg2 if share.scheme is Scheme.ECDSA else SchnorrSignMsg2
        if not isinstance(msg2, expected):
            raise IntegrityError(f"envelope is not a {share.scheme.value} round-two message")
        session_file = _session_path(workdir, session_id)
        with session_lock(session_file):
            session = load_session(session_file, passphrase, share)
            try:
                if share.scheme is Scheme.ECDSA:
                    sig = ecdsa_gateway_finalize(session, msg2)
                else:
                    sig = schnorr_gateway_finalize(session, msg2)
            finally:
                save_session(session, session_file, passphrase)
        params = share.params
        label = "r,s" if share.scheme is Scheme.ECDSA else "e,s"
        click.echo(f"signature ({label}): {sig.to_bytes().hex()}")
        if share.scheme is Scheme.ECDSA:
            ok = ecdsa_verify(share.p_shared, tx_hash(session.tx, params), sig, params)
        else:
            from .transaction import tx_canonical_bytes

            ok = schnorr_verify(share.p_shared, tx_canonical_bytes(session.tx), sig, params)
        click.echo(f"verification against shared key: {'ok' if ok else 'FAILED'}")
        if not ok:
            raise VerifyError("signature did not verify")

    _run(body)


@main.command()
@click.argument("scheme", type=click.Choice([s.value for s in Scheme]))
@click.argument("pubkey_hex")
@click.argument("tx_json", type=click.Path(path_type=Path))
@click.argument("signature_hex")
def verify(scheme, pubkey_hex, tx_json, signature_hex):
    """Check a signature for a transaction under a shared public key."""

    def body():
        scheme_e = Scheme(scheme)
        params = params_for(scheme_e)
        try:
            pub = params.decode_point(bytes.fromhex(pubkey_hex))
            sig = Signature.from_bytes(scheme_e, bytes.fromhex(signature_hex))
        except ValueError as exc:
            raise ConfigError(f"bad hex argument: {exc}") from exc
        try:
            tx = tx_from_json(Path(tx_json).read_text(encoding="utf-8"))
        except OSError as exc:
            raise StorageIOError(f"cannot read transaction {tx_json}: {exc}") from exc
        if scheme_e is Scheme.ECDSA:
            ok = ecdsa_verify(pub, tx_hash(tx, params), sig, params)
        else:
            from .transaction import tx_canonical_bytes

            ok = schnorr_verify(pub, tx_canonical_bytes(tx), sig, params)
        click.echo("signature valid" if ok else "signature INVALID")
        if not ok:
            raise VerifyError("signature did not verify")

    _run(body)


@main.command("bench-sizes")
@click.option("--paillier-bits", type=int, default=DEFAULT_MODULUS_BITS, show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), default=None,
              help="Also write sizes.csv and sizes.png here.")
@click.option("--ops/--no-ops", default=True, show_default=True,
              help="Include the per-role operation-count table.")
def bench_sizes(paillier_bits, out_dir, ops):
    """Run one signing round per scheme and report air-gap message sizes."""

    def body():
        floor = min_paillier_bits(params_for(Scheme.ECDSA))
        if paillier_bits < floor:
            raise ConfigError(f"--paillier-bits must be >= {floor}")
        rows = measure_sizes(paillier_bits=paillier_bits)
        click.echo(format_size_table(rows, paillier_bits))
        if ops:
            click.echo("")
            click.echo(format_operations_table())
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            write_size_csv(rows, out / "sizes.csv")
            render_size_figure(rows, out / "sizes.png")
            click.echo(f"\nwrote {out / 'sizes.csv'} and {out / 'sizes.png'}")

    _run(body)


if __name__ == "__main__":
    main()
