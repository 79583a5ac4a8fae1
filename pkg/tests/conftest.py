import random

import pytest

from coldsig.groups import Role, Scheme
from coldsig.keygen import combine_public_key, generate_share
from coldsig.paillier import keygen_from_primes, paillier_keygen
from coldsig.transaction import Policy, Transaction

TEST_PAILLIER_BITS = 832  # smallest modulus the ECDSA session accepts


@pytest.fixture
def rng():
    return random.Random(0xC01D516)


@pytest.fixture(scope="session")
def paillier_512():
    pk, sk = paillier_keygen(512, random.Random(7))
    return pk, sk


@pytest.fixture(scope="session")
def paillier_tiny():
    return keygen_from_primes(11, 13)


@pytest.fixture(scope="session")
def ecdsa_pair():
    """Combined gateway/core ECDSA shares with a test-sized Paillier modulus."""
    r = random.Random(0xEC05A)
    gw = generate_share(Scheme.ECDSA, Role.GATEWAY, r, paillier_bits=TEST_PAILLIER_BITS)
    core = generate_share(Scheme.ECDSA, Role.CORE, r)
    combine_public_key(gw, core.public_point)
    combine_public_key(core, gw.public_point)
    return gw, core


@pytest.fixture(scope="session")
def schnorr_pair():
    r = random.Random(0x5C40)
    gw = generate_share(Scheme.SCHNORR, Role.GATEWAY, r)
    core = generate_share(Scheme.SCHNORR, Role.CORE, r)
    combine_public_key(gw, core.public_point)
    combine_public_key(core, gw.public_point)
    return gw, core


@pytest.fixture
def sample_tx():
    return Transaction(
        version=1,
        asset="BTC",
        source_address="cw1sourceaddress",
        destination_address="hot-wallet-1",
        amount=5_000,
        nonce=42,
    )


@pytest.fixture
def open_policy():
    return Policy(frozenset({"hot-wallet-1", "hot-wallet-2"}), max_amount=1_000_000)
