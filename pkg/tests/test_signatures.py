import pytest

import oracles
from coldsig.errors import (
    DegenerateNonceError,
    InconsistentShareError,
    MalformedFieldError,
    ZeroKeyError,
)
from coldsig.groups import RISTRETTO255, SECP256K1, Scheme
from coldsig.signatures import (
    Signature,
    _ecdsa_verify_ints,
    ecdsa_sign,
    ecdsa_verify,
    hash_to_scalar,
    schnorr_sign,
    schnorr_verify,
)


class TestEcdsa:
    params = SECP256K1

    def test_sign_verify_round_trip(self, rng):
        for _ in range(10):
            x = self.params.rand_scalar(rng)
            m = self.params.rand_scalar(rng)
            sig = ecdsa_sign(x, m, self.params, rng=rng)
            assert ecdsa_verify(self.params.base_mul(x), m, sig, self.params)

    def test_message_binding(self, rng):
        x = self.params.rand_scalar(rng)
        m = self.params.rand_scalar(rng)
        sig = ecdsa_sign(x, m, self.params, rng=rng)
        assert not ecdsa_verify(self.params.base_mul(x), m ^ 1, sig, self.params)

    def test_matches_independent_oracle_with_fixed_nonce(self, rng):
        q = self.params.q
        for _ in range(20):
            x, m, k = (rng.randrange(1, q) for _ in range(3))
            sig = ecdsa_sign(x, m, self.params, k=k)
            r_ref, s_ref = oracles.ecdsa_sign_raw(x, m, k)
            assert sig.first == r_ref
            assert sig.second == min(s_ref, q - s_ref)

    def test_unit_values_collapse_formula(self):
        q = self.params.q
        m = 12345
        sig = ecdsa_sign(1, m, self.params, k=1)
        assert sig.first == self.params.G.x_int() % q
        assert sig.second == min(m + sig.first, q - (m + sig.first))

    def test_fixed_nonce_is_deterministic(self, rng):
        q = self.params.q
        x, m, k = rng.randrange(1, q), rng.randrange(1, q), rng.randrange(1, q)
        assert ecdsa_sign(x, m, self.params, k=k).to_bytes() == ecdsa_sign(x, m, self.params, k=k).to_bytes()

    def test_malleability_closure(self, rng):
        q = self.params.q
        x = self.params.rand_scalar(rng)
        m = self.params.rand_scalar(rng)
        sig = ecdsa_sign(x, m, self.params, rng=rng)
        P = self.params.base_mul(x)
        # the raw verifier accepts both s and q-s ...
        assert _ecdsa_verify_ints(P, m, sig.first, sig.second, self.params)
        assert _ecdsa_verify_ints(P, m, sig.first, q - sig.second, self.params)
        # ... but only the low-s form is a well-formed Signature
        assert sig.second <= (q - 1) // 2
        with pytest.raises(MalformedFieldError):
            Signature(Scheme.ECDSA, sig.first, q - sig.second)

    def test_verification_identity_u1G_u2P_equals_kG(self, rng):
        q = self.params.q
        for _ in range(100):
            x, m, k = (rng.randrange(1, q) for _ in range(3))
            sig = ecdsa_sign(x, m, self.params, k=k)
            s_raw = pow(k, -1, q) * (m + sig.first * x) % q
            s_inv = pow(s_raw, -1, q)
            R = self.params.base_mul(m * s_inv % q) + self.params.base_mul(x).mul(sig.first * s_inv % q)
            assert R == self.params.base_mul(k)

    def test_rejects_zero_key_and_zero_nonce(self, rng):
        with pytest.raises(ZeroKeyError):
            ecdsa_sign(0, 5, self.params)
        with pytest.raises(DegenerateNonceError):
            ecdsa_sign(7, 5, self.params, k=0)
        with pytest.raises(DegenerateNonceError):
            ecdsa_sign(7, 5, self.params, k=self.params.q)

    def test_out_of_range_components_verify_false(self, rng):
        x = self.params.rand_scalar(rng)
        P = self.params.base_mul(x)
        q = self.params.q
        assert not _ecdsa_verify_ints(P, 5, 0, 1, self.params)
        assert not _ecdsa_verify_ints(P, 5, 1, 0, self.params)
        assert not _ecdsa_verify_ints(P, 5, q, 1, self.params)

    def test_identity_public_key_rejected(self, rng):
        from coldsig.errors import ConfigError

        x = self.params.rand_scalar(rng)
        sig = ecdsa_sign(x, 5, self.params, rng=rng)
        with pytest.raises(ConfigError):
            ecdsa_verify(self.params.base_mul(0), 5, sig, self.params)

    def test_signatures_accepted_by_openssl(self, rng):
        import hashlib

        for _ in range(10):
            x = self.params.rand_scalar(rng)
            message = rng.randbytes(50)
            digest = hashlib.sha256(message).digest()
            m = self.params.hash_to_scalar(message)
            sig = ecdsa_sign(x, m, self.params, rng=rng)
            P = self.params.base_mul(x)
            assert oracles.openssl_ecdsa_verify((P.x_int(), P.y_int()), digest, sig.first, sig.second)
            assert not oracles.openssl_ecdsa_verify(
                (P.x_int(), P.y_int()), hashlib.sha256(message + b"x").digest(), sig.first, sig.second
            )

    def test_verify_agrees_with_affine_oracle(self, rng):
        def oracle_verify(pub_affine, m, r, s):
            q = oracles.N
            s_inv = pow(s, q - 2, q)
            R = oracles.affine_add(
                oracles.affine_mul(oracles.G, m * s_inv % q),
                oracles.affine_mul(pub_affine, r * s_inv % q),
            )
            return R is not None and R[0] % q == r

        q = self.params.q
        for _ in range(10):
            x, m = rng.randrange(1, q), rng.randrange(1, q)
            sig = ecdsa_sign(x, m, self.params, rng=rng)
            pub = oracles.affine_mul(oracles.G, x)
            P = self.params.base_mul(x)
            for r_c, s_c, m_c in [
                (sig.first, sig.second, m),
                (sig.first, sig.second, (m + 1) % q),
                ((sig.first + 1) % q or 1, sig.second, m),
                (sig.first, (sig.second + 1) % q or 1, m),
            ]:
                assert _ecdsa_verify_ints(P, m_c, r_c, s_c, self.params) == oracle_verify(pub, m_c, r_c, s_c)


class TestSchnorr:
    params = RISTRETTO255

    def test_sign_verify_round_trip(self, rng):
        for _ in range(10):
            x = self.params.rand_scalar(rng)
            P = self.params.base_mul(x)
            sig = schnorr_sign(x, P, b"message", self.params, rng=rng)
            assert schnorr_verify(P, b"message", sig, self.params)
            assert not schnorr_verify(P, b"other", sig, self.params)

    def test_wrong_key_fails(self, rng):
        x = self.params.rand_scalar(rng)
        P = self.params.base_mul(x)
        sig = schnorr_sign(x, P, b"m", self.params, rng=rng)
        assert not schnorr_verify(P + self.params.G, b"m", sig, self.params)

    def test_matches_independent_oracle(self, rng):
        q = self.params.q
        for _ in range(20):
            x, k = rng.randrange(1, q), rng.randrange(1, q)
            m = rng.randbytes(40)
            sig = schnorr_sign(x, self.params.base_mul(x), m, self.params, k=k)
            e_ref, s_ref = oracles.schnorr_sign_raw(x, m, k)
            assert (sig.first, sig.second) == (e_ref, s_ref)

    def test_correctness_identity_sG_minus_eP_is_R(self, rng):
        q = self.params.q
        for _ in range(20):
            x, k = rng.randrange(1, q), rng.randrange(1, q)
            sig = schnorr_sign(x, self.params.base_mul(x), b"tx", self.params, k=k)
            R = self.params.base_mul(sig.second) - self.params.base_mul(x).mul(sig.first)
            assert R == self.params.base_mul(k)

    def test_rejects_zero_nonce_and_mismatched_key(self, rng):
        x = self.params.rand_scalar(rng)
        P = self.params.base_mul(x)
        with pytest.raises(DegenerateNonceError):
            schnorr_sign(x, P, b"m", self.params, k=0)
        with pytest.raises(InconsistentShareError):
            schnorr_sign(x, P + self.params.G, b"m", self.params, rng=rng)
        with pytest.raises(ZeroKeyError):
            schnorr_sign(0, P, b"m", self.params)


class TestSignatureType:
    def test_component_range_enforced(self):
        q = SECP256K1.q
        with pytest.raises(MalformedFieldError):
            Signature(Scheme.ECDSA, 0, 1)
        with pytest.raises(MalformedFieldError):
            Signature(Scheme.ECDSA, 1, 0)
        with pytest.raises(MalformedFieldError):
            Signature(Scheme.ECDSA, q, 1)

    def test_bytes_round_trip(self, rng):
        x = SECP256K1.rand_scalar(rng)
        sig = ecdsa_sign(x, 99, SECP256K1, rng=rng)
        assert Signature.from_bytes(Scheme.ECDSA, sig.to_bytes()) == sig
        with pytest.raises(MalformedFieldError):
            Signature.from_bytes(Scheme.ECDSA, sig.to_bytes()[:-1])

    def test_hash_to_scalar_helper_delegates(self):
        assert hash_to_scalar(b"x", SECP256K1) == SECP256K1.hash_to_scalar(b"x")
