import numpy as np
import pytest

from prs_lab.errors import DomainError, InfeasibleError
from prs_lab.generators import AbortModel
from prs_lab.prf import PrfKey
from prs_lab.protocols import (
    BINDING_OVERLAP,
    Ciphertext,
    CommitmentTranscript,
    Opening,
    OtpParams,
    ProtocolParams,
    committer_commit,
    extractor,
    otp_decrypt,
    otp_encrypt,
    receiver_sample_pauli,
    reveal_verify,
)
from prs_lab.states import Rng, frobenius_sq
from prs_lab.tomography import Tomograph


class TestParams:
    def test_desk_preset_shape(self):
        p = ProtocolParams.desk_preset()
        assert (p.lam, p.d, p.n) == (8, 1, 3)
        assert p.m == 6
        assert p.blocks == 2
        assert not p.binding_margin_ok  # desk scale relaxes m >= 3*lam

    def test_reference_preset_enforces_binding_margin(self):
        for lam in (8, 16, 64):
            p = ProtocolParams.reference_preset(lam)
            assert p.m >= 3 * p.lam
            # Same L as the flagged-channel verification budget.
            assert p.L == 3**8 * 2 ** (3 * p.n + 5) * p.lam

    def test_non_desk_margin_violation_rejected(self):
        with pytest.raises(DomainError):
            ProtocolParams(lam=8, d=1, n=3, desk=False)

    def test_binding_overlap_constant(self):
        assert BINDING_OVERLAP == pytest.approx(542 / 729)


class TestReceiverPauli:
    def test_block_count(self):
        p = ProtocolParams.desk_preset(d=2, n=3)
        pauli = receiver_sample_pauli(p, Rng(1))
        assert pauli.n == p.m == 12
        assert len([pauli.block(i, 3) for i in range(4)]) == 4

    def test_label_frequencies_uniform(self):
        p = ProtocolParams.desk_preset()
        counts = {c: 0 for c in "IXYZ"}
        draws = 2000
        for j in range(draws):
            for c in receiver_sample_pauli(p, Rng(j)).labels:
                counts[c] += 1
        total = draws * p.m
        for c in "IXYZ":
            assert abs(counts[c] / total - 0.25) <= 0.02

    def test_distinct_seeds_distinct_paulis(self):
        p = ProtocolParams.desk_preset()
        seen = {receiver_sample_pauli(p, Rng(j)).labels for j in range(200)}
        assert len(seen) >= 195  # collisions vanish at rate 4^-m


class TestCommitment:
    params = ProtocolParams.desk_preset()  # analytic tomography

    def test_honest_round_trip(self):
        r = Rng(7)
        for b in (0, 1):
            pauli = receiver_sample_pauli(self.params, r.derive(b))
            key, transcript = committer_commit(b, pauli, self.params, r.derive(10 + b))
            assert reveal_verify(transcript, Opening(key, b), r.derive(20 + b)) == b

    def test_wrong_bit_rejected(self):
        r = Rng(8)
        pauli = receiver_sample_pauli(self.params, r.derive(0))
        key, transcript = committer_commit(1, pauli, self.params, r.derive(1))
        assert reveal_verify(transcript, Opening(key, 0), r.derive(2)) is None

    def test_garbage_bit_rejected(self):
        r = Rng(9)
        pauli = receiver_sample_pauli(self.params, r.derive(0))
        key, transcript = committer_commit(0, pauli, self.params, r.derive(1))
        assert reveal_verify(transcript, Opening(key, 2), r.derive(2)) is None

    def test_zero_matrix_transcript_rejected(self):
        r = Rng(10)
        pauli = receiver_sample_pauli(self.params, r.derive(0))
        key, transcript = committer_commit(0, pauli, self.params, r.derive(1))
        zeroed = CommitmentTranscript(
            pauli,
            {
                x: Tomograph(np.zeros_like(t.matrix), copies=t.copies, s=t.s)
                for x, t in transcript.tomographs.items()
            },
            self.params,
        )
        assert reveal_verify(zeroed, Opening(key, 0), r.derive(2)) is None
        assert extractor(zeroed, r.derive(3)) is None

    def test_extractor_recovers_honest_bit(self):
        r = Rng(11)
        for b in (0, 1):
            pauli = receiver_sample_pauli(self.params, r.derive(b))
            key, transcript = committer_commit(b, pauli, self.params, r.derive(30 + b))
            assert extractor(transcript, r.derive(40 + b)) == b

    def test_extractor_cap(self):
        big = ProtocolParams.desk_preset(lam=15)
        r = Rng(12)
        pauli = receiver_sample_pauli(big, r.derive(0))
        key, transcript = committer_commit(0, pauli, big, r.derive(1))
        with pytest.raises(InfeasibleError):
            extractor(transcript, r.derive(2))

    def test_binding_consistency_over_runs(self):
        # Wherever the reveal accepts, the exhaustive search agrees.
        runs = 20
        agreed = 0
        for j in range(runs):
            r = Rng(13).derive(j)
            b = j % 2
            pauli = receiver_sample_pauli(self.params, r.derive(0))
            key, transcript = committer_commit(b, pauli, self.params, r.derive(1))
            revealed = reveal_verify(transcript, Opening(key, b), r.derive(2))
            if revealed is not None:
                if extractor(transcript, r.derive(3)) == revealed:
                    agreed += 1
        assert agreed == runs

    def test_reveal_is_pure_function_of_transcript_and_opening(self):
        r = Rng(14)
        pauli = receiver_sample_pauli(self.params, r.derive(0))
        key, transcript = committer_commit(1, pauli, self.params, r.derive(1))
        a = reveal_verify(transcript, Opening(key, 1), r.derive(2))
        b = reveal_verify(transcript, Opening(key, 1), r.derive(2))
        assert a == b == 1

    def test_sampled_mode_round_trip(self):
        params = ProtocolParams.desk_preset(mode="sampled")
        r = Rng(15)
        pauli = receiver_sample_pauli(params, r.derive(0))
        key, transcript = committer_commit(1, pauli, params, r.derive(1))
        assert reveal_verify(transcript, Opening(key, 1), r.derive(2)) == 1


class TestOtp:
    params = OtpParams.desk_preset()  # lam=8, d=3, n=4, sampled

    def test_analytic_round_trip_exact(self):
        params = OtpParams.desk_preset(mode="analytic")
        r = Rng(16)
        key = PrfKey.random(params.lam, r.derive(0))
        msg = "10011010"
        ct = otp_encrypt(key, msg, params, r.derive(1))
        assert otp_decrypt(key, ct, r.derive(2)) == msg

    def test_sampled_round_trip(self):
        r = Rng(17)
        key = PrfKey.random(self.params.lam, r.derive(0))
        msg = "01110001"
        ct = otp_encrypt(key, msg, self.params, r.derive(1))
        assert otp_decrypt(key, ct, r.derive(2)) == msg

    def test_wrong_key_output_uncorrelated(self):
        r = Rng(18)
        key = PrfKey.from_int(0x11, 8)
        other = PrfKey.from_int(0xEE, 8)
        msg = "10101010"
        ct = otp_encrypt(key, msg, self.params, r.derive(1))
        out = otp_decrypt(other, ct, r.derive(2))
        hamming = sum(a != b for a, b in zip(msg, out))
        assert 1 <= hamming <= 7  # about half the positions flip

    def test_two_keys_give_distant_ciphertexts(self):
        r = Rng(19)
        msg = "11110000"
        ct1 = otp_encrypt(PrfKey.from_int(1, 8), msg, self.params, r.derive(1))
        ct2 = otp_encrypt(PrfKey.from_int(2, 8), msg, self.params, r.derive(2))
        dists = [
            frobenius_sq(a.matrix, b.matrix)
            for a, b in zip(ct1.blocks, ct2.blocks)
        ]
        assert np.mean(dists) >= 1.0  # near-orthogonal states sit ~2 apart

    def test_empty_ciphertext_decrypts_to_empty_string(self):
        ct = Ciphertext((), self.params)
        assert otp_decrypt(PrfKey.from_int(0, 8), ct, Rng(20)) == ""

    def test_wrong_message_length_rejected(self):
        with pytest.raises(DomainError):
            otp_encrypt(PrfKey.from_int(0, 8), "101", self.params, Rng(21))
