"""Security analysis: correlation, similarity, sensitivity and randomness tests."""
from .nist import (TESTS, NistCampaign, bits_from_bytes, export_bitstream,
                   nist_campaign, nist_subset, read_bitstream)
from .special import erfc, igamc
from .stats import (SensitivityResult, chen_property_check, cosine_similarity,
                    csi_baseline, key_sensitivity, pearson_cc, plain_cipher_correlation,
                    plaintext_sensitivity, weak_cipher)

__all__ = [
    "TESTS", "NistCampaign", "bits_from_bytes", "export_bitstream", "nist_campaign",
    "nist_subset", "read_bitstream", "erfc", "igamc", "SensitivityResult",
    "chen_property_check", "cosine_similarity", "csi_baseline", "key_sensitivity",
    "pearson_cc", "plain_cipher_correlation", "plaintext_sensitivity", "weak_cipher",
]
