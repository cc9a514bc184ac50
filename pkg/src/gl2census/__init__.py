"""Height-ordered elliptic-curve census over Q.

Enumerates short-Weierstrass curves y^2 = x^3 + Ax + B by naive height,
certifies surjectivity of the mod-ell Galois image, buckets curves by
Frobenius-trace fingerprints, and bounds Serre levels and division-field
discriminants, feeding empirical lower-bound counts and sieve statistics.
"""

__version__ = "0.1.0"
