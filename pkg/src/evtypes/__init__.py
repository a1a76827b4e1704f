"""Event type induction from dependency-parsed text.

The pipeline extracts predicate/object-head pairs from parses, keeps the
salient vocabulary, disambiguates predicate senses against a sense
dictionary, and clusters the pairs in a learned spherical latent space.
"""

__version__ = "0.1.0"
