"""Convolutional polar codes: encoder, cluster-based SC and list decoders."""
