"""Convolutional polarizing transform: layer maps, permutation, encoder.

Bit vectors are numpy ``uint8`` arrays; every function accepts a batch of
vectors stacked along leading axes and works on the last axis.

Bit order convention used throughout the package: in a cluster index or in
``j_index`` the first bit ``x_0`` is the least significant one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_bits(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bit vectors may only contain 0 and 1")
    return arr


def _check_pow2(n: int, minimum: int = 2) -> int:
    if n < minimum or n & (n - 1):
        raise ValueError(f"length must be a power of two >= {minimum}, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True)
class CodeSpec:
    """An (n, k) convolutional polar code given by its frozen set.

    Frozen positions carry zeros; the remaining positions carry the message
    in increasing index order.
    """

    n: int
    frozen: tuple[int, ...]
    m: int = field(init=False)
    info: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        m = _check_pow2(int(self.n))
        fz = tuple(sorted(int(i) for i in self.frozen))
        if len(set(fz)) != len(fz):
            raise ValueError("duplicate frozen index")
        if fz and (fz[0] < 0 or fz[-1] >= self.n):
            raise ValueError(f"frozen index out of range [0, {self.n})")
        object.__setattr__(self, "frozen", fz)
        object.__setattr__(self, "m", m)
        fset = set(fz)
        object.__setattr__(self, "info", tuple(i for i in range(self.n) if i not in fset))

    @classmethod
    def from_info(cls, n: int, info) -> "CodeSpec":
        iset = set(int(i) for i in info)
        return cls(n, tuple(i for i in range(n) if i not in iset))

    @property
    def k(self) -> int:
        return len(self.info)

    @property
    def first_info(self) -> int | None:
        return self.info[0] if self.info else None

    @property
    def last_frozen(self) -> int | None:
        return self.frozen[-1] if self.frozen else None

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.uint8)
        mask[list(self.frozen)] = 1
        return mask

    def embed(self, message) -> np.ndarray:
        """Place message bits on the information positions of a length-n input."""
        msg = _as_bits(message)
        if msg.shape[-1] != self.k:
            raise ValueError(f"message length {msg.shape[-1]} != k = {self.k}")
        u = np.zeros(msg.shape[:-1] + (self.n,), dtype=np.uint8)
        u[..., list(self.info)] = msg
        return u

    def extract(self, u) -> np.ndarray:
        return np.asarray(u)[..., list(self.info)]


def build_xz(l: int) -> tuple[np.ndarray, np.ndarray]:
    """The l x l/2 window matrices X and Z of one transform layer."""
    if l < 2 or l % 2:
        raise ValueError(f"l must be even and positive, got {l}")
    i = np.arange(l)[:, None]
    j = np.arange(l // 2)[None, :]
    x = ((2 * j <= i) & (i <= 2 * j + 2)).astype(np.uint8)
    z = ((2 * j < i) & (i <= 2 * j + 2)).astype(np.uint8)
    return x, z


def layer_forward(u) -> tuple[np.ndarray, np.ndarray]:
    """Split u into the inputs (u·X, u·Z) of the two half-size transforms."""
    u = _as_bits(u)
    l = u.shape[-1]
    if l < 2 or l % 2:
        raise ValueError(f"layer input length must be even, got {l}")
    nxt = np.zeros_like(u[..., 1::2])
    nxt[..., :-1] = u[..., 2::2]
    u1 = u[..., 1::2] ^ nxt
    u0 = u[..., 0::2] ^ u1
    return u0, u1


def layer_backward(u0, u1) -> np.ndarray:
    """Inverse of :func:`layer_forward`."""
    u0 = _as_bits(u0)
    u1 = _as_bits(u1)
    if u0.shape != u1.shape:
        raise ValueError("half vectors must have equal shapes")
    half = u0.shape[-1]
    u = np.empty(u0.shape[:-1] + (2 * half,), dtype=np.uint8)
    even = u0 ^ u1
    u[..., 0::2] = even
    odd = u1.copy()
    odd[..., :-1] ^= even[..., 1:]
    u[..., 1::2] = odd
    return u


def permute_even_odd(v, inverse: bool = False) -> np.ndarray:
    """Even-first-odd-last reordering (or its inverse, which interleaves)."""
    v = np.asarray(v)
    l = v.shape[-1]
    if l % 2:
        raise ValueError(f"length must be even, got {l}")
    if not inverse:
        return np.concatenate([v[..., 0::2], v[..., 1::2]], axis=-1)
    out = np.empty_like(v)
    out[..., 0::2] = v[..., : l // 2]
    out[..., 1::2] = v[..., l // 2 :]
    return out


def j_index(s) -> int:
    """Integer with bit j equal to s[j]."""
    return sum(int(b) << j for j, b in enumerate(s))


def encode(u) -> np.ndarray:
    """Codeword u·Q for the convolutional polarizing transform Q of size n."""
    u = _as_bits(u)
    _check_pow2(u.shape[-1])
    return _encode(u)


def _encode(u):
    # descend with all sub-transform inputs of a depth stacked on axis -2
    lead = u.shape[:-1]
    v = u[..., None, :]
    while v.shape[-1] > 1:
        u0, u1 = layer_forward(v)
        v = np.stack([u0, u1], axis=-2).reshape(lead + (-1, v.shape[-1] // 2))
    while v.shape[-2] > 1:
        b, s = v.shape[-2] // 2, v.shape[-1]
        v = permute_even_odd(v.reshape(lead + (b, 2 * s)), inverse=True)
    return v[..., 0, :].copy()


def encode_inverse(c) -> np.ndarray:
    """Input vector u with encode(u) == c."""
    c = _as_bits(c)
    _check_pow2(c.shape[-1])
    return _decode(c)


def _decode(c):
    lead = c.shape[:-1]
    v = c[..., None, :]
    while v.shape[-1] > 1:
        s = v.shape[-1] // 2
        v = permute_even_odd(v).reshape(lead + (-1, s))
    while v.shape[-2] > 1:
        b, s = v.shape[-2] // 2, v.shape[-1]
        w = v.reshape(lead + (b, 2, s))
        v = layer_backward(w[..., 0, :], w[..., 1, :])
    return v[..., 0, :].copy()


def cvpt_matrix(n: int) -> np.ndarray:
    """Explicit n x n matrix of the transform, built by matrix products.

    Quadratic in n; meant as a reference for small sizes.
    """
    _check_pow2(n, minimum=1)
    if n == 1:
        return np.ones((1, 1), dtype=np.uint8)
    x, z = build_xz(n)
    sub = cvpt_matrix(n // 2).astype(np.int64)
    left = np.hstack([x @ sub, z @ sub]) % 2
    perm = np.zeros((n, n), dtype=np.int64)
    order = np.r_[0:n:2, 1:n:2]
    perm[order, np.arange(n)] = 1  # v @ perm == v[order]
    return ((left @ perm.T) % 2).astype(np.uint8)
