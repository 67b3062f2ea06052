"""Substitutions over ordered alphabets, their fixed points and primitivity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .words import OrderedAlphabet, format_word


@dataclass(frozen=True)
class Substitution:
    """A morphism sending each letter ``k`` to the non-empty word ``images[k]``."""

    images: tuple[bytes, ...]
    alphabet: OrderedAlphabet = field(default=None)
    name: str = ""

    def __post_init__(self):
        images = tuple(bytes(im) for im in self.images)
        object.__setattr__(self, "images", images)
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", OrderedAlphabet.of_size(len(images)))
        if len(images) != self.alphabet.size:
            raise ValueError(
                f"expected one image per letter ({self.alphabet.size}), got {len(images)}")
        for letter, im in enumerate(images):
            if not im:
                raise ValueError(f"image of letter {letter} is empty")
            self.alphabet.check(im)

    @property
    def m(self) -> int:
        return self.alphabet.size

    def __call__(self, w: bytes) -> bytes:
        return apply(self, w)

    def power(self, w: bytes, n: int) -> bytes:
        for _ in range(n):
            w = apply(self, w)
        return w

    def describe(self) -> str:
        """Rule list in the format read by :func:`parse_substitution`."""
        if self.m <= 10:
            return ",".join(f"{k}:{format_word(im, self.m)}" for k, im in enumerate(self.images))
        # a trailing dot keeps one-letter images such as "12." apart from digit strings
        return ",".join(f"{k}:{'.'.join(map(str, im))}{'.' if len(im) == 1 else ''}"
                        for k, im in enumerate(self.images))


def apply(s: Substitution, w: bytes) -> bytes:
    """Concatenate the images of the letters of ``w``."""
    return b"".join(map(s.images.__getitem__, w))


def substitution_matrix(s: Substitution) -> np.ndarray:
    """Entry ``(a, b)`` counts the occurrences of ``a`` in the image of ``b``."""
    mat = np.zeros((s.m, s.m), dtype=np.int64)
    for b, im in enumerate(s.images):
        for a in im:
            mat[a, b] += 1
    return mat


def is_primitive(s: Substitution) -> bool:
    """True iff some power of the substitution matrix is entrywise positive.

    Exponents are searched up to Wielandt's bound ``(m-1)**2 + 1``.
    """
    base = substitution_matrix(s) > 0
    power = base.copy()
    for _ in range((s.m - 1) ** 2 + 1):
        if power.all():
            return True
        power = (power.astype(np.int64) @ base.astype(np.int64)) > 0
    return bool(power.all())


def fixed_point_seeds(s: Substitution) -> set[int]:
    """Letters ``x`` whose image is ``x v`` with ``v`` non-empty."""
    return {x for x, im in enumerate(s.images) if len(im) >= 2 and im[0] == x}


def fixed_point_prefix(s: Substitution, seed: int, target_len: int) -> bytes:
    """First ``target_len`` letters of the fixed point grown from ``seed``."""
    if target_len < 1:
        raise ValueError(f"target length must be positive, got {target_len}")
    if seed not in fixed_point_seeds(s):
        raise ValueError(f"letter {seed} is not prolongable: its image "
                         f"{format_word(s.images[seed], s.m)} does not start with it")
    prefix = bytes([seed])
    while len(prefix) < target_len:
        # truncate every round so memory stays linear in target_len
        prefix = apply(s, prefix)[:target_len]
    return prefix


def thue_morse_substitution(m: int) -> Substitution:
    """The generalized Thue-Morse morphism ``k -> k (k+1 mod m)`` over Z_m."""
    if m < 2:
        raise ValueError(f"Thue-Morse alphabets need m >= 2, got {m}")
    return Substitution(tuple(bytes([k, (k + 1) % m]) for k in range(m)),
                        name=f"thue-morse-{m}")


def thue_morse_digit_sum(m: int, length: int) -> bytes:
    """Letters ``s_2(i) mod m`` for ``i < length``, ``s_2`` the binary digit sum."""
    if m < 2:
        raise ValueError(f"Thue-Morse alphabets need m >= 2, got {m}")
    idx = np.arange(length, dtype=np.uint64)
    return (np.bitwise_count(idx) % m).astype(np.uint8).tobytes()


def parse_substitution(text: str) -> Substitution:
    """Parse ``"0:01,1:12,2:20"`` (letters given as integers)."""
    pairs = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            letter, image = item.split(":")
            pairs[int(letter)] = image.strip()
        except ValueError:
            raise ValueError(f"cannot parse substitution rule {item!r}") from None
    m = len(pairs)
    if sorted(pairs) != list(range(m)):
        raise ValueError(f"substitution letters must be 0..{m - 1}, got {sorted(pairs)}")
    images = []
    for k in range(m):
        image = pairs[k]
        # digit strings for small alphabets, '.'-separated integers otherwise
        if "." in image:
            images.append(bytes(int(t) for t in image.split(".") if t))
        else:
            images.append(bytes(int(ch) for ch in image))
    return Substitution(tuple(images))
