"""Seeded random generators for forms and campaign trials.

Randomness is drawn from :class:`random.Random` (Mersenne Twister).  Each
trial gets its own generator whose seed is the first 8 bytes of
``blake2b(f"{tag}:{seed}:{trial}")``, so trials are independent of the order
(and thread) in which they run.
"""

from __future__ import annotations

import hashlib
import random

from .forms import Form
from .ideals import gp_table
from .squareclass import FieldTower
from .wittvec import space


def trial_rng(seed: int, trial: int, tag: str) -> random.Random:
    digest = hashlib.blake2b(f"{tag}:{seed}:{trial}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def random_form(field: FieldTower, dim: int, rng: random.Random) -> Form:
    bits = field.class_bits
    return Form(field, tuple(rng.choice(bits) for _ in range(dim)))


def sample_In(field: FieldTower, n: int, rng: random.Random, dims=None, max_terms=3, attempts=200):
    """Anisotropic form with class in ``I^n``, built as a sum of scaled n-fold Pfister forms.

    ``dims`` restricts the anisotropic dimension; zero forms are never
    returned.  Gives up (returns None) after ``attempts`` draws.
    """
    table = gp_table(field, n)
    if not table:
        return None
    sp = space(field)
    for _ in range(attempts):
        v = sp.zero
        for _ in range(rng.randint(1, max_terms)):
            v = sp.add(v, rng.choice(table).vec)
        d = sp.diman(v)
        if d and (dims is None or d in dims):
            return Form(field, sp.entries(v))
    return None
