import hashlib
import math
from typing import Iterator, Tuple

import django
import numpy as np
from django.conf import settings


def setup_django():
    '''
    Configures the minimal Django environment the serializer layer needs.
    Leaves settings alone if a host project configured them already.
    '''
    if setup_django._configured:
        return
    setup_django._configured = True
    if not settings.configured:
        settings.configure(INSTALLED_APPS=[], USE_I18N=False, USE_TZ=True)
    django.setup()


setattr(setup_django, '_configured', False)


def seed_sequence(*keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(k) for k in keys])


def make_rng(*keys: int) -> np.random.Generator:
    '''
    PCG64 generator keyed by a tuple of nonnegative integers. Equal keys give
    equal streams regardless of where or when the generator is created.
    '''
    return np.random.default_rng(seed_sequence(*keys))


def derive_seed(*keys: int) -> int:
    '''
    A 32-bit integer seed for libraries that only accept ``random_state`` ints.
    '''
    return int(seed_sequence(*keys).generate_state(1, np.uint32)[0])


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def iter_pair_rows(n: int) -> Iterator[Tuple[int, np.ndarray]]:
    '''
    Yields ``(i, j)`` with ``j`` the array of all ``j > i``, i.e. every
    unordered pair exactly once in row-major order.
    '''
    for i in range(n - 1):
        yield i, np.arange(i + 1, n)


def scaled(total, size, alpha: float):
    '''
    ``total / size**alpha`` with empty communities contributing zero.
    '''
    size = np.asarray(size, dtype=float)
    safe = np.where(size > 0, size, 1.0)
    value = np.where(size > 0, np.asarray(total, dtype=float) / safe ** alpha, 0.0)
    return value if value.ndim else float(value)


def clean_json(value):
    '''
    Recursively converts numpy values and tuples to plain Python ones and
    non-finite floats to ``None``.
    '''
    if hasattr(value, 'tolist'):
        value = value.tolist()
    if isinstance(value, dict):
        return {str(k): clean_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_json(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value
