"""Backend dispatch for the raster kernels.

Two interchangeable backends implement the same seven kernels:

* ``numba`` — JIT-compiled loops (:mod:`calfront.kernels.numba_impl`),
* ``numpy`` — pure numpy/scipy (:mod:`calfront.kernels.numpy_impl`).

Selection is driven by the ``CALFRONT_BACKEND`` environment variable:
``auto`` (default) picks numba when importable and falls back to numpy,
``numba``/``numpy`` force a backend. Outputs are bit-identical across
backends, so the choice only affects speed. ``benchmarks/bench_kernels.py``
measures the difference.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import numpy_impl

BACKEND_ENV = "CALFRONT_BACKEND"
_CHOICES = ("auto", "numba", "numpy")
_modules: dict[str, ModuleType] = {"numpy": numpy_impl}


def _load_numba() -> ModuleType | None:
    if "numba" not in _modules:
        try:
            from . import numba_impl
        except ImportError:
            _modules["numba"] = None  # type: ignore[assignment]
        else:
            _modules["numba"] = numba_impl
    return _modules["numba"]


def get_backend(name: str | None = None) -> ModuleType:
    """Resolve a backend module by name, or by CALFRONT_BACKEND when None."""
    choice = (name or os.environ.get(BACKEND_ENV, "auto")).strip().lower()
    if choice not in _CHOICES:
        raise ValueError(
            f"unknown kernel backend {choice!r}; expected one of {', '.join(_CHOICES)}"
        )
    if choice == "numpy":
        return numpy_impl
    mod = _load_numba()
    if mod is None:
        if choice == "numba":
            raise RuntimeError("numba backend requested but numba is not installed")
        return numpy_impl
    return mod


def backend_name() -> str:
    return get_backend().NAME


def binary_dilate(mask, offsets):
    return get_backend().binary_dilate(mask, offsets)


def binary_erode(mask, offsets):
    return get_backend().binary_erode(mask, offsets)


def distance_transform(occupied):
    return get_backend().distance_transform(occupied)


def label_components(mask, connectivity):
    return get_backend().label_components(mask, connectivity)


def fill_holes(mask):
    return get_backend().fill_holes(mask)


def flood_fill(passable, seeds):
    return get_backend().flood_fill(passable, seeds)


def thin(mask):
    return get_backend().thin(mask)


def warmup() -> str:
    """Run every kernel once on tiny inputs.

    For the numba backend this forces JIT compilation (disk-cached via
    cache=True) so that timed workloads measure steady-state throughput.
    Returns the active backend name.
    """
    import numpy as np

    g = np.zeros((4, 4), dtype=bool)
    g[1, 1] = True
    g[1, 2] = True
    offs = np.array([[0, 0], [0, 1], [1, 0]], dtype=np.int64)
    seeds = np.array([[0, 0]], dtype=np.int64)
    binary_dilate(g, offs)
    binary_erode(g, offs)
    distance_transform(g)
    label_components(g, 4)
    label_components(g, 8)
    fill_holes(g)
    flood_fill(~g, seeds)
    thin(g)
    return backend_name()
