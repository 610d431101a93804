"""Stepping-kernel backend selection.

The compiled extension (``slksim._kernels._core``) is used when it was built;
otherwise the numpy implementation is selected.  Set ``SLKSIM_PURE_PYTHON=1``
to force the fallback, e.g. for benchmarking or debugging.

Both backends expose the same surface:

    prepare_tridiag(a_diag, a_off, n)        -> opaque solver handle
    continuous_chunk(psi, V, beta, dt, dx, rho_floor_rel, gauge,
                     nsteps, handle, bd, be) -> None   (in place)
    discrete_chunk(psi, V, beta, dt, amp_floor,
                   nsteps, handle, bd, be)   -> None   (in place)
"""

from __future__ import annotations

import os

from . import pyref

if os.environ.get("SLKSIM_PURE_PYTHON"):
    impl = pyref
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]
    except ImportError:
        impl = pyref

BACKEND: str = impl.BACKEND_NAME

__all__ = ["impl", "pyref", "BACKEND"]
