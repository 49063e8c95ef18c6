"""Backend selection for the hot kernels.

The compiled extension is preferred when importable; otherwise the pure
Python twin is used.  ``census_dp`` additionally falls back per call when
the compiled path cannot handle the input (wide bodies, 64-bit
overflow).
"""

from __future__ import annotations

from . import _pykernels

try:
    from . import _ckernels as _fast
except ImportError:  # pragma: no cover - depends on the build
    _fast = None

BACKEND = _fast.BACKEND if _fast is not None else _pykernels.BACKEND


def census_dp(nt_count, start, eps_start, topo, nonunit, unit, max_body_nts, max_len):
    if _fast is not None and max_body_nts <= 2:
        try:
            return _fast.census_dp(
                nt_count, start, eps_start, topo, nonunit, unit, max_body_nts, max_len
            )
        except OverflowError:
            pass
    return _pykernels.census_dp(
        nt_count, start, eps_start, topo, nonunit, unit, max_body_nts, max_len
    )


def scan_censuses(images, m, max_len, var):
    impl = _fast if _fast is not None else _pykernels
    return impl.scan_censuses(images, m, max_len, var)
