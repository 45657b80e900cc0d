"""Selects the compiled kernel extension, falling back to pure numpy.

Set SPECRANK_PURE=1 to force the fallback (used by the benchmark and to
reproduce results without a compiler).
"""

import os

if os.environ.get("SPECRANK_PURE", "") not in ("", "0"):
    from specrank import _kernels_py as _impl

    USING_COMPILED = False
else:
    try:
        from specrank import _kernels as _impl  # type: ignore[attr-defined]

        USING_COMPILED = True
    except ImportError:
        from specrank import _kernels_py as _impl

        USING_COMPILED = False

csr_matvec = _impl.csr_matvec
cheb_probe_table = _impl.cheb_probe_table
