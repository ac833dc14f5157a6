"""Kernel backend selection.

The compiled Cython core is preferred; the pure-numpy module is the
fallback. ``TEXWARP_BACKEND=python`` forces the fallback (used by the
benchmark and the parity tests); ``TEXWARP_BACKEND=native`` makes a
missing compiled core a hard error instead of a silent downgrade.
"""

from __future__ import annotations

import os

from texwarp import _kernels_py

_requested = os.environ.get("TEXWARP_BACKEND", "").lower()

if _requested == "python":
    kernels = _kernels_py
    BACKEND_NAME = "python"
else:
    try:
        from texwarp import _kernels_cy as kernels  # type: ignore[no-redef]

        BACKEND_NAME = "native"
    except ImportError:
        if _requested == "native":
            raise ImportError(
                "TEXWARP_BACKEND=native but texwarp._kernels_cy is not built; "
                "reinstall with a C compiler available"
            ) from None
        kernels = _kernels_py
        BACKEND_NAME = "python"

im2col = kernels.im2col
col2im_add = kernels.col2im_add
maxpool2d = kernels.maxpool2d
upsample_nearest = kernels.upsample_nearest
