"""Stepping-kernel backend selection.

Prefers the compiled extension and falls back to the pure-Python twin.
``LOCDAMP_KERNEL=python`` forces the fallback, ``LOCDAMP_KERNEL=compiled``
demands the extension (raising if it is missing); anything else means
auto.  ``BACKEND`` records what was picked.
"""

from __future__ import annotations

import os

from locdamp import _kernels_py

_choice = os.environ.get("LOCDAMP_KERNEL", "").strip().lower()

if _choice == "python":
    advance = _kernels_py.advance
    BACKEND = "python"
else:
    try:
        from locdamp import _kernels  # type: ignore[attr-defined]

        advance = _kernels.advance
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "LOCDAMP_KERNEL=compiled but the compiled extension is not built"
            )
        advance = _kernels_py.advance
        BACKEND = "python"

__all__ = ["advance", "BACKEND"]
