"""Select the integration kernel: compiled extension if available, NumPy otherwise.

Set ``TWINCAV_PURE_PYTHON=1`` to force the fallback (used by the backend
benchmark and by tests that compare the two implementations).
"""

import os

if os.environ.get("TWINCAV_PURE_PYTHON", "") == "1":
    from . import _core_py as kernel

    BACKEND = "python"
else:
    try:
        from . import _core as kernel  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as kernel

        BACKEND = "python"
