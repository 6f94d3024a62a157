"""Pick the compiled kernel if it imports, else the pure-Python one.

Set ``LHMAASS_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("LHMAASS_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernel import BACKEND, genus_char_raw, straddle_collect, straddle_sum
else:
    try:
        from ._kernel import BACKEND, genus_char_raw, straddle_collect, straddle_sum
    except ImportError:  # pragma: no cover - depends on the build
        from ._pykernel import BACKEND, genus_char_raw, straddle_collect, straddle_sum

__all__ = ["BACKEND", "genus_char_raw", "straddle_collect", "straddle_sum"]
