"""Python surface of the verbalized-confidence calibration harness."""

try:
    from ._vcalib import *  # noqa: F401,F403  (installed package layout)
    from . import _vcalib as _impl
except ImportError:  # build-tree layout: extension sits next to the package on sys.path
    from _vcalib import *  # noqa: F401,F403
    import _vcalib as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
