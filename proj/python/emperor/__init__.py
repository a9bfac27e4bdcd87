"""Sliced mixture-moment descriptors for point sets.

Thin re-export of the compiled `_emperor` module. Works both installed (the
extension sits inside this package) and from a build tree (the extension sits
next to it on sys.path).
"""

try:
    from ._emperor import *  # noqa: F401,F403
    from ._emperor import __doc__ as _doc
except ImportError:
    from _emperor import *  # noqa: F401,F403
    from _emperor import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
