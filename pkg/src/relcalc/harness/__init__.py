"""Random instance generators, executable theorem checkers and the suite runner."""

from .checkers import *  # noqa: F401,F403
from .checkers import __all__ as _checkers_all
from .generators import *  # noqa: F401,F403
from .generators import __all__ as _generators_all
from .suite import *  # noqa: F401,F403
from .suite import __all__ as _suite_all

__all__ = [*_generators_all, *_checkers_all, *_suite_all]
