"""Linear relations (multivalued operators) on C^n."""

from .bounds import *  # noqa: F401,F403
from .deficiency import *  # noqa: F401,F403
from .errors import (
    AmbientMismatchError,
    DomainError,
    InstanceFormatError,
    NumericalError,
    PreconditionError,
    RelcalcError,
)
from .quotient import *  # noqa: F401,F403
from .relation import *  # noqa: F401,F403
from .subspace import *  # noqa: F401,F403

__version__ = "0.1.0"
