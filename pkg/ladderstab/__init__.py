import logging

from . import specs
from . import _errors
from . import _numerics
from . import _filter
from . import _ladder
from . import _spectral
from . import _moments
from . import _perturbation
from . import _truncation
from . import _montecarlo
from . import _config
from . import _run
from .specs import *
from ._errors import *
from ._numerics import *
from ._filter import *
from ._ladder import *
from ._spectral import *
from ._moments import *
from ._perturbation import *
from ._truncation import *
from ._montecarlo import *
from ._config import *
from ._run import *

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = (
    specs.__all__
    + _errors.__all__
    + _numerics.__all__
    + _filter.__all__
    + _ladder.__all__
    + _spectral.__all__
    + _moments.__all__
    + _perturbation.__all__
    + _truncation.__all__
    + _montecarlo.__all__
    + _config.__all__
    + _run.__all__
)
