"""Free wave packets on the flat torus: coherent states, phase-space
distributions and their semiclassical limits along time schedules."""
from .errors import (
    ConfigError,
    NumericalError,
    QuadratureUnderResolved,
    ToruspacketsError,
    ValidationError,
)
from .observable import Observable, ObservableTerm, constant, cosine, sine
from .profile import Profile, ProfileKind, gaussian_profile, sampled_profile
from .state import (
    FourierState,
    PacketSpec,
    SemiclassicalParams,
    coherent_state,
    evolve,
    evolve_fraction,
    inner_product,
    translate,
)

__version__ = "0.1.0"
