"""Broadcasting of two-qubit entanglement with universal quantum cloners."""

from .broadcast import (
    BroadcastReport,
    Interval,
    RangeResult,
    SweepRow,
    bell_local_inseparable,
    bell_nonlocal_inseparable,
    broadcast_report,
    scatter_dataset,
    surface_dataset,
    sweep,
    sweep_row,
    werner_local_range,
    werner_local_range_p,
    werner_nonlocal_range,
)
from .cloners import (
    CloneOutput,
    UnsupportedCopiesError,
    build_nonlocal_isometry,
    clone,
    copy_shrink,
    local_clone,
    local_isometry,
    nonlocal_clone,
)
from .measures import (
    dense_coding_capacity,
    ppt_verdict,
    teleportation_fidelity,
    uhlmann_fidelity,
)
from .qmat import InvalidStateError, NotHermitianError, ShapeError, partial_trace, partial_transpose
from .states import (
    BellDiagonalParams,
    BlochState,
    WernerLikeParams,
    bell_diagonal,
    bloch_to_density,
    density_to_bloch,
    sample_random_state,
    sample_random_states,
    werner_like,
)

__version__ = "0.1.0"
