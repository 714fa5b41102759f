"""overlaplab: a desk-scale laboratory for resonance overlap.

Two explicit near-integrable Hamiltonian families (a cubic-twist model
on T x R and a doubly periodic model on T^2, both driven time-
periodically) together with the machinery to watch their transition
from KAM-confined motion to overlapped resonances: saddle continuation,
invariant-manifold growth, Melnikov integrals, regime sweeps in the
(eps, mu) plane, and excursion statistics.
"""

__version__ = "0.1.0"

from .models import Coupling, Family, ModelSpec, PhaseState  # noqa: F401
from .trig import TrigSum, TrigTerm, parse_trig_sum  # noqa: F401
from .integrate import IntegratorConfig, Method, Trajectory  # noqa: F401
