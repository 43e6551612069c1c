"""Three-qubit quantum thermal diode with a common heat reservoir.

Qubits A and C share the left reservoir, qubit B sits on the right one.  The
package builds the global master equation, solves for steady states (with the
initial-state dependent decomposition when A and C are identical), and
evaluates heat currents, rectification and correlations.
"""

__version__ = "0.1.0"

from .model import Mode, SystemParams, eigenvalues, transition_table  # noqa: E402
from .steady import steady_chr, steady_ihr, steady_state  # noqa: E402
from .thermo import crossover_fractions, heat_report, rectification  # noqa: E402
from .correlations import asymmetry_factor, correlation_report  # noqa: E402

__all__ = [
    "__version__",
    "Mode",
    "SystemParams",
    "eigenvalues",
    "transition_table",
    "steady_chr",
    "steady_ihr",
    "steady_state",
    "crossover_fractions",
    "heat_report",
    "rectification",
    "asymmetry_factor",
    "correlation_report",
]
