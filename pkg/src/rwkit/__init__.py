"""rwkit: intersection theory for twisted (co)homology on a once-punctured
complex torus.

Layers:
  theta       theta function numerics (values, derivatives, kernel s)
  symfield    exact rational functions in the exponential variables
  config      the validated parameter set
  homology    exact symbolic intersection numbers, monodromy, connection
  cohomology  numeric intersection numbers (closed forms + residue engine),
              contiguity matrices
  pairing     branch-tracked integrals over open segments
  cli         the `rwkit` command-line front end
"""

from .config import ModuliConfig
from .theta import SeriesPolicy, TorusParam

__all__ = ["ModuliConfig", "SeriesPolicy", "TorusParam"]
__version__ = "0.1.0"
