"""Top-level package for the quantum best-arm identification simulator.

The package executes the variable-time quantum algorithms for
best-arm identification exactly, charges their oracle queries under
the variable-time cost model and compares them with classical
baselines and with the adversary lower bound.

Available objects:

* :mod:`qbai.constants` - tuning constants and small numeric helpers.
* :class:`qbai.oracle.BanditInstance` - an immutable bandit instance.
* :class:`qbai.branch.BranchState` - the exact branch-level state backend.
* :class:`qbai.ledger.QueryLedger` - raw and modeled query accounting.
* :func:`qbai.amp_est.gae` - gapped amplitude estimation.
* :func:`qbai.vta.run_vta` - the variable-time algorithm.
* :func:`qbai.vtaa_vtae.amplify` and :func:`qbai.vtaa_vtae.estimate`.
* :func:`qbai.bai.best_arm`, :func:`qbai.bai.pac_arm` and
  :func:`qbai.bai.fixed_budget` - the identification algorithms.
* :func:`qbai.classical.successive_elimination` and
  :func:`qbai.classical.naive` - classical baselines.
* :func:`qbai.bounds.adversary_bound` - the query lower bound.
"""

from . import constants  # noqa: F401
from .errors import QbaiError  # noqa: F401
from .oracle import BanditInstance, hardness, load_instance, make_instance  # noqa: F401
from .branch import BranchState  # noqa: F401
from .ledger import QueryLedger  # noqa: F401
from .amp_est import choose_qpe_config, gae  # noqa: F401
from .vta import VtaParams, run_vta  # noqa: F401
from .vtaa_vtae import EstimateMode, amplify, estimate  # noqa: F401
from .bai import best_arm, fixed_budget, locate, pac_arm, shrink  # noqa: F401
from .classical import naive, successive_elimination  # noqa: F401
from .bounds import adversary_bound  # noqa: F401
