"""Simulation-based calibration benchmark: seeded time-series models,
simulated-minimum-distance criteria, derivative-free optimizers and a
KDE-likelihood Bayesian estimator."""

import json as _json
import os as _os
import sys as _sys

# When running against a build tree (ctest), the extension lives next to the
# build directory rather than inside the package.
_ext_dir = _os.environ.get("CALBENCH_EXT_DIR")
if _ext_dir and _ext_dir not in _sys.path:
    _sys.path.insert(0, _ext_dir)

try:
    from calbench._core import *  # noqa: F401,F403
    from calbench import _core as _core
except ImportError:  # build-tree layout
    import _core  # type: ignore  # noqa: F401
    from _core import *  # noqa: F401,F403


def run_experiment_dict(config_path, overrides=()):
    """Full method comparison; returns the report as a dict."""
    return _json.loads(_core.run_experiment(str(config_path), list(overrides)))


__all__ = [name for name in dir(_core) if not name.startswith("_")] + [
    "run_experiment_dict"
]
