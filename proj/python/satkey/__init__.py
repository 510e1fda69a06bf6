"""Satellite decoy-state BB84 finite-key simulator."""

from satkey._satkey import *  # noqa: F401,F403
from satkey._satkey import __doc__  # noqa: F401

__version__ = "0.1.0"


def optimize(config_text="", overrides=(), seed=None, d_min_km=0.0):
    """Optimizes one pass for a TOML configuration string."""
    cfg = parse_config(config_text, list(overrides))  # noqa: F405
    system = cfg.system()
    geom = pass_geometry(system.orbit, d_min_km)  # noqa: F405
    return optimize_single_pass(  # noqa: F405
        geom, system.link, system.error, system.security, system.space,
        cfg.seed if seed is None else seed)
