"""Outage probability, transmission capacity and (L', R, h) optimization for
frequency-hopping ad hoc networks. Thin wrapper over the C++ core."""

from ._fhtc import (  # noqa: F401
    CapacityTable,
    Error,
    InvalidArgument,
    bpp_outage,
    capacity,
    conditional_outage,
    estimate_capacity,
    gamma_fn,
    gauss_2f1,
    infinite_ppp_outage,
    load_table,
    mc_spatial_outage,
    optimize,
    ppp_outage,
    psi_fn,
    run_figure,
    sinr_threshold_db,
    spectral_efficiency,
    tc,
)

__version__ = "0.1.0"
