"""Gaussian quantum channels from scalar-field reflection off accelerating mirrors."""

from .bogoliubov import BogoliubovPair, coefficients, cw_beta_squared, cw_coefficients, numeric_coefficients
from .channel import (
    ChannelClass,
    ChannelPair,
    ChannelParams,
    apply_channel,
    assemble_packet,
    assemble_planewave,
    canonical_params,
    classify,
    optimize_epsilon,
    packet_tau,
    packet_tau_offset,
    s_block,
    s_block_planewave,
)
from .specfun import gamma_imag, lambert_w0, loggamma
from .trajectory import CarlitzWilley, Custom, Darcx, Trajectory
from .wavepacket import PacketCoefficients, PacketIndex, packet_coefficients, packet_coefficients_numeric

__version__ = "0.1.0"

__all__ = [
    "BogoliubovPair",
    "CarlitzWilley",
    "ChannelClass",
    "ChannelPair",
    "ChannelParams",
    "Custom",
    "Darcx",
    "PacketCoefficients",
    "PacketIndex",
    "Trajectory",
    "apply_channel",
    "assemble_packet",
    "assemble_planewave",
    "canonical_params",
    "classify",
    "coefficients",
    "cw_beta_squared",
    "cw_coefficients",
    "gamma_imag",
    "lambert_w0",
    "loggamma",
    "numeric_coefficients",
    "optimize_epsilon",
    "packet_coefficients",
    "packet_coefficients_numeric",
    "packet_tau",
    "packet_tau_offset",
    "s_block",
    "s_block_planewave",
    "__version__",
]
