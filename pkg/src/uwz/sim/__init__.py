"""Finite-blocklength simulation of the universal binning code."""
from .code import CodeConfig, DecodeResult, EncodeResult, Message, SharedRandomness, decode, derive_rates, encode
from .experiment import Adversary, ChannelStats, SimReport, design_distortion, measure_uniformity, run_experiment
from .hashing import BinCode

__all__ = [
    "Adversary",
    "BinCode",
    "ChannelStats",
    "CodeConfig",
    "DecodeResult",
    "EncodeResult",
    "Message",
    "SharedRandomness",
    "SimReport",
    "decode",
    "derive_rates",
    "design_distortion",
    "encode",
    "measure_uniformity",
    "run_experiment",
]
