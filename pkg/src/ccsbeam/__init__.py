"""Prior-aware convolutional compressive sensing for mmWave beam alignment."""

from . import bench, ccs, channel, gridops, learner, maskopt

__all__ = ["bench", "ccs", "channel", "gridops", "learner", "maskopt"]
