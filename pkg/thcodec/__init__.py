"""Keypoint-driven talking-head video codec and evaluation harness."""

__version__ = "0.1.0"
