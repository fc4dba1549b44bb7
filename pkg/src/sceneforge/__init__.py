"""Compile probabilistic scene descriptions into Gazebo worlds."""

__version__ = "0.1.0"
