"""Whispering-gallery resonances of 2D disks with radially varying index."""

__version__ = "0.1.0"
