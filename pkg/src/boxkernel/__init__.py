"""boxkernel: filtering with integral operators through their RKHS."""

__version__ = "0.1.0"
