"""asmlab: finite-dimensional quantum measurement numerics.

POVMs and PVMs with Born statistics, Bloch-ball spin classification, Naimark
dilation, stochastic smearing, and hbar-parameterized measure families with
quantitative quasiprojectivity, equivalence, and asymptotic-multiplicativity
diagnostics.
"""
from asmlab._kernels import JACOBI_BACKEND

__all__ = ["JACOBI_BACKEND"]
__version__ = "0.1.0"
