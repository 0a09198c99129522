"""stabsim: simulation of Clifford-dominated quantum circuits via low-rank
stabilizer decompositions.

Submodules
----------
f2             packed GF(2) linear algebra
chform         phase-exact stabilizer states (CH canonical form)
expsum         exponential sums of Z4/Z2 quadratic forms
superposition  stabilizer superpositions, sparsification, norm estimation
decompose      gate decompositions, stabilizer extent and fidelity
sampler        Metropolis and chain-rule output samplers
circuit        circuit IR, text format, gadgetizer, benchmark generators
dense          brute-force statevector oracle (small n)
cli            command-line front end
"""

from .kernels import backend_name

__all__ = ["backend_name"]
__version__ = "0.1.0"
