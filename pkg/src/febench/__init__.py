"""Numerical workbench for floating-electron qubit readout.

Modules cover qubit primitives, vertical-state spectra, Corbino-cell
electrostatics, quantum capacitance, RF reflectometry, FM sideband
simulation, nanowire-resonator loading, micromagnets, spin-photon
coupling chains, and tunnel-diode oscillators.
"""

__version__ = "0.1.0"
