"""Simulation building blocks: Pauli algebra, statevectors, lattices, noise, decoding and defect logic."""
