"""Particle-hole Zitterbewegung in the periodic Kitaev chain."""
