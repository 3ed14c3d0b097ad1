"""Computation engines: process, survival, inversion, pricing, Monte Carlo oracle"""
