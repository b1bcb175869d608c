"""Model, solver, reliability, simulation and pricing modules of the engine."""
