# DDSim - dynamical decoupling simulator for unbounded environments
__version__ = "1.0.0"
