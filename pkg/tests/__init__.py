# DDSim test suite
