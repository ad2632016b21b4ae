# Tests package for CBCChaos
