"""QCDCL proof-search laboratory for QBF."""
