# Tests package for ring-chord
