# Tests package for Industrial Facility Simulator