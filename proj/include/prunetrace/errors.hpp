#pragma once

#include <stdexcept>
#include <string>

namespace prunetrace {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// two fields on different grids where one grid is required
struct DimensionError : Error {
    using Error::Error;
};

// division by an empty reference volume
struct DivisionError : Error {
    using Error::Error;
};

// empty tool, all-zero sensitivity field, all-zero weights, and similar
struct DegenerateInputError : Error {
    using Error::Error;
};

// linear system unsolvable to tolerance (typically: no restraints)
struct SolverError : Error {
    using Error::Error;
};

// volume target below the frozen volume
struct InfeasibleTargetError : Error {
    using Error::Error;
};

// scenario file cannot be parsed or cross-checked
struct ConfigError : Error {
    using Error::Error;
};

} // namespace prunetrace
