#pragma once

#include <stdexcept>

namespace npprior {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IncompatibleGrids : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IncompatibleBatches : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleConstraint : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace npprior
