#include "covmax/errors.hpp"

#include <sstream>

namespace covmax {

namespace {

std::string degenerate_message(Pair pair, double tau_hat, double floor) {
  std::ostringstream os;
  os << "degenerate cross-product variance at pair (" << pair.i + 1 << ", " << pair.j + 1
     << "): tau_hat = " << tau_hat << " below floor " << floor;
  return os.str();
}

}  // namespace

DegenerateVariance::DegenerateVariance(Pair pair, double tau_hat, double floor)
    : Error(degenerate_message(pair, tau_hat, floor)), pair_(pair), tau_hat_(tau_hat) {}

CardinalityTooSmall::CardinalityTooSmall(std::size_t cardinality)
    : Error("index set cardinality " + std::to_string(cardinality) +
            " is below 3; Gumbel normalization constants are undefined"),
      cardinality_(cardinality) {}

}  // namespace covmax
