#include "ffp/errors.hpp"

namespace ffp {

DivergenceError::DivergenceError(int iteration, const std::string &what)
    : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

FormatError::FormatError(const std::string &what, std::uint64_t offset)
    : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

} // namespace ffp
