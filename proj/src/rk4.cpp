#include "mixhom/rk4.hpp"

#include <algorithm>

namespace mixhom {

std::vector<double> uniform_snapshots(double horizon, std::size_t count) {
  if (count < 2) throw Error(ErrorKind::config, "need at least two snapshot times");
  std::vector<double> times(count);
  for (std::size_t i = 0; i < count; ++i) {
    times[i] = horizon * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  times.back() = horizon;
  return times;
}

void validate_schedule(const IntegrationOptions& options) {
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) {
    throw Error(ErrorKind::precondition, "time step must be positive and finite");
  }
  if (!(options.horizon >= 0.0)) throw Error(ErrorKind::precondition, "horizon must be nonnegative");
  if (options.snapshots.empty()) throw Error(ErrorKind::precondition, "no snapshot times requested");
  if (!std::is_sorted(options.snapshots.begin(), options.snapshots.end())) {
    throw Error(ErrorKind::precondition, "snapshot times must be sorted");
  }
  if (options.snapshots.front() < 0.0 || options.snapshots.back() > options.horizon) {
    throw Error(ErrorKind::precondition, "snapshot times must lie in [0, T]");
  }
}

}  // namespace mixhom
