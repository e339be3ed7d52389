#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mixhom/config.hpp"
#include "mixhom/error.hpp"
#include "mixhom/io.hpp"

namespace mixhom {

/// partition, solve-coupled, solve-limit, simulate-n, simulate-limit, sweep,
/// compare
const std::vector<std::string>& command_names();

/// Process exit status for a failure category; 0 is success and 1 an
/// uncategorized failure.
int exit_code(ErrorKind kind) noexcept;

/// Runs one command and writes its artifacts plus manifest.json into `out`.
/// Progress lines go to `log`. Throws mixhom::Error.
std::vector<ManifestEntry> run_command(std::string_view command, const ExperimentConfig& config,
                                       const std::filesystem::path& out, std::ostream& log);

/// family, n, k, r, theta, max_diam, component count and cell counts.
nlohmann::ordered_json partition_summary(const Partition& partition);

}  // namespace mixhom
