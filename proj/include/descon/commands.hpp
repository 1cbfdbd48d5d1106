#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace descon::cli {

// Exit codes: 0 success, 1 configuration or usage error, 2 failed bound
// certification. Errors are printed to stderr naming the offending key or
// bound.
int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed);
int cmd_compare(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed);
int cmd_sweep_alpha(const std::string& config_path, const std::string& out_dir,
                    std::optional<std::uint64_t> seed, const std::vector<double>& alphas);
int cmd_certify(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed);

}  // namespace descon::cli
