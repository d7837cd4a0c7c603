#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "fracgs/io.hpp"

namespace fracgs::tools {

/// Runs config.command, writes its artifacts and report.json under
/// `out_dir` and returns the report. Library errors propagate.
Json run_command(const RunConfig& config, const std::filesystem::path& out_dir,
                 const std::function<void(const std::string&)>& log = {});

Json cmd_solve(const RunConfig& config, const std::filesystem::path& out_dir);
Json cmd_spectrum(const RunConfig& config, const std::filesystem::path& out_dir);
Json cmd_continue(const RunConfig& config, const std::filesystem::path& out_dir);
Json cmd_kernels(const RunConfig& config, const std::filesystem::path& out_dir);
Json cmd_extend(const RunConfig& config, const std::filesystem::path& out_dir);
/// `log` receives one line per finished criterion.
Json cmd_verify_all(const RunConfig& config, const std::filesystem::path& out_dir,
                    const std::function<void(const std::string&)>& log = {});

/// Criterion ids selected by RunConfig::criteria ("1,2,9"); empty means all.
std::vector<int> parse_criteria(const std::string& list);

}  // namespace fracgs::tools
