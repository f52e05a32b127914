#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fiegarch/mcmc.hpp"
#include "fiegarch/model.hpp"
#include "fiegarch/summary.hpp"

namespace fiegarch {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Reads a series: one column with an optional header, or several columns
/// under a header, of which `x` is used. Blank lines are skipped. Throws
/// IoError with the path and line.
std::vector<double> read_series_csv(const std::filesystem::path& path);

/// Header `t,x,sigma2`, t starting at 1.
void write_series_csv(const std::filesystem::path& path, const SimulatedSeries& series);

/// Header `iter,<names...>`, one row per retained draw.
void write_chain_csv(const std::filesystem::path& path, const Chain& chain);

/// Header `parameter,mean,sd,ci_lower,ci_upper,truth,bias,ape`; missing
/// truth-dependent fields are left empty.
void write_summary_csv(const std::filesystem::path& path, const std::vector<PosteriorSummary>& rows);

/// Writes `contents` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace fiegarch
