#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "mcnls/evolution.hpp"
#include "mcnls/morawetz.hpp"

namespace mcnls::cli {

/// Writes rows of doubles with 17 significant digits and LF endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header);

  void row(const std::vector<double>& values);
  void row(const std::vector<double>& values, std::uint32_t trailing_flags);

 private:
  std::ofstream out_;
  fmt::memory_buffer line_;
};

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& series);

struct MorawetzRow {
  double t = 0.0;
  MorawetzReport report;
};

void write_morawetz_csv(const std::filesystem::path& path, const std::vector<MorawetzRow>& rows);

}  // namespace mcnls::cli
