#include "csv.hpp"

#include <stdexcept>

namespace mcnls::cli {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view header)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  line_.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) line_.push_back(',');
    fmt::format_to(std::back_inserter(line_), "{:.17g}", values[i]);
  }
  line_.push_back('\n');
  out_.write(line_.data(), static_cast<std::streamsize>(line_.size()));
}

void CsvWriter::row(const std::vector<double>& values, std::uint32_t trailing_flags) {
  line_.clear();
  for (double v : values) fmt::format_to(std::back_inserter(line_), "{:.17g},", v);
  fmt::format_to(std::back_inserter(line_), "{}\n", trailing_flags);
  out_.write(line_.data(), static_cast<std::streamsize>(line_.size()));
}

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& series) {
  const bool two = series.dim == 2;
  std::string header = "t,mass,energy,variance,kinetic,potential,momentum_x";
  if (two) header += ",momentum_y";
  header += ",scat_accum,N_est,xi_x";
  if (two) header += ",xi_y";
  header += ",x_x";
  if (two) header += ",x_y";
  header += ",flags";

  CsvWriter csv(path, header);
  std::vector<double> v;
  for (const auto& r : series.records) {
    v = {r.t, r.mass, r.energy, r.variance, r.kinetic, r.potential, r.momentum[0]};
    if (two) v.push_back(r.momentum[1]);
    v.push_back(r.scat_accum);
    v.push_back(r.N_est);
    v.push_back(r.xi[0]);
    if (two) v.push_back(r.xi[1]);
    v.push_back(r.x[0]);
    if (two) v.push_back(r.x[1]);
    csv.row(v, r.flags);
  }
}

void write_morawetz_csv(const std::filesystem::path& path, const std::vector<MorawetzRow>& rows) {
  CsvWriter csv(path, "t,action,flux,coercive,tail,curvature,envelope_drift");
  for (const auto& [t, r] : rows) {
    csv.row({t, r.action, r.flux, r.coercive, r.tail, r.curvature, r.envelope_drift});
  }
}

}  // namespace mcnls::cli
