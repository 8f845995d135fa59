#include "mcnls/envelope.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mcnls {

PiecewiseEnvelope::PiecewiseEnvelope(double J0, std::vector<double> times, std::vector<int> exponents)
    : J0_(J0), times_(std::move(times)), exponents_(std::move(exponents)) {
  if (!(J0_ > 1.0) || !std::isfinite(J0_)) throw std::invalid_argument("envelope: J0 must exceed 1");
  if (times_.size() < 2) throw std::invalid_argument("envelope: at least one small interval is required");
  if (times_.size() != exponents_.size()) {
    throw std::invalid_argument("envelope: times and exponents differ in length");
  }
  if (exponents_.front() != 0) throw std::invalid_argument("envelope: N(t_0) must be 1");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw std::invalid_argument("envelope: non-finite breakpoint");
    if (exponents_[i] > 0) throw std::invalid_argument("envelope: heights must not exceed 1");
    if (i > 0) {
      if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("envelope: breakpoints must increase");
      if (std::abs(exponents_[i] - exponents_[i - 1]) > 1) {
        throw std::invalid_argument("envelope: neighbouring heights must differ by at most one lattice step");
      }
    }
  }
}

double PiecewiseEnvelope::height(std::size_t node) const { return std::pow(J0_, exponents_.at(node)); }

double PiecewiseEnvelope::value(double t) const {
  if (t <= times_.front()) return height(0);
  if (t >= times_.back()) return height(nodes() - 1);
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double s = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return (1.0 - s) * height(i) + s * height(i + 1);
}

std::vector<Extremum> detect_extrema(const PiecewiseEnvelope& e) {
  const auto& ex = e.exponents();
  const std::size_t last = ex.size() - 1;
  std::vector<Extremum> out;
  std::size_t s = 0;
  while (s <= last) {
    std::size_t f = s;
    while (f < last && ex[f + 1] == ex[s]) ++f;
    const bool has_left = s > 0, has_right = f < last;
    const int left = has_left ? ex[s - 1] - ex[s] : 0;
    const int right = has_right ? ex[f + 1] - ex[s] : 0;
    Extremum x;
    x.start = s;
    x.end = f;
    x.length = f - s;
    x.exponent = ex[s];
    x.height = e.height(s);
    x.boundary = !(has_left && has_right);
    bool keep = false;
    if (!has_left && !has_right) {
      x.kind = ExtremumKind::kPeak;
      keep = true;
    } else if (has_left && has_right) {
      if (left < 0 && right < 0) {
        x.kind = ExtremumKind::kPeak;
        keep = true;
      } else if (left > 0 && right > 0) {
        x.kind = ExtremumKind::kValley;
        keep = true;
      }
    } else {
      const int flank = has_left ? left : right;
      x.kind = flank < 0 ? ExtremumKind::kPeak : ExtremumKind::kValley;
      keep = true;
    }
    if (keep) out.push_back(x);
    s = f + 1;
  }
  return out;
}

PiecewiseEnvelope smooth_once(const PiecewiseEnvelope& e) {
  std::vector<int> ex = e.exponents();
  for (const auto& x : detect_extrema(e)) {
    if (x.kind != ExtremumKind::kPeak || x.boundary) continue;
    for (std::size_t i = x.start; i <= x.end; ++i) ex[i] -= 1;
  }
  return PiecewiseEnvelope(e.J0(), e.times(), std::move(ex));
}

PiecewiseEnvelope smooth(const PiecewiseEnvelope& e, int m) {
  if (m < 0) throw std::invalid_argument("smooth: m must be nonnegative");
  PiecewiseEnvelope out = e;
  for (int k = 0; k < m; ++k) out = smooth_once(out);
  return out;
}

double total_variation(const PiecewiseEnvelope& e) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < e.nodes(); ++i) s += std::abs(e.height(i + 1) - e.height(i));
  return s;
}

double cubic_mass(const PiecewiseEnvelope& e) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < e.nodes(); ++i) {
    const double a = e.height(i), b = e.height(i + 1);
    s += (e.times()[i + 1] - e.times()[i]) * (a * a * a + a * a * b + a * b * b + b * b * b) / 4.0;
  }
  return s;
}

double peak_height_sum(const PiecewiseEnvelope& e, PeakScope scope) {
  const std::size_t last = e.nodes() - 1;
  double s = 0.0;
  for (const auto& x : detect_extrema(e)) {
    if (x.kind != ExtremumKind::kPeak) continue;
    if (scope == PeakScope::kInterior && x.boundary) continue;
    if (scope == PeakScope::kLeading && x.end == last && x.start != 0) continue;
    s += x.height;
  }
  return s;
}

double small_interval_height_sum(const PiecewiseEnvelope& e) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < e.nodes(); ++i) s += std::max(e.height(i), e.height(i + 1));
  return s;
}

RatioCertificate certify_ratio(const PiecewiseEnvelope& e, int m) {
  if (m < 1) throw std::invalid_argument("certify_ratio: m must be at least 1");
  const PiecewiseEnvelope nm = smooth(e, m);
  RatioCertificate c;
  c.m = m;
  c.variation_m = total_variation(nm);
  c.small_interval_sum = small_interval_height_sum(e);
  c.peak_sum_m = peak_height_sum(nm, PeakScope::kLeading);
  c.cubic_mass = cubic_mass(e);
  const double slack = 1e-12 * (1.0 + c.small_interval_sum);
  c.variation_ok = c.variation_m <= 2.0 * c.peak_sum_m + 2.0 + slack;
  c.heights_ok = c.small_interval_sum + slack >=
                 m * c.peak_sum_m - m + c.cubic_mass / (2.0 * std::pow(e.J0(), m));
  return c;
}

void write_envelope_csv(std::ostream& out, const PiecewiseEnvelope& e) {
  const auto old = out.precision(17);
  out << "# J0=" << e.J0() << "\n" << "t,N\n";
  for (std::size_t i = 0; i < e.nodes(); ++i) out << e.times()[i] << "," << e.exponents()[i] << "\n";
  out.precision(old);
}

namespace {

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("envelope csv line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) csv_error(line, "bad number '" + token + "'");
  return v;
}

}  // namespace

PiecewiseEnvelope read_envelope_csv(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  double J0 = 0.0;
  bool have_j0 = false, have_columns = false;
  std::vector<double> times;
  std::vector<int> exps;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string body = trim(s.substr(1));
      if (body.rfind("J0=", 0) == 0) {
        J0 = parse_double(trim(body.substr(3)), line);
        have_j0 = true;
      }
      continue;
    }
    if (!have_columns) {
      if (s != "t,N") csv_error(line, "expected column line 't,N'");
      have_columns = true;
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos) {
      csv_error(line, "expected two columns");
    }
    const std::string tt = trim(s.substr(0, comma)), nt = trim(s.substr(comma + 1));
    times.push_back(parse_double(tt, line));
    int ex = 0;
    const auto res = std::from_chars(nt.data(), nt.data() + nt.size(), ex);
    if (res.ec == std::errc() && res.ptr == nt.data() + nt.size()) {
      exps.push_back(ex);
    } else {
      if (!have_j0) csv_error(line, "height given before the J0 header");
      const double h = parse_double(nt, line);
      if (!(h > 0.0)) csv_error(line, "height must be positive");
      const double lg = std::log(h) / std::log(J0);
      const double r = std::round(lg);
      if (std::abs(lg - r) > 1e-9) csv_error(line, "height " + nt + " is not a power of J0");
      exps.push_back(static_cast<int>(r));
    }
  }
  if (!have_j0) throw std::runtime_error("envelope csv: missing '# J0=' header");
  if (!have_columns) throw std::runtime_error("envelope csv: missing column line");
  try {
    return PiecewiseEnvelope(J0, std::move(times), std::move(exps));
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error(std::string("envelope csv: ") + err.what());
  }
}

void save_envelope_csv(const std::string& path, const PiecewiseEnvelope& e) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_envelope_csv(out, e);
  if (!out) throw std::runtime_error("failed writing " + path);
}

PiecewiseEnvelope load_envelope_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_envelope_csv(in);
}

PiecewiseEnvelope envelope_from_series(const DiagnosticsSeries& series, double J0,
                                       double norm_per_interval) {
  if (!(J0 > 1.0)) throw std::invalid_argument("envelope_from_series: J0 must exceed 1");
  if (!(norm_per_interval > 0.0)) throw std::invalid_argument("envelope_from_series: norm_per_interval must be positive");
  const auto& rec = series.records;
  if (rec.size() < 2) throw std::invalid_argument("envelope_from_series: need at least two records");
  const double N0 = rec.front().N_est;
  if (!(N0 > 0.0)) throw std::invalid_argument("envelope_from_series: first N_est must be positive");

  std::vector<std::size_t> picks{0};
  double next = norm_per_interval;
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (rec[i].scat_accum >= next) {
      picks.push_back(i);
      next = (std::floor(rec[i].scat_accum / norm_per_interval) + 1.0) * norm_per_interval;
    }
  }
  if (picks.back() != rec.size() - 1) picks.push_back(rec.size() - 1);
  if (picks.size() < 2) throw std::invalid_argument("envelope_from_series: fewer than two breakpoints");

  std::vector<double> times;
  std::vector<int> exps;
  for (std::size_t k = 0; k < picks.size(); ++k) {
    const auto& r = rec[picks[k]];
    int target = 0;
    if (r.N_est > 0.0) target = std::min(0, static_cast<int>(std::lround(std::log(r.N_est / N0) / std::log(J0))));
    if (k == 0) target = 0;
    if (!exps.empty()) target = std::clamp(target, exps.back() - 1, exps.back() + 1);
    times.push_back(r.t);
    exps.push_back(std::min(target, 0));
  }
  return PiecewiseEnvelope(J0, std::move(times), std::move(exps));
}

}  // namespace mcnls
