#include "swipt/io.hpp"

#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace swipt::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidParams, what); }

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) bad("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// JSON has no infinities; unbounded values serialize as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string iso8601(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string boundary_csv(const std::vector<REBoundary>& curves) {
  std::string out = kBoundaryHeader;
  out += '\n';
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out += c.scheme + ',' + c.receiver + ',' + format_double(p.rate) + ',' +
             format_double(p.energy) + '\n';
    }
  }
  return out;
}

std::vector<REBoundary> parse_boundary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBoundaryHeader) bad("missing boundary CSV header");
  std::vector<REBoundary> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) bad("boundary CSV rows need 4 columns");
    if (out.empty() || out.back().scheme != cells[0] || out.back().receiver != cells[1]) {
      out.push_back({{}, cells[0], cells[1]});
    }
    out.back().points.push_back({parse_double(cells[2]), parse_double(cells[3])});
  }
  return out;
}

json to_json(const REBoundary& b) {
  json pts = json::array();
  for (const auto& p : b.points) pts.push_back({{"rate_bits", p.rate}, {"energy_units", p.energy}});
  return {{"scheme", b.scheme}, {"receiver", b.receiver}, {"points", pts}};
}

REBoundary boundary_from_json(const json& j) {
  REBoundary b;
  b.scheme = j.at("scheme").get<std::string>();
  b.receiver = j.at("receiver").get<std::string>();
  for (const auto& p : j.at("points")) {
    b.points.push_back({p.at("rate_bits").get<double>(), p.at("energy_units").get<double>()});
  }
  return b;
}

std::string modulation_csv(const std::vector<ModulationRow>& rows) {
  std::string out = kModulationHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.distance_m) + ',' + r.receiver + ',' +
           (r.plan.m ? std::to_string(*r.plan.m) : std::string()) + ',' +
           format_double(r.plan.alpha) + ',' + format_double(r.plan.rho) + ',' +
           format_double(r.plan.rate) + '\n';
  }
  return out;
}

json to_json(const LinkParams& lp) {
  return {{"h", lp.h},
          {"theta", lp.theta},
          {"p", lp.p},
          {"zeta", lp.zeta},
          {"sigma2_a", lp.sigma2_a},
          {"sigma2_cov", lp.sigma2_cov},
          {"sigma2_rec", lp.sigma2_rec},
          {"sigma2_adc", lp.sigma2_adc}};
}

json to_json(const regions::P0Solution& s) {
  return {{"alpha_star", s.alpha_star},
          {"rho_star", s.rho_star},
          {"rate_bits", s.rate},
          {"q_target", s.q_target},
          {"converged", s.converged}};
}

json to_json(const modulation::ModulationPlan& p) {
  return {{"family", modulation::to_string(p.family)},
          {"m", p.m ? json(*p.m) : json(nullptr)},
          {"ser_target", p.ser_target},
          {"alpha", p.alpha},
          {"rho", p.rho},
          {"rate_bits", p.rate}};
}

json to_json(const capacity::MiEstimate& e) {
  return {{"value_bits", e.value},
          {"std_error_bits", e.std_error},
          {"n_samples", e.n_samples},
          {"seed", e.seed},
          {"quadrature_tolerance", e.quadrature_tolerance}};
}

json to_json(const capacity::CnlUpper& u) {
  return {{"bits", number(u.bits)},
          {"branch", u.branch == capacity::UpperBranch::C1 ? "C1" : "C2"},
          {"c1_bits", number(u.c1)},
          {"c2_bits", number(u.c2)}};
}

json to_json(const simkit::SerEstimate& e) {
  return {{"ser_hat", e.ser_hat},
          {"ci_halfwidth", e.ci_halfwidth},
          {"std_error", e.std_error},
          {"errors", e.errors},
          {"n_symbols", e.n_symbols},
          {"seed", e.seed}};
}

json to_json(const simkit::QamSimResult& r) {
  json j = to_json(r.ser);
  j["energy_hat"] = r.energy_hat;
  j["energy_std_error"] = r.energy_std_error;
  return j;
}

json to_json(const simkit::RectifierResult& r) {
  return {{"dc_mean", r.dc_mean},
          {"dc_std_error", r.dc_std_error},
          {"harmonic_residual", r.harmonic_residual},
          {"n_symbols", r.n_symbols},
          {"seed", r.seed}};
}

std::optional<std::string> provenance_timestamp(bool wall_clock) {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    long long t = 0;
    const char* end = epoch + std::char_traits<char>::length(epoch);
    auto [ptr, ec] = std::from_chars(epoch, end, t);
    if (ec == std::errc() && ptr == end) return iso8601(static_cast<std::time_t>(t));
  }
  if (wall_clock) {
    return iso8601(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
  }
  return std::nullopt;
}

json document(json inputs, json outputs, const Provenance& prov) {
  json p = {{"version", kVersion}};
  p["seed"] = prov.seed ? json(*prov.seed) : json(nullptr);
  p["timestamp"] = prov.timestamp ? json(*prov.timestamp) : json(nullptr);
  return {{"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}, {"provenance", p}};
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) bad("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) bad("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    bad("cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace swipt::io
