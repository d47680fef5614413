#include "techroute/report.hpp"

#include <iomanip>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "techroute/errors.hpp"

namespace techroute {

using detail::json;

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::vector<std::string> config_hashes(const MetricsReport& r) {
  std::set<std::string> unique;
  for (const auto& m : r.per_instance) unique.insert(hex(m.config_hash));
  return {unique.begin(), unique.end()};
}

std::vector<std::uint64_t> seeds(const MetricsReport& r) {
  std::vector<std::uint64_t> out;
  for (const auto& m : r.per_instance) out.push_back(m.seed);
  return out;
}

// One comment line naming the provenance, shared by all delimited files.
std::string provenance_line(const MetricsReport& r) {
  std::ostringstream out;
  out << "# policy=" << r.policy << " config_hash=";
  const auto hashes = config_hashes(r);
  for (std::size_t k = 0; k < hashes.size(); ++k) out << (k ? ";" : "") << hashes[k];
  out << " seeds=";
  const auto s = seeds(r);
  for (std::size_t k = 0; k < s.size(); ++k) out << (k ? ";" : "") << s[k];
  out << '\n';
  return out.str();
}

std::ostringstream precise() {
  std::ostringstream out;
  out << std::setprecision(17);
  return out;
}

std::string instance_rows(const MetricsReport& r) {
  auto out = precise();
  out << provenance_line(r);
  out << "instance,seed,config_hash,customers,mean_inconvenience,mean_delay,"
         "returning_visits,advanced_customers,revisited_0,revisited_1,"
         "revisited_2plus,on_time,final_period,leftover_days,technician_days,"
         "divergent\n";
  for (const auto& m : r.per_instance)
    out << m.name << ',' << m.seed << ',' << hex(m.config_hash) << ','
        << m.customers << ',' << m.mean_inconvenience << ',' << m.mean_delay << ','
        << m.returning_visits << ',' << m.advanced_customers << ','
        << m.advanced_revisits[0] << ',' << m.advanced_revisits[1] << ','
        << m.advanced_revisits[2] << ',' << m.on_time << ',' << m.final_period
        << ',' << m.leftover_days << ',' << m.technician_days << ','
        << (m.divergent ? 1 : 0) << '\n';
  return out.str();
}

std::string grid_rows(const MetricsReport& r) {
  auto out = precise();
  out << provenance_line(r);
  out << "row,col,x_center_km,y_center_km,customers,mean_inconvenience\n";
  const int n = r.grid.cells;
  const double size = r.grid.side_km / n;
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      const auto c = static_cast<std::size_t>(row * n + col);
      out << row << ',' << col << ',' << (col + 0.5) * size << ','
          << (row + 0.5) * size << ',' << r.grid_customers[c] << ','
          << r.grid_mean[c] << '\n';
    }
  return out.str();
}

std::string cumulative_rows(const MetricsReport& r) {
  auto out = precise();
  out << provenance_line(r);
  out << "period,mean_cumulative_inconvenience_per_customer\n";
  for (std::size_t t = 0; t < r.cumulative_inconvenience.size(); ++t)
    out << t + 1 << ',' << r.cumulative_inconvenience[t] << '\n';
  return out.str();
}

std::string route_rows(const Evaluation& ev) {
  auto out = precise();
  out << provenance_line(ev.report);
  out << "instance,period,technician,skill,customers\n";
  for (const RouteDump& d : ev.routes) {
    out << d.instance << ',' << d.period << ',' << d.technician << ','
        << to_string(d.skill) << ',';
    for (std::size_t k = 0; k < d.customers.size(); ++k)
      out << (k ? " " : "") << d.customers[k];
    out << '\n';
  }
  return out.str();
}

json estimate_json(const Estimate& e) {
  return json{{"mean", e.mean}, {"standard_error", e.standard_error}};
}

}  // namespace

std::string summary_json(const Evaluation& ev) {
  const MetricsReport& r = ev.report;
  json deltas = json::object();
  for (const auto& [d, share] : r.completion_delta_share)
    deltas[std::to_string(d)] = share;
  json failures = json::array();
  for (const auto& f : ev.failures)
    failures.push_back(json{{"instance", f.instance}, {"message", f.message}});
  json doc{
      {"policy", r.policy},
      {"instances", r.instances},
      {"config_hashes", config_hashes(r)},
      {"seeds", seeds(r)},
      {"mean_inconvenience", estimate_json(r.inconvenience)},
      {"mean_delay", estimate_json(r.delay)},
      {"returning_visits", estimate_json(r.returning_visits)},
      {"leftover_days", estimate_json(r.leftover_days)},
      {"technician_days", estimate_json(r.technician_days)},
      {"advanced_revisit_share",
       json{{"0", r.revisit_share[0]}, {"1", r.revisit_share[1]}, {"2+", r.revisit_share[2]}}},
      {"on_time_share", r.on_time_share},
      {"completion_delta_share", deltas},
      {"grid_cells", r.grid.cells},
      {"divergent_episodes", r.divergent},
      {"failures", failures},
  };
  return doc.dump(2) + "\n";
}

void emit_report(const Evaluation& evaluation, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw IoError("cannot create output directory " + out_dir.string());
  const auto probe = out_dir / ".write_probe";
  detail::write_text_file(probe, "");
  std::filesystem::remove(probe, ec);

  const MetricsReport& r = evaluation.report;
  const std::vector<std::pair<const char*, std::string>> files = {
      {kInstanceRowsFile, instance_rows(r)},
      {kGridFile, grid_rows(r)},
      {kCumulativeFile, cumulative_rows(r)},
      {kRoutesFile, route_rows(evaluation)},
      {kSummaryFile, summary_json(evaluation)},
  };
  for (const auto& [name, text] : files) detail::write_text_file(out_dir / name, text);
}

}  // namespace techroute
