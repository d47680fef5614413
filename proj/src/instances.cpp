#include "techroute/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "json_util.hpp"
#include "techroute/errors.hpp"

namespace techroute {

using detail::json;

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "techroute-instance";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a keyed hash; used to extend pre-drawn tables.
double keyed_uniform(std::uint64_t seed, Stream stream, std::uint64_t a,
                     std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x5851f42d4c957f2dULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void InstanceConfig::validate() const {
  check_probability(absence_prob, "absence_prob");
  check_probability(rework_prob, "rework_prob");
  check_probability(easy_share, "easy_share");
  if (num_regular < 0 || num_expert < 0)
    throw ConfigError("technician counts must be non-negative");
  if (!(area_side_km > 0.0)) throw ConfigError("area_side_km must be positive");
  if (!(speed_kmh > 0.0)) throw ConfigError("speed_kmh must be positive");
  if (service_minutes < 0.0 || work_limit_minutes < 0.0)
    throw ConfigError("times must be non-negative");
  if (weekly_demand_mean < 0.0 || cv < 0.0 || monday_multiplier < 0.0)
    throw ConfigError("demand parameters must be non-negative");
  if (deadline_offset_days < 0 || arrival_days < 0)
    throw ConfigError("day counts must be non-negative");
  if (!(eta > 1.0)) throw ConfigError("eta must exceed 1");
}

TravelParams InstanceConfig::travel() const {
  return TravelParams{Point{area_side_km / 2.0, area_side_km / 2.0}, speed_kmh,
                      service_minutes, work_limit_minutes};
}

bool is_monday(int day) { return day >= 1 && (day - 1) % 5 == 0; }

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x7ec4u};
  return std::mt19937_64(seq);
}

int daily_arrival_count(int day, const InstanceConfig& config,
                        std::mt19937_64& rng) {
  const double mu = config.daily_mean();
  double draw = mu;
  if (config.cv > 0.0 && mu > 0.0) {
    std::normal_distribution<double> normal(mu, config.cv * mu);
    draw = normal(rng);
  }
  if (is_monday(day)) draw *= config.monday_multiplier;
  return std::max(0, static_cast<int>(std::lround(draw)));
}

std::vector<Technician> InstanceRealization::roster() const {
  std::vector<Technician> out;
  out.reserve(static_cast<std::size_t>(config.technician_count()));
  for (int k = 0; k < config.num_regular; ++k)
    out.push_back({k, Skill::Regular});
  for (int k = 0; k < config.num_expert; ++k)
    out.push_back({config.num_regular + k, Skill::Expert});
  return out;
}

std::span<const Customer> InstanceRealization::arrivals_on(int period) const {
  if (period < 1 || period > static_cast<int>(arrivals.size())) return {};
  return arrivals[static_cast<std::size_t>(period - 1)];
}

bool InstanceRealization::absent(int technician, int period) const {
  if (technician < 0 || technician >= static_cast<int>(absences.size()))
    throw LookupError("unknown technician " + std::to_string(technician));
  const auto& row = absences[static_cast<std::size_t>(technician)];
  if (period >= 1 && period <= static_cast<int>(row.size()))
    return row[static_cast<std::size_t>(period - 1)];
  return keyed_uniform(config.seed, Stream::Absences,
                       static_cast<std::uint64_t>(technician),
                       static_cast<std::uint64_t>(period)) <
         config.absence_prob;
}

double InstanceRealization::rework_uniform(int customer_id, int k) const {
  if (customer_id < 1 || customer_id > static_cast<int>(rework_streams.size()))
    throw LookupError("unknown customer " + std::to_string(customer_id));
  const auto& stream = rework_streams[static_cast<std::size_t>(customer_id - 1)];
  if (k >= 0 && k < static_cast<int>(stream.size()))
    return stream[static_cast<std::size_t>(k)];
  return keyed_uniform(config.seed, Stream::Rework,
                       static_cast<std::uint64_t>(customer_id),
                       static_cast<std::uint64_t>(k));
}

InstanceRealization generate_instance(const InstanceConfig& config) {
  config.validate();
  InstanceRealization out;
  out.config = config;

  auto arrivals_rng = stream_rng(config.seed, Stream::Arrivals);
  auto location_rng = stream_rng(config.seed, Stream::Locations);
  auto task_rng = stream_rng(config.seed, Stream::Tasks);
  auto absence_rng = stream_rng(config.seed, Stream::Absences);
  auto rework_rng = stream_rng(config.seed, Stream::Rework);

  std::uniform_real_distribution<double> coord(0.0, config.area_side_km);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int next_id = 1;
  out.arrivals.resize(static_cast<std::size_t>(config.arrival_days));
  for (int day = 1; day <= config.arrival_days; ++day) {
    const int count = daily_arrival_count(day, config, arrivals_rng);
    auto& today = out.arrivals[static_cast<std::size_t>(day - 1)];
    today.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      Customer c;
      c.id = next_id++;
      c.location.x = coord(location_rng);
      c.location.y = coord(location_rng);
      c.task = unit(task_rng) < config.easy_share ? Task::Easy : Task::Advanced;
      c.arrival_period = day;
      c.deadline = day + config.deadline_offset_days;
      today.push_back(c);
    }
  }

  const int horizon = std::max(1, kAbsenceHorizonFactor * config.arrival_days);
  out.absences.assign(static_cast<std::size_t>(config.technician_count()),
                      std::vector<bool>(static_cast<std::size_t>(horizon)));
  for (auto& row : out.absences)
    for (std::size_t t = 0; t < row.size(); ++t)
      row[t] = unit(absence_rng) < config.absence_prob;

  out.rework_streams.resize(static_cast<std::size_t>(next_id - 1));
  for (auto& stream : out.rework_streams) {
    stream.resize(kReworkDraws);
    for (double& u : stream) u = unit(rework_rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json config_json(const InstanceConfig& c) {
  return json{{"area_side_km", c.area_side_km},
              {"num_regular", c.num_regular},
              {"num_expert", c.num_expert},
              {"absence_prob", c.absence_prob},
              {"work_limit_minutes", c.work_limit_minutes},
              {"service_minutes", c.service_minutes},
              {"speed_kmh", c.speed_kmh},
              {"weekly_demand_mean", c.weekly_demand_mean},
              {"cv", c.cv},
              {"monday_multiplier", c.monday_multiplier},
              {"deadline_offset_days", c.deadline_offset_days},
              {"eta", c.eta},
              {"rework_prob", c.rework_prob},
              {"arrival_days", c.arrival_days},
              {"easy_share", c.easy_share},
              {"seed", c.seed}};
}

const std::set<std::string> kConfigKeys = {
    "area_side_km",       "num_regular",     "num_expert",
    "absence_prob",       "work_limit_minutes", "service_minutes",
    "speed_kmh",          "weekly_demand_mean", "cv",
    "monday_multiplier",  "deadline_offset_days", "eta",
    "rework_prob",        "arrival_days",    "easy_share",
    "seed"};

// Missing keys keep their defaults so partial config files are accepted.
InstanceConfig config_from(const json& j, const std::string& path,
                           std::vector<std::string>* warnings) {
  if (!j.is_object()) throw ParseError("field '" + path + "': expected object");
  InstanceConfig c;
  auto opt = [&](const char* key, auto& slot) {
    auto it = j.find(key);
    if (it != j.end())
      slot = detail::get_as<std::decay_t<decltype(slot)>>(*it,
                                                          path + "." + key);
  };
  opt("area_side_km", c.area_side_km);
  opt("num_regular", c.num_regular);
  opt("num_expert", c.num_expert);
  opt("absence_prob", c.absence_prob);
  opt("work_limit_minutes", c.work_limit_minutes);
  opt("service_minutes", c.service_minutes);
  opt("speed_kmh", c.speed_kmh);
  opt("weekly_demand_mean", c.weekly_demand_mean);
  opt("cv", c.cv);
  opt("monday_multiplier", c.monday_multiplier);
  opt("deadline_offset_days", c.deadline_offset_days);
  opt("eta", c.eta);
  opt("rework_prob", c.rework_prob);
  opt("arrival_days", c.arrival_days);
  opt("easy_share", c.easy_share);
  opt("seed", c.seed);
  detail::note_unknown_keys(j, kConfigKeys, path, warnings);
  return c;
}

Task task_from(const std::string& s, const std::string& path) {
  if (s == "easy") return Task::Easy;
  if (s == "advanced") return Task::Advanced;
  throw ParseError("field '" + path + "': unknown task '" + s + "'");
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::clog << "warning: " << w << '\n';
}

}  // namespace

std::string config_to_json(const InstanceConfig& config) {
  return config_json(config).dump(2);
}

InstanceConfig config_from_json(const std::string& text) {
  std::vector<std::string> warnings;
  const json j = detail::parse_document(text, "<config>");
  InstanceConfig c = config_from(j, "config", &warnings);
  warn_all(warnings);
  c.validate();
  return c;
}

InstanceConfig load_instance_config(const std::filesystem::path& path) {
  std::vector<std::string> warnings;
  const json j = detail::parse_document(detail::read_text_file(path),
                                        path.string());
  // Accept either a bare config object or one nested under "instance".
  const json& body = j.contains("instance") ? j.at("instance") : j;
  InstanceConfig c = config_from(body, "config", &warnings);
  warn_all(warnings);
  c.validate();
  return c;
}

std::uint64_t config_hash(const InstanceConfig& config) {
  const std::string text = config_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_instance(const InstanceRealization& r,
                   const std::filesystem::path& path) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["config"] = config_json(r.config);
  json arrivals = json::array();
  for (std::size_t d = 0; d < r.arrivals.size(); ++d) {
    json day = json::array();
    for (const Customer& c : r.arrivals[d]) {
      day.push_back(json{{"id", c.id},
                         {"x", c.location.x},
                         {"y", c.location.y},
                         {"task", std::string(to_string(c.task))},
                         {"arrival", c.arrival_period},
                         {"deadline", c.deadline}});
    }
    arrivals.push_back(json{{"period", d + 1}, {"customers", std::move(day)}});
  }
  doc["arrivals"] = std::move(arrivals);
  json absences = json::array();
  for (const auto& row : r.absences) {
    std::string bits;
    bits.reserve(row.size());
    for (bool b : row) bits.push_back(b ? '1' : '0');
    absences.push_back(std::move(bits));
  }
  doc["absences"] = std::move(absences);
  json rework = json::array();
  for (const auto& stream : r.rework_streams) rework.push_back(stream);
  doc["rework_streams"] = std::move(rework);
  detail::write_text_file(path, doc.dump(1) + "\n");
}

InstanceRealization load_instance(const std::filesystem::path& path,
                                  std::vector<std::string>* warnings) {
  std::vector<std::string> local_warnings;
  std::vector<std::string>* sink = warnings ? warnings : &local_warnings;
  const json doc = detail::parse_document(detail::read_text_file(path),
                                          path.string());
  const std::string root = "instance";
  const auto format = detail::read_field<std::string>(doc, "format", root);
  if (format != kFormatName)
    throw ParseError("field 'instance.format': expected '" +
                     std::string(kFormatName) + "', found '" + format + "'");
  const int version = detail::read_field<int>(doc, "version", root);
  if (version != kFormatVersion)
    throw VersionError("instance format version " + std::to_string(version) +
                       " is not supported (expected " +
                       std::to_string(kFormatVersion) + ")");
  detail::note_unknown_keys(
      doc, {"format", "version", "config", "arrivals", "absences",
            "rework_streams"},
      root, sink);

  InstanceRealization r;
  r.config = config_from(detail::field(doc, "config", root), root + ".config",
                         sink);

  const json& arrivals = detail::field(doc, "arrivals", root);
  if (!arrivals.is_array())
    throw ParseError("field 'instance.arrivals': expected array");
  for (std::size_t d = 0; d < arrivals.size(); ++d) {
    const std::string dpath = root + ".arrivals[" + std::to_string(d) + "]";
    const int period = detail::read_field<int>(arrivals[d], "period", dpath);
    if (period != static_cast<int>(d) + 1)
      throw ParseError("field '" + dpath + ".period': expected " +
                       std::to_string(d + 1));
    const json& list = detail::field(arrivals[d], "customers", dpath);
    if (!list.is_array())
      throw ParseError("field '" + dpath + ".customers': expected array");
    std::vector<Customer> day;
    day.reserve(list.size());
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string cpath = dpath + ".customers[" + std::to_string(k) + "]";
      const json& cj = list[k];
      Customer c;
      c.id = detail::read_field<int>(cj, "id", cpath);
      c.location.x = detail::read_field<double>(cj, "x", cpath);
      c.location.y = detail::read_field<double>(cj, "y", cpath);
      c.task = task_from(detail::read_field<std::string>(cj, "task", cpath),
                         cpath + ".task");
      c.arrival_period = detail::read_field<int>(cj, "arrival", cpath);
      c.deadline = detail::read_field<int>(cj, "deadline", cpath);
      detail::note_unknown_keys(
          cj, {"id", "x", "y", "task", "arrival", "deadline"}, cpath, sink);
      day.push_back(c);
    }
    r.arrivals.push_back(std::move(day));
  }

  const json& absences = detail::field(doc, "absences", root);
  if (!absences.is_array())
    throw ParseError("field 'instance.absences': expected array");
  for (std::size_t w = 0; w < absences.size(); ++w) {
    const std::string apath = root + ".absences[" + std::to_string(w) + "]";
    const auto bits = detail::get_as<std::string>(absences[w], apath);
    std::vector<bool> row;
    row.reserve(bits.size());
    for (char ch : bits) {
      if (ch != '0' && ch != '1')
        throw ParseError("field '" + apath + "': expected only 0/1 characters");
      row.push_back(ch == '1');
    }
    r.absences.push_back(std::move(row));
  }

  const json& rework = detail::field(doc, "rework_streams", root);
  if (!rework.is_array())
    throw ParseError("field 'instance.rework_streams': expected array");
  for (std::size_t k = 0; k < rework.size(); ++k)
    r.rework_streams.push_back(detail::get_as<std::vector<double>>(
        rework[k], root + ".rework_streams[" + std::to_string(k) + "]"));

  // Cross-field consistency.
  std::size_t customers = 0;
  for (const auto& day : r.arrivals) customers += day.size();
  if (customers != r.rework_streams.size())
    throw ParseError("field 'instance.rework_streams': " +
                     std::to_string(r.rework_streams.size()) +
                     " streams for " + std::to_string(customers) +
                     " customers");
  if (static_cast<int>(r.absences.size()) != r.config.technician_count())
    throw ParseError("field 'instance.absences': " +
                     std::to_string(r.absences.size()) + " rows for " +
                     std::to_string(r.config.technician_count()) +
                     " technicians");
  try {
    r.config.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("field 'instance.config': ") + e.what());
  }
  // Shared locations are allowed (zero travel between them) but reported.
  std::map<std::pair<double, double>, int> seen;
  for (const auto& day : r.arrivals)
    for (const Customer& c : day) {
      const auto [it, fresh] = seen.emplace(std::pair{c.location.x, c.location.y}, c.id);
      if (!fresh)
        sink->push_back("customers " + std::to_string(it->second) + " and " +
                        std::to_string(c.id) + " share a location");
    }
  if (!warnings) warn_all(local_warnings);
  return r;
}

std::vector<std::filesystem::path> generate_instance_set(
    InstanceConfig config, int count, std::uint64_t base_seed,
    const std::filesystem::path& out_dir) {
  if (count < 0) throw ConfigError("instance count must be non-negative");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  json manifest;
  manifest["format"] = "techroute-manifest";
  manifest["version"] = kFormatVersion;
  config.seed = base_seed;
  manifest["config"] = config_json(config);
  manifest["config_hash"] = config_hash(config);
  manifest["instances"] = json::array();
  for (int k = 0; k < count; ++k) {
    config.seed = base_seed + static_cast<std::uint64_t>(k);
    char name[32];
    std::snprintf(name, sizeof(name), "instance_%04d.json", k);
    const auto path = out_dir / name;
    save_instance(generate_instance(config), path);
    files.push_back(path);
    manifest["instances"].push_back(json{{"file", name}, {"seed", config.seed}});
  }
  detail::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return files;
}

std::vector<std::filesystem::path> list_instance_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("instance_") &&
        entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace techroute
