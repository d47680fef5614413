#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "techroute/domain.hpp"

namespace techroute {

struct InstanceConfig {
  double area_side_km = 200.0;
  int num_regular = 3;
  int num_expert = 3;
  double absence_prob = 0.1;
  double work_limit_minutes = 420.0;
  double service_minutes = 30.0;
  double speed_kmh = 60.0;
  double weekly_demand_mean = 180.0;
  double cv = 1.0 / 6.0;
  double monday_multiplier = 3.0;
  int deadline_offset_days = 2;
  double eta = 1.1;
  double rework_prob = 0.5;
  int arrival_days = 15;
  double easy_share = 0.5;
  std::uint64_t seed = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  double daily_mean() const { return weekly_demand_mean / 7.0; }
  int technician_count() const { return num_regular + num_expert; }
  int cutoff_period() const { return arrival_days + 1; }
  TravelParams travel() const;

  friend bool operator==(const InstanceConfig&, const InstanceConfig&) = default;
};

/// Five working days per week starting on a Monday: periods 1, 6, 11, ...
bool is_monday(int day);

/// Independent RNG stream per randomness source, keyed on the instance seed.
enum class Stream : std::uint64_t {
  Arrivals = 1,
  Locations = 2,
  Tasks = 3,
  Absences = 4,
  Rework = 5,
};

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream);

/// Number of requests revealed on `day`: N(mu, (cv mu)^2), tripled on Mondays,
/// rounded to nearest and clamped at zero.
int daily_arrival_count(int day, const InstanceConfig& config,
                        std::mt19937_64& rng);

/// One full realization of the randomness of an episode (common random
/// numbers). Customer ids run 1..N in arrival order.
struct InstanceRealization {
  InstanceConfig config;
  std::vector<std::vector<Customer>> arrivals;  // [day - 1], days 1..arrival_days
  std::vector<std::vector<bool>> absences;      // [technician][period - 1]
  std::vector<std::vector<double>> rework_streams;  // [customer id - 1]

  std::vector<Technician> roster() const;
  std::span<const Customer> arrivals_on(int period) const;
  /// Absence lookup; periods past the pre-drawn horizon are extended
  /// deterministically from the absence stream.
  bool absent(int technician, int period) const;
  /// k-th rework coin of a customer (k counts risky visits from 0).
  double rework_uniform(int customer_id, int k) const;
  std::size_t customer_count() const { return rework_streams.size(); }

  friend bool operator==(const InstanceRealization&,
                         const InstanceRealization&) = default;
};

inline constexpr int kAbsenceHorizonFactor = 4;
inline constexpr int kReworkDraws = 8;

InstanceRealization generate_instance(const InstanceConfig& config);

/// Versioned JSON document. Reals round-trip bit-exactly.
void save_instance(const InstanceRealization& realization,
                   const std::filesystem::path& path);
/// Throws ParseError (with line or field context) or VersionError. Unknown
/// fields are accepted and reported through `warnings`.
InstanceRealization load_instance(const std::filesystem::path& path,
                                  std::vector<std::string>* warnings = nullptr);

InstanceConfig load_instance_config(const std::filesystem::path& path);
std::string config_to_json(const InstanceConfig& config);
InstanceConfig config_from_json(const std::string& text);

/// FNV-1a over the canonical JSON encoding of the config.
std::uint64_t config_hash(const InstanceConfig& config);

/// Writes instance_0000.json ... plus manifest.json. Seeds are base_seed + k.
std::vector<std::filesystem::path> generate_instance_set(
    InstanceConfig config, int count, std::uint64_t base_seed,
    const std::filesystem::path& out_dir);

/// Sorted instance_*.json files of a directory.
std::vector<std::filesystem::path> list_instance_files(
    const std::filesystem::path& dir);

}  // namespace techroute
