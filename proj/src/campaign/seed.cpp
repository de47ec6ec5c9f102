#include "addt/campaign.hpp"
#include "addt/rng.hpp"

namespace addt::campaign {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const dsl::ScenarioSpec& scenario) {
  return fnv1a64(dsl::serialize(scenario));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t config_hash,
                          std::uint64_t trial_index) {
  return splitmix64(master ^ config_hash ^ (trial_index * 0x9E3779B97F4A7C15ULL));
}

}  // namespace addt::campaign
