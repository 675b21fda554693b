#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nsdp::testing {

// One randomized case per seed; a failure returns its reason.
using PropertyCase = std::function<std::optional<std::string>(std::uint64_t seed)>;

struct Property {
  std::string name;
  PropertyCase run;
};

std::optional<std::string> moreau_case(std::uint64_t seed);
std::optional<std::string> projection_case(std::uint64_t seed);
std::optional<std::string> caratheodory_case(std::uint64_t seed);
std::optional<std::string> dependence_case(std::uint64_t seed);
std::optional<std::string> al_gradient_case(std::uint64_t seed);

const std::vector<Property>& properties();

inline constexpr int kPropertyCases = 500;

}  // namespace nsdp::testing
