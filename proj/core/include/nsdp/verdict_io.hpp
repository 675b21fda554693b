#pragma once

#include "nsdp/cq.hpp"

#include <string>

namespace nsdp {

// One JSON document per check; layout in docs/verdict-format.md.
std::string verdict_to_json(const CqVerdict& v, int indent = 2);
CqVerdict verdict_from_json(const std::string& text);

}  // namespace nsdp
