#pragma once

#include <cstddef>

#include "json.hpp"
#include "schauder/spoly.hpp"

namespace schauder {

/// [{beta:[...], e:"p/q", log:m, t:l, coeff:"p/q"}, ...] in key order.
nlohmann::json spoly_to_json(const SPoly& p);

/// Inverse of spoly_to_json. Every entry must carry a multiindex of length dims.
SPoly spoly_from_json(const nlohmann::json& j, const Gamma& gamma, std::size_t dims);

}  // namespace schauder
