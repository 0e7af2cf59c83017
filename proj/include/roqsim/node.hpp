// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace roqsim {

/// Station identifier, stable for a run. Id 0 is the access point, which also
/// hosts the passive monitoring server.
struct NodeId {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const NodeId&) const = default;
};

inline constexpr NodeId kAccessPoint{0};

}  // namespace roqsim

template <>
struct std::hash<roqsim::NodeId> {
  std::size_t operator()(roqsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
