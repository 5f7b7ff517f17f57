#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "crnapprox/network.hpp"

namespace crn {

struct ModelOptions {
  /// Regenerates the reaction list of a `metabolism` model for this m.
  std::optional<int> metabolism_m;
};

/// Parses and validates a JSON model document.  `source_name` prefixes
/// diagnostics ("<source>:<line>: reaction <k>: ...").  Throws ModelError.
ReactionNetwork parse_model_text(std::string_view text, std::string_view source_name = "<model>",
                                 const ModelOptions& options = {});

ReactionNetwork parse_model(const std::filesystem::path& path, const ModelOptions& options = {});

/// JSON document accepted by parse_model_text; species with coefficient 0
/// are omitted from the reactant/product maps.
std::string serialize_model(const ReactionNetwork& network);

/// Toy metabolism: 2E <-> 0 <-> N, N + mE <-> (m+2)E.  Rate constants in
/// reaction order 0->N, N->0, N+mE->(m+2)E, (m+2)E->N+mE, 2E->0, 0->2E.
ReactionNetwork make_metabolism(int m,
                                std::array<double, 6> rates = {10.0, 1.0, 10.0, 1.0, 10.0, 1.0});

/// Minimal bistable system with S and P absorbed into the rate constants:
/// Y -> 2X, 2X -> X+Y, X+Y -> Y, X -> 0.
ReactionNetwork make_bistable(std::array<double, 4> rates = {8.0, 1.0, 1.0, 1.5});

}  // namespace crn
