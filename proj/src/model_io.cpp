#include "crnapprox/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crnapprox/errors.hpp"

namespace crn {

using nlohmann::json;

namespace {

// Line number (1-based) of the opening brace of reactions[index] in the raw
// text, found by a string-aware scan.  Returns 0 if it cannot be located.
std::size_t reaction_line(std::string_view text, std::size_t index) {
  const auto key = text.find("\"reactions\"");
  if (key == std::string_view::npos) return 0;
  auto pos = text.find('[', key);
  if (pos == std::string_view::npos) return 0;
  int depth = 0;
  std::size_t seen = 0;
  bool in_string = false;
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') {
      if (depth == 0 && c == '{') {
        if (seen == index)
          return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + i, '\n'));
        ++seen;
      }
      ++depth;
    } else if (c == '}' || c == ']') {
      if (depth == 0) return 0;
      --depth;
    }
  }
  return 0;
}

class Diagnostics {
 public:
  Diagnostics(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ModelError(std::string(source_) + ": " + message);
  }

  [[noreturn]] void fail_reaction(std::size_t index, const std::string& message) const {
    std::string where(source_);
    if (auto line = reaction_line(text_, index); line > 0) where += ":" + std::to_string(line);
    throw ModelError(where + ": reaction " + std::to_string(index + 1) + ": " + message);
  }

 private:
  std::string_view text_;
  std::string_view source_;
};

Stoichiometry read_side(const json& side, const std::vector<std::string>& species,
                        std::size_t k, std::string_view label, const Diagnostics& diag) {
  Stoichiometry out(species.size(), 0);
  if (side.is_null()) return out;
  if (!side.is_object()) diag.fail_reaction(k, std::string(label) + " must be an object");
  for (const auto& [name, value] : side.items()) {
    auto it = std::find(species.begin(), species.end(), name);
    if (it == species.end())
      diag.fail_reaction(k, "unknown species '" + name + "' in " + std::string(label));
    if (!value.is_number_integer() && !value.is_number_unsigned())
      diag.fail_reaction(k, "non-integer stoichiometry for '" + name + "' in " + std::string(label));
    const auto coefficient = value.get<long long>();
    if (coefficient < 0 || coefficient > 1000)
      diag.fail_reaction(k, "stoichiometry for '" + name + "' must be in [0, 1000]");
    out[static_cast<std::size_t>(it - species.begin())] = static_cast<int>(coefficient);
  }
  return out;
}

}  // namespace

ReactionNetwork parse_model_text(std::string_view text, std::string_view source_name,
                                 const ModelOptions& options) {
  const Diagnostics diag(text, source_name);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    diag.fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) diag.fail("top-level value must be an object");

  const std::string name = doc.value("name", std::string("unnamed"));

  if (!doc.contains("species") || !doc["species"].is_array())
    diag.fail("'species' must be an array of strings");
  std::vector<std::string> species;
  for (const auto& s : doc["species"]) {
    if (!s.is_string()) diag.fail("'species' must be an array of strings");
    species.push_back(s.get<std::string>());
  }

  auto convention = RateConvention::absorbed;
  if (doc.contains("rate_convention")) {
    const auto& c = doc["rate_convention"];
    auto parsed = c.is_string() ? rate_convention_from_string(c.get<std::string>()) : std::nullopt;
    if (!parsed) diag.fail("'rate_convention' must be \"absorbed\" or \"factorial\"");
    convention = *parsed;
  }

  std::map<std::string, long> parameters;
  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object()) diag.fail("'parameters' must be an object");
    for (const auto& [key, value] : doc["parameters"].items()) {
      if (!value.is_number_integer()) diag.fail("parameter '" + key + "' must be an integer");
      parameters[key] = value.get<long>();
    }
  }

  std::vector<Reaction> reactions;
  if (doc.contains("reactions")) {
    if (!doc["reactions"].is_array()) diag.fail("'reactions' must be an array");
    std::size_t k = 0;
    for (const auto& r : doc["reactions"]) {
      if (!r.is_object()) diag.fail_reaction(k, "must be an object");
      Reaction reaction;
      reaction.reactants = read_side(r.value("reactants", json()), species, k, "reactants", diag);
      reaction.products = read_side(r.value("products", json()), species, k, "products", diag);
      if (!r.contains("rate_constant") || !r["rate_constant"].is_number())
        diag.fail_reaction(k, "missing numeric 'rate_constant'");
      reaction.rate_constant = r["rate_constant"].get<double>();
      if (!(reaction.rate_constant > 0.0) || !std::isfinite(reaction.rate_constant))
        diag.fail_reaction(k, "rate constant must be positive and finite");
      if (reaction.reactants == reaction.products)
        diag.fail_reaction(k, "self-loop reaction (reactants equal products)");
      reactions.push_back(std::move(reaction));
      ++k;
    }
  }

  if (options.metabolism_m) {
    if (name != "metabolism") diag.fail("--m only applies to the metabolism model");
    if (*options.metabolism_m < 0) diag.fail("m must be a non-negative integer");
    if (reactions.size() != 6) diag.fail("metabolism model must list six reactions");
    std::array<double, 6> rates{};
    for (std::size_t k = 0; k < 6; ++k) rates[k] = reactions[k].rate_constant;
    auto regenerated = make_metabolism(*options.metabolism_m, rates);
    if (regenerated.species() != species)
      diag.fail("metabolism model must declare species [\"N\", \"E\"]");
    return regenerated;
  }

  try {
    return ReactionNetwork(name, std::move(species), std::move(reactions), convention,
                           std::move(parameters));
  } catch (const ModelError& e) {
    diag.fail(e.what());
  }
}

ReactionNetwork parse_model(const std::filesystem::path& path, const ModelOptions& options) {
  std::ifstream in(path);
  if (!in) throw ModelError(path.string() + ": cannot open model file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model_text(buffer.str(), path.string(), options);
}

std::string serialize_model(const ReactionNetwork& network) {
  json doc;
  doc["name"] = network.name();
  doc["species"] = network.species();
  doc["rate_convention"] = std::string(to_string(network.convention()));
  if (!network.parameters().empty()) doc["parameters"] = network.parameters();
  auto side = [&](const Stoichiometry& s) {
    json obj = json::object();
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] != 0) obj[network.species()[i]] = s[i];
    return obj;
  };
  json reactions = json::array();
  for (const auto& r : network.reactions())
    reactions.push_back({{"reactants", side(r.reactants)},
                         {"products", side(r.products)},
                         {"rate_constant", r.rate_constant}});
  doc["reactions"] = std::move(reactions);
  return doc.dump(2) + "\n";
}

ReactionNetwork make_metabolism(int m, std::array<double, 6> rates) {
  if (m < 0) throw ModelError("metabolism: m must be non-negative");
  // species order (N, E)
  std::vector<Reaction> reactions = {
      {{0, 0}, {1, 0}, rates[0]},
      {{1, 0}, {0, 0}, rates[1]},
      {{1, m}, {0, m + 2}, rates[2]},
      {{0, m + 2}, {1, m}, rates[3]},
      {{0, 2}, {0, 0}, rates[4]},
      {{0, 0}, {0, 2}, rates[5]},
  };
  return ReactionNetwork("metabolism", {"N", "E"}, std::move(reactions), RateConvention::absorbed,
                         {{"m", m}});
}

ReactionNetwork make_bistable(std::array<double, 4> rates) {
  // species order (X, Y)
  std::vector<Reaction> reactions = {
      {{0, 1}, {2, 0}, rates[0]},
      {{2, 0}, {1, 1}, rates[1]},
      {{1, 1}, {0, 1}, rates[2]},
      {{1, 0}, {0, 0}, rates[3]},
  };
  return ReactionNetwork("bistable", {"X", "Y"}, std::move(reactions), RateConvention::absorbed);
}

}  // namespace crn
