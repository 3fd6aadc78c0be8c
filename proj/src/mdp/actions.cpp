#include <array>

#include "p2s/mdp/mdp.hpp"
#include "p2s/util/error.hpp"
#include "toml.hpp"

namespace p2s::mdp {

namespace {

constexpr std::array<std::string_view, kActionCount> kNames = {
    "APPEND_VERIFIER_ERRORS",    "REQUEST_LOOP_INVARIANTS", "REQUEST_DECREASES_CLAUSE",
    "RESTATE_POSTCONDITIONS",    "ADD_WORKED_EXAMPLE",      "SIMPLIFY_AND_RETRY",
    "REQUEST_ASSERTIONS",        "FORBID_RECURSION_AND_WHILE", "EMPHASIZE_CONTRACT_VERBATIM",
    "STEP_BY_STEP_REASONING",    "RESET_TO_INITIAL",        "NO_CHANGE",
};

constexpr std::array<std::string_view, kActionCount> kSnippets = {
    "The previous attempt failed verification. Fix every error reported by the verifier:",
    "Add loop invariants to every loop that bound each loop variable and relate the "
    "accumulated value to the postcondition.",
    "Add a decreases clause to every loop and recursive call so termination can be proved.",
    "Re-read the ensures clauses and make sure the returned values satisfy each one exactly.",
    "Worked example of the expected shape:\n"
    "method Square(n: int) returns (r: int)\n  ensures r == n * n\n{\n  r := n * n;\n}",
    "Write the simplest implementation that satisfies the contract. Avoid helper lemmas and "
    "unnecessary ghost state.",
    "Insert assert statements for the intermediate facts the verifier needs.",
    "Do not use recursion or while loops. Use bounded for loops or closed-form expressions.",
    "Copy the requires and ensures clauses verbatim into the method signature. Do not weaken them.",
    "Reason step by step about why each postcondition holds before writing the code, then output "
    "only the final Dafny program in one code block.",
    "",
    "",
};

}  // namespace

std::string_view to_string(ActionName a) { return kNames[static_cast<std::size_t>(a)]; }

ActionName parse_action_name(std::string_view name) {
  for (int i = 0; i < kActionCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<ActionName>(i);
  }
  throw Error("unknown edit action '" + std::string(name) + "'");
}

ActionCatalog ActionCatalog::builtin() {
  ActionCatalog c;
  for (int i = 0; i < kActionCount; ++i) {
    c.actions_[static_cast<std::size_t>(i)] =
        EditAction{i, static_cast<ActionName>(i), std::string(kSnippets[static_cast<std::size_t>(i)])};
  }
  return c;
}

ActionCatalog ActionCatalog::load(const std::filesystem::path& path) {
  ActionCatalog c = builtin();
  toml::table tbl;
  try {
    tbl = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError("cannot parse action catalog " + path.string() + ": " + std::string(e.description()));
  }
  for (const auto& [key, node] : tbl) {
    ActionName name;
    try {
      name = parse_action_name(key.str());
    } catch (const Error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    const auto* section = node.as_table();
    if (section == nullptr) throw ConfigError(path.string() + ": [" + std::string(key.str()) + "] must be a table");
    if (auto s = (*section)["snippet"].value<std::string>()) {
      c.actions_[static_cast<std::size_t>(name)].snippet = *s;
    }
  }
  return c;
}

const EditAction& ActionCatalog::at(int id) const {
  if (id < 0 || id >= kActionCount) throw Error("action id out of range: " + std::to_string(id));
  return actions_[static_cast<std::size_t>(id)];
}

}  // namespace p2s::mdp
