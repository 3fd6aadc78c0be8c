#include "json.hpp"
#include "p2s/ppo/ppo.hpp"
#include "p2s/util/text.hpp"

namespace p2s::ppo {

using nlohmann::json;

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  json doc{
      {"format", "p2s-policy"},
      {"version", 1},
      {"D", ck.params.D},
      {"H", ck.params.H},
      {"A", ck.params.A},
      {"theta", ck.params.theta},
      {"adam", {{"m", ck.adam.m}, {"v", ck.adam.v}, {"step", ck.adam.step}}},
      {"episode", ck.episode},
      {"seed", ck.seed},
  };
  write_file(path, doc.dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Checkpoint ck;
  try {
    json doc = json::parse(read_file(path));
    if (doc.at("format") != "p2s-policy" || doc.at("version") != 1) throw Error("unsupported checkpoint format");
    ck.params.D = doc.at("D").get<int>();
    ck.params.H = doc.at("H").get<int>();
    ck.params.A = doc.at("A").get<int>();
    ck.params.theta = doc.at("theta").get<std::vector<double>>();
    ck.adam.m = doc.at("adam").at("m").get<std::vector<double>>();
    ck.adam.v = doc.at("adam").at("v").get<std::vector<double>>();
    ck.adam.step = doc.at("adam").at("step").get<std::int64_t>();
    ck.episode = doc.at("episode").get<std::int64_t>();
    ck.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error("bad checkpoint " + path.string() + ": " + e.what());
  }
  if (ck.params.theta.size() != PolicyParams::count(ck.params.D, ck.params.H, ck.params.A)) {
    throw DimensionMismatch("checkpoint parameter count does not match its dimensions");
  }
  if (!ck.adam.m.empty() && (ck.adam.m.size() != ck.params.theta.size() || ck.adam.v.size() != ck.params.theta.size())) {
    throw DimensionMismatch("checkpoint optimizer state does not match parameters");
  }
  return ck;
}

}  // namespace p2s::ppo
