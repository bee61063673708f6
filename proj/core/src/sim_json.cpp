// JSONL serialization of the event log and snapshot stream.

#include "json.hpp"
#include "leadsel/sim.hpp"

namespace leadsel {

namespace {

using nlohmann::ordered_json;

ordered_json to_json(const Position& p) { return {{"x", p.x}, {"y", p.y}}; }

ordered_json to_json(const LeaderMessage& m) {
  ordered_json j;
  j["leader"] = to_int(m.leader);
  j["seq"] = m.seq;
  j["info"] = {{"id", to_int(m.info.id)},
               {"position", to_json(m.info.position)},
               {"dist_to_intersection", m.info.dist_to_intersection}};
  if (m.neighbors) {
    auto& arr = j["neighbors"] = ordered_json::array();
    for (VehicleId id : *m.neighbors) arr.push_back(to_int(id));
  }
  j["relayer"] = to_int(m.relayer);
  j["established"] = m.established;
  return j;
}

struct DetailVisitor {
  ordered_json operator()(std::monostate) const { return ordered_json::object(); }
  ordered_json operator()(const TxDetail& d) const {
    return {{"relay", d.relay}, {"message", to_json(d.message)}};
  }
  ordered_json operator()(const RxDetail& d) const {
    return {{"leader", to_int(d.leader)}, {"seq", d.seq}, {"relayer", to_int(d.relayer)}};
  }
  ordered_json operator()(const AdoptDetail& d) const {
    return {{"leader", to_int(d.leader)}, {"previous", to_int(d.previous)}};
  }
  ordered_json operator()(const ModeDetail& d) const {
    return {{"mode", d.mode == Mode::slow ? "slow" : "fast"}};
  }
  ordered_json operator()(const SpawnDetail& d) const {
    ordered_json j = {{"position", to_json(d.position)}};
    if (!d.approach.empty()) j["approach"] = d.approach;
    return j;
  }
};

}  // namespace

std::string to_jsonl(const Event& e) {
  ordered_json j;
  j["t"] = e.t;
  j["kind"] = to_string(e.kind);
  j["subject"] = to_int(e.subject);
  j["detail"] = std::visit(DetailVisitor{}, e.detail);
  return j.dump();
}

std::string to_jsonl(const Snapshot& s) {
  ordered_json j;
  j["t"] = s.t;
  auto& arr = j["participants"] = ordered_json::array();
  for (const auto& p : s.participants) {
    arr.push_back({{"id", to_int(p.id)},
                   {"believed_leader", to_int(p.believed_leader)},
                   {"is_self_leader", p.is_self_leader}});
  }
  return j.dump();
}

}  // namespace leadsel
