#pragma once

#include <json.hpp>

#include "edge/ensemble.hpp"

namespace edge {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json ensemble_report_json(const EnsembleResult& r) {
  nlohmann::json members = nlohmann::json::array();
  for (const EnsembleMember& m : r.members) {
    members.push_back({{"t", m.t},
                       {"epsilon", m.epsilon},
                       {"weight", m.weight},
                       {"estimate", m.estimate},
                       {"x_buckets", m.x_nodes},
                       {"y_buckets", m.y_nodes},
                       {"degenerate", m.degenerate}});
  }
  return nlohmann::json{{"schema_version", kReportSchemaVersion},
                        {"estimate_nats", r.estimate.value},
                        {"g", r.estimate.g_name},
                        {"n_samples", r.n_samples},
                        {"degree", r.degree},
                        {"weights", r.weights},
                        {"members", members},
                        {"warnings", r.warnings}};
}

}  // namespace edge
