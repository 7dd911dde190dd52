#pragma once

#include <string>

#include "json.hpp"
#include "reglab/graph/szemeredi.hpp"
#include "reglab/regularize/driver.hpp"

namespace reglab {

using Json = nlohmann::ordered_json;

inline Json witness_json(const Witness& w) {
  Json j;
  j["A1"] = w.events.at(0);
  j["A2"] = w.events.at(1);
  j["correlation"] = w.correlation;
  return j;
}

inline Json history_json(const RegularizationResult& res) {
  Json h = Json::array();
  for (const auto& e : res.history)
    h.push_back({{"event", to_string(e.kind)},
                 {"energy", e.energy},
                 {"M", e.M},
                 {"correlation", e.correlation}});
  return h;
}

// Report document: epsilon, J, M, certificate, cells, exceptional,
// densities, pairs, irregular_fraction, history, then the auxiliary
// proxy_failures and exceptional_bound entries.
inline Json report_json(const GraphRegularization& run) {
  const auto& P = run.partition;
  const auto& rep = run.report;
  Json j;
  j["epsilon"] = rep.epsilon;
  j["J"] = P.J;
  j["M"] = run.result.M;
  j["certificate"] = to_string(rep.certificate);
  j["cells"] = Json::array({P.cells[0], P.cells[1]});
  j["exceptional"] = Json::array({P.exceptional[0], P.exceptional[1]});
  j["densities"] = P.densities;
  Json pairs = Json::array();
  for (const auto& rec : rep.pairs) {
    Json p;
    p["j1"] = rec.j1 + 1;
    p["j2"] = rec.j2 + 1;
    p["status"] = to_string(rec.verdict.status);
    if (rec.verdict.witness) p["witness"] = witness_json(*rec.verdict.witness);
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  j["irregular_fraction"] = rep.irregular_fraction;
  j["history"] = history_json(run.result);
  j["proxy_failures"] = rep.proxy_failures;
  j["exceptional_bound"] = {{"constant", rep.exceptional_constant},
                            {"satisfied", rep.exceptional_within_bound}};
  return j;
}

}  // namespace reglab
