#include "acal/relations.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "acal/error.hpp"
#include "acal/parallel.hpp"

namespace acal {

std::string_view to_string(RelationLabel l) {
  switch (l) {
    case RelationLabel::Attack: return "Attack";
    case RelationLabel::Support: return "Support";
    case RelationLabel::Neutral: return "Neutral";
  }
  return "Neutral";
}

std::string_view to_string(RelationMode m) {
  return m == RelationMode::Heuristic ? "heuristic" : "model";
}

RelationMode parse_relation_mode(std::string_view s) {
  if (s == "heuristic") return RelationMode::Heuristic;
  if (s == "model") return RelationMode::Model;
  throw Error(errc::kConfig, "relation mode must be 'heuristic' or 'model', got '" +
                                 std::string(s) + "'");
}

std::size_t BatchPlan::pair_count() const {
  std::size_t n = 0;
  for (const auto& b : batches) n += b.size();
  return n;
}

std::size_t RelationReport::demotions() const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.demoted; }));
}

std::vector<Edge> heuristic_relations(const std::vector<Argument>& arguments) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < arguments.size(); ++i) {
    for (std::size_t j = i + 1; j < arguments.size(); ++j) {
      const auto& a = arguments[i];
      const auto& b = arguments[j];
      const auto kind = a.stance == b.stance ? RelationKind::Support : RelationKind::Attack;
      edges.push_back({a.id, b.id, kind, 1.0, EdgeOrigin::Heuristic});
      edges.push_back({b.id, a.id, kind, 1.0, EdgeOrigin::Heuristic});
    }
  }
  return edges;
}

RelationReport heuristic_report(const std::vector<Argument>& arguments) {
  RelationReport r;
  r.mode = RelationMode::Heuristic;
  r.edges = heuristic_relations(arguments);
  for (std::size_t i = 0; i < arguments.size(); ++i) {
    for (std::size_t j = i + 1; j < arguments.size(); ++j) {
      const bool same = arguments[i].stance == arguments[j].stance;
      r.verdicts.push_back({arguments[i].id, arguments[j].id,
                            same ? RelationLabel::Support : RelationLabel::Attack, 1.0, false,
                            false});
    }
  }
  return r;
}

BatchPlan plan_batches(std::size_t n_arguments, std::size_t batch_size) {
  if (batch_size < 1) throw Error(errc::kInvalidParams, "batch size must be at least 1");
  BatchPlan plan;
  plan.batch_size = batch_size;
  std::vector<ArgumentPair> current;
  for (std::size_t i = 0; i < n_arguments; ++i) {
    for (std::size_t j = i + 1; j < n_arguments; ++j) {
      current.emplace_back(i, j);
      if (current.size() == batch_size) {
        plan.batches.push_back(std::move(current));
        current.clear();
      }
    }
  }
  if (!current.empty()) plan.batches.push_back(std::move(current));
  return plan;
}

namespace {

std::optional<RelationLabel> parse_label(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "attack") return RelationLabel::Attack;
  if (s == "support") return RelationLabel::Support;
  if (s == "neutral") return RelationLabel::Neutral;
  return std::nullopt;
}

struct RawVerdict {
  RelationLabel label;
  double confidence;
};

using PairKey = std::pair<std::string, std::string>;

struct BatchOutcome {
  std::map<PairKey, RawVerdict> verdicts;
  bool failed = false;
  std::size_t retries = 0;
  std::vector<std::string> warnings;
};

BackendRequest batch_request(const std::vector<Argument>& args, const std::vector<ArgumentPair>& batch) {
  std::ostringstream os;
  os << kPromptVersion << " relate\n"
     << "For each pair of legal arguments below, decide whether the first and second argument "
        "attack each other, support each other, or are neutral (they address independent legal "
        "aspects). Give a confidence between 0 and 1.\n";
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& a = args[batch[k].first];
    const auto& b = args[batch[k].second];
    os << "PAIR " << (k + 1) << "\n"
       << "  first [" << a.id.str() << "] (" << to_string(a.stance) << "): " << a.text << "\n"
       << "  second [" << b.id.str() << "] (" << to_string(b.stance) << "): " << b.text << "\n";
  }
  os << "Reply with {\"verdicts\": [{\"first\": id, \"second\": id, \"label\": "
        "\"attack\"|\"support\"|\"neutral\", \"confidence\": number}]}.\n";
  return make_request(Purpose::Relate, os.str());
}

// Parses a whole batch reply; any malformed verdict rejects the reply.
std::optional<std::map<PairKey, RawVerdict>> parse_batch(const BackendResponse& response,
                                                         std::string& why) {
  std::map<PairKey, RawVerdict> out;
  for (const auto& v : response.fields.at("verdicts")) {
    if (!v.is_object() || !v.contains("first") || !v.contains("second") || !v.contains("label") ||
        !v.contains("confidence") || !v["first"].is_string() || !v["second"].is_string() ||
        !v["label"].is_string() || !v["confidence"].is_number()) {
      why = "malformed verdict " + v.dump();
      return std::nullopt;
    }
    auto label = parse_label(v["label"].get<std::string>());
    const double conf = v["confidence"].get<double>();
    if (!label || !(conf >= 0.0 && conf <= 1.0)) {
      why = "invalid label or confidence in " + v.dump();
      return std::nullopt;
    }
    out[{v["first"].get<std::string>(), v["second"].get<std::string>()}] = {*label, conf};
  }
  return out;
}

BatchOutcome run_batch(const std::vector<Argument>& args, const std::vector<ArgumentPair>& batch,
                       TextModelBackend& backend) {
  BatchOutcome out;
  const auto request = batch_request(args, batch);
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string why;
    try {
      auto parsed = parse_batch(backend.complete(request), why);
      if (parsed) {
        out.verdicts = std::move(*parsed);
        return out;
      }
    } catch (const BackendUnavailable&) {
      throw;
    } catch (const Error& e) {
      why = e.what();
    }
    out.warnings.push_back("relation batch unparseable (attempt " + std::to_string(attempt + 1) +
                           "): " + why);
    if (attempt == 0) ++out.retries;
  }
  out.failed = true;
  out.warnings.push_back("relation batch of " + std::to_string(batch.size()) +
                         " pairs defaulted to neutral");
  return out;
}

}  // namespace

RelationReport model_relations(const std::vector<Argument>& arguments, TextModelBackend& backend,
                               const RelationParams& params) {
  // Below the floor, surviving model edges would break the graph invariant.
  if (!(params.confidence_threshold >= kModelConfidenceFloor && params.confidence_threshold <= 1.0)) {
    throw Error(errc::kInvalidParams, "confidence threshold must lie in [0.6, 1]");
  }
  const BatchPlan plan = plan_batches(arguments.size(), params.batch_size);

  RelationReport report;
  report.mode = RelationMode::Model;
  report.batches = plan.batches.size();

  auto outcomes = parallel_map(
      plan.batches,
      [&](const std::vector<ArgumentPair>& batch) { return run_batch(arguments, batch, backend); },
      params.max_concurrency);

  for (std::size_t b = 0; b < plan.batches.size(); ++b) {
    auto& outcome = outcomes[b];
    report.retries += outcome.retries;
    for (auto& w : outcome.warnings) report.warnings.push_back(std::move(w));

    for (const auto& [i, j] : plan.batches[b]) {
      const auto& a = arguments[i];
      const auto& c = arguments[j];
      RelationVerdict v{a.id, c.id, RelationLabel::Neutral, 0.0, false, outcome.failed};
      if (!outcome.failed) {
        auto it = outcome.verdicts.find({a.id.str(), c.id.str()});
        if (it == outcome.verdicts.end()) {
          // Accept the reversed orientation as the same unordered pair.
          it = outcome.verdicts.find({c.id.str(), a.id.str()});
        }
        if (it == outcome.verdicts.end()) {
          v.defaulted = true;
          report.warnings.push_back("no verdict for pair (" + a.id.str() + ", " + c.id.str() +
                                    "); treated as neutral");
        } else {
          v.label = it->second.label;
          v.confidence = it->second.confidence;
        }
      }
      if (v.label != RelationLabel::Neutral && v.confidence < params.confidence_threshold) {
        v.label = RelationLabel::Neutral;
        v.demoted = true;
      }
      if (v.label != RelationLabel::Neutral) {
        const auto kind =
            v.label == RelationLabel::Support ? RelationKind::Support : RelationKind::Attack;
        report.edges.push_back({a.id, c.id, kind, v.confidence, EdgeOrigin::Model});
        report.edges.push_back({c.id, a.id, kind, v.confidence, EdgeOrigin::Model});
      }
      report.verdicts.push_back(std::move(v));
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const RelationVerdict& v) {
  j = nlohmann::json{{"first", v.first},
                     {"second", v.second},
                     {"label", std::string(to_string(v.label))},
                     {"confidence", v.confidence},
                     {"demoted", v.demoted},
                     {"defaulted", v.defaulted}};
}

void to_json(nlohmann::json& j, const RelationReport& r) {
  j = nlohmann::json{{"mode", r.mode},         {"edges", r.edges},
                     {"verdicts", r.verdicts}, {"batches", r.batches},
                     {"retries", r.retries},   {"demotions", r.demotions()},
                     {"warnings", r.warnings}};
}

void to_json(nlohmann::json& j, const RelationMode& m) { j = std::string(to_string(m)); }
void from_json(const nlohmann::json& j, RelationMode& m) {
  m = parse_relation_mode(j.get<std::string>());
}

}  // namespace acal
