#include "acal/arena.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "acal/error.hpp"
#include "acal/parallel.hpp"
#include "prompt_text.hpp"

namespace acal {

std::string_view to_string(ClashWinner w) {
  switch (w) {
    case ClashWinner::Supporter: return "Supporter";
    case ClashWinner::Attacker: return "Attacker";
    case ClashWinner::Tie: return "Tie";
  }
  return "Tie";
}

std::vector<Clash> detect_clashes(const std::vector<Argument>& arguments, double delta) {
  std::vector<Clash> out;
  for (const auto& s : arguments) {
    if (s.stance != Stance::Support) continue;
    for (const auto& a : arguments) {
      if (a.stance != Stance::Attack) continue;
      if (!s.base_strength || !a.base_strength) {
        throw Error(errc::kMissingStrength, "clash detection needs scored arguments");
      }
      const double gap = std::abs(*s.base_strength - *a.base_strength);
      if (gap < delta) out.push_back({s.id, a.id, gap});
    }
  }
  std::sort(out.begin(), out.end(), [](const Clash& x, const Clash& y) {
    return std::tie(x.supporter, x.attacker) < std::tie(y.supporter, y.attacker);
  });
  return out;
}

namespace {

const Argument& lookup(const std::vector<Argument>& args, const NodeId& id) {
  for (const auto& a : args) {
    if (a.id == id) return a;
  }
  throw Error(errc::kUnknownNode, "unknown argument '" + id.str() + "'");
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

ClashOutcome adjudicate(const Clash& clash, const std::vector<Argument>& arguments,
                        const LegalTask& task, TextModelBackend& backend) {
  const Argument& s = lookup(arguments, clash.supporter);
  const Argument& a = lookup(arguments, clash.attacker);

  std::ostringstream os;
  os << kPromptVersion << " adjudicate\n"
     << "Act as a legal reasoning expert. Two arguments about the claim conflict. Decide which "
        "argument is stronger given the case-specific facts and the governing legal standards.\n";
  append_task(os, task);
  os << "SUPPORTER [" << s.id.str() << "] by " << s.author_role << ":\n" << s.text << "\n"
     << "ATTACKER [" << a.id.str() << "] by " << a.author_role << ":\n" << a.text << "\n"
     << "Reply with {\"winner\": \"supporter\"|\"attacker\", \"rationale\": string}.\n";

  ClashOutcome out;
  out.clash = clash;
  try {
    const auto response = backend.complete(make_request(Purpose::Adjudicate, os.str()));
    const auto winner = lower(response.fields.at("winner").get<std::string>());
    if (auto r = response.fields.find("rationale"); r != response.fields.end() && r->is_string()) {
      out.rationale = r->get<std::string>();
    }
    if (winner == "supporter" || winner == lower(s.id.str())) {
      out.winner = ClashWinner::Supporter;
    } else if (winner == "attacker" || winner == lower(a.id.str())) {
      out.winner = ClashWinner::Attacker;
    } else if (winner == "tie") {
      out.winner = ClashWinner::Tie;
    } else {
      out.warnings.push_back("clash " + s.id.str() + " vs " + a.id.str() +
                             ": unrecognized winner '" + winner + "', scored as tie");
    }
  } catch (const Error& e) {
    out.winner = ClashWinner::Tie;
    out.warnings.push_back("clash " + s.id.str() + " vs " + a.id.str() +
                           ": adjudication failed, scored as tie: " + e.what());
  }
  return out;
}

double win_rate(const NodeId& argument, const std::vector<ClashOutcome>& outcomes) {
  double credit = 0.0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    const bool is_s = o.clash.supporter == argument;
    const bool is_a = o.clash.attacker == argument;
    if (!is_s && !is_a) continue;
    ++n;
    if (o.winner == ClashWinner::Tie) {
      credit += 0.5;
    } else if ((o.winner == ClashWinner::Supporter) == is_s) {
      credit += 1.0;
    }
  }
  if (n == 0) {
    throw Error(errc::kNoParticipation, "argument '" + argument.str() + "' took part in no clash");
  }
  return credit / static_cast<double>(n);
}

double adjust_strength(double tau, double w, double beta) {
  const double delta = beta * (2.0 * w - 1.0);
  if (delta == 0.0) return std::clamp(tau, kRubricFloor, kRubricCeiling);
  // Snap to a 1e-12 grid so decimal inputs give decimal outputs (0.7 - 0.15
  // is 0.55, not 0.5499999999999999).
  const double moved = std::round((tau + delta) * 1e12) / 1e12;
  return std::clamp(moved, kRubricFloor, kRubricCeiling);
}

ArenaResult apply_clash_resolution(const std::vector<Argument>& arguments, const LegalTask& task,
                                   const ArenaParams& params, TextModelBackend& backend) {
  if (!(params.delta > 0.0) || !(params.beta >= 0.0)) {
    throw Error(errc::kInvalidParams, "arena needs delta > 0 and beta >= 0");
  }
  ArenaResult result;
  result.arguments = arguments;
  const auto clashes = detect_clashes(arguments, params.delta);
  if (clashes.empty()) return result;

  result.outcomes = parallel_map(
      clashes, [&](const Clash& c) { return adjudicate(c, arguments, task, backend); },
      params.max_concurrency);
  for (const auto& o : result.outcomes) {
    for (const auto& w : o.warnings) result.warnings.push_back(w);
  }

  for (auto& arg : result.arguments) {
    StrengthAdjustment adj;
    adj.argument = arg.id;
    for (const auto& o : result.outcomes) {
      const bool is_s = o.clash.supporter == arg.id;
      if (!is_s && o.clash.attacker != arg.id) continue;
      ++adj.clashes;
      if (o.winner == ClashWinner::Tie) {
        ++adj.ties;
      } else if ((o.winner == ClashWinner::Supporter) == is_s) {
        ++adj.wins;
      }
    }
    if (adj.clashes == 0) continue;
    adj.win_rate = win_rate(arg.id, result.outcomes);
    adj.before = *arg.base_strength;
    adj.after = adjust_strength(adj.before, adj.win_rate, params.beta);
    arg.base_strength = adj.after;
    result.adjustments.push_back(adj);
  }
  return result;
}

void to_json(nlohmann::json& j, const ArenaParams& p) {
  j = nlohmann::json{{"delta", p.delta}, {"beta", p.beta}};
}

void from_json(const nlohmann::json& j, ArenaParams& p) {
  p.delta = j.value("delta", p.delta);
  p.beta = j.value("beta", p.beta);
}

void to_json(nlohmann::json& j, const Clash& c) {
  j = nlohmann::json{{"supporter", c.supporter}, {"attacker", c.attacker}, {"score_gap", c.score_gap}};
}

void from_json(const nlohmann::json& j, Clash& c) {
  j.at("supporter").get_to(c.supporter);
  j.at("attacker").get_to(c.attacker);
  j.at("score_gap").get_to(c.score_gap);
}

void to_json(nlohmann::json& j, const ClashWinner& w) { j = std::string(to_string(w)); }

void from_json(const nlohmann::json& j, ClashWinner& w) {
  const auto s = j.get<std::string>();
  if (s == "Supporter") w = ClashWinner::Supporter;
  else if (s == "Attacker") w = ClashWinner::Attacker;
  else if (s == "Tie") w = ClashWinner::Tie;
  else throw Error(errc::kBadDocument, "unknown clash winner '" + s + "'");
}

void to_json(nlohmann::json& j, const ClashOutcome& o) {
  j = nlohmann::json{{"clash", o.clash}, {"winner", o.winner}, {"rationale", o.rationale},
                     {"warnings", o.warnings}};
}

void from_json(const nlohmann::json& j, ClashOutcome& o) {
  j.at("clash").get_to(o.clash);
  j.at("winner").get_to(o.winner);
  o.rationale = j.value("rationale", std::string{});
  o.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const StrengthAdjustment& a) {
  j = nlohmann::json{{"argument", a.argument}, {"clashes", a.clashes}, {"wins", a.wins},
                     {"ties", a.ties},         {"win_rate", a.win_rate}, {"before", a.before},
                     {"after", a.after}};
}

void from_json(const nlohmann::json& j, StrengthAdjustment& a) {
  j.at("argument").get_to(a.argument);
  j.at("clashes").get_to(a.clashes);
  j.at("wins").get_to(a.wins);
  j.at("ties").get_to(a.ties);
  j.at("win_rate").get_to(a.win_rate);
  j.at("before").get_to(a.before);
  j.at("after").get_to(a.after);
}

void to_json(nlohmann::json& j, const ArenaResult& r) {
  j = nlohmann::json{{"outcomes", r.outcomes}, {"adjustments", r.adjustments},
                     {"warnings", r.warnings}};
}

}  // namespace acal
