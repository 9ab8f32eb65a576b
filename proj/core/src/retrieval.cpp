#include "acal/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "acal/document.hpp"
#include "acal/error.hpp"

namespace acal {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Corpus: return "Corpus";
    case Provenance::WebSearch: return "WebSearch";
    case Provenance::UserSubmitted: return "UserSubmitted";
  }
  return "Corpus";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<double> LexicalScorer::score(std::string_view query,
                                         const std::vector<EvidencePassage>& passages) const {
  const auto q = tokenize(query);
  const std::set<std::string> qset(q.begin(), q.end());
  std::vector<double> scores;
  scores.reserve(passages.size());
  for (const auto& p : passages) {
    const auto t = tokenize(p.text);
    const std::set<std::string> pset(t.begin(), t.end());
    if (qset.empty() || pset.empty()) {
      scores.push_back(0.0);
      continue;
    }
    std::size_t shared = 0;
    for (const auto& tok : qset) shared += pset.count(tok);
    scores.push_back(static_cast<double>(shared) /
                     std::sqrt(static_cast<double>(qset.size()) * static_cast<double>(pset.size())));
  }
  return scores;
}

CorpusIndex::CorpusIndex(std::vector<SourceDocument> documents,
                         std::vector<EvidencePassage> passages, ChunkParams params)
    : documents_(std::move(documents)), passages_(std::move(passages)), params_(params) {}

std::string_view CorpusIndex::source_span(const EvidencePassage& p) const {
  for (const auto& d : documents_) {
    if (d.id == p.document_id) {
      return std::string_view(d.text).substr(p.offset, p.text.size());
    }
  }
  throw Error(errc::kUnknownNode, "passage '" + p.passage_id + "' has no source document");
}

CorpusIndex index_corpus(std::vector<SourceDocument> documents, ChunkParams params) {
  if (params.window == 0 || params.overlap >= params.window) {
    throw Error(errc::kInvalidParams, "chunking needs window > overlap >= 0");
  }
  std::set<std::string> ids;
  for (const auto& d : documents) {
    if (!ids.insert(d.id).second) {
      throw Error(errc::kDuplicateDocument, "duplicate document id '" + d.id + "'");
    }
    if (d.text.empty()) {
      throw Error(errc::kEmptyText, "document '" + d.id + "' is empty");
    }
  }

  const std::size_t stride = params.window - params.overlap;
  std::vector<EvidencePassage> passages;
  for (const auto& d : documents) {
    std::size_t n = 0;
    for (std::size_t off = 0; off < d.text.size(); off += stride, ++n) {
      EvidencePassage p;
      p.passage_id = d.id + "#" + std::to_string(n);
      p.document_id = d.id;
      p.text = d.text.substr(off, params.window);
      p.offset = off;
      p.provenance = Provenance::Corpus;
      passages.push_back(std::move(p));
    }
  }
  return CorpusIndex(std::move(documents), std::move(passages), params);
}

std::vector<SourceDocument> load_corpus_dir(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.tsv");
  if (!manifest) {
    throw Error(errc::kCorpusIo, "missing manifest.tsv in " + dir.string());
  }
  std::vector<SourceDocument> docs;
  std::string line;
  while (std::getline(manifest, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(errc::kCorpusIo, "manifest line without tab: " + line);
    }
    docs.push_back({line.substr(0, tab), read_file(dir / line.substr(tab + 1))});
  }
  return docs;
}

namespace {

void rank(std::vector<EvidencePassage>& passages, std::size_t k) {
  std::stable_sort(passages.begin(), passages.end(),
                   [](const EvidencePassage& a, const EvidencePassage& b) {
                     if (a.relevance != b.relevance) return a.relevance > b.relevance;
                     return a.passage_id < b.passage_id;
                   });
  if (passages.size() > k) passages.resize(k);
}

}  // namespace

std::vector<EvidencePassage> retrieve(const CorpusIndex& index, std::string_view query,
                                      std::size_t k, const RelevanceScorer& scorer) {
  if (k == 0 || index.empty()) return {};
  std::vector<EvidencePassage> out = index.passages();
  const auto scores = scorer.score(query, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].relevance = scores[i];
  rank(out, k);
  return out;
}

std::vector<EvidencePassage> retrieve_hybrid(const CorpusIndex& index, const WebSearch& web,
                                             std::string_view query, std::size_t k,
                                             const RelevanceScorer& scorer) {
  if (k == 0) return {};
  auto out = retrieve(index, query, k, scorer);
  for (auto& p : web.search(query, k)) {
    p.provenance = Provenance::WebSearch;
    out.push_back(std::move(p));
  }
  rank(out, k);
  return out;
}

const EvidencePassage* EvidenceContext::find(std::string_view passage_id) const {
  for (const auto& p : passages) {
    if (p.passage_id == passage_id) return &p;
  }
  return nullptr;
}

std::vector<std::string> EvidenceContext::ids() const {
  std::vector<std::string> out;
  out.reserve(passages.size());
  for (const auto& p : passages) out.push_back(p.passage_id);
  return out;
}

EvidenceContext assemble_context(std::string_view /*claim*/, std::vector<EvidencePassage> passages) {
  std::set<std::string> seen;
  for (const auto& p : passages) {
    if (!seen.insert(p.passage_id).second) {
      throw Error(errc::kDuplicatePassage, "duplicate passage id '" + p.passage_id + "'");
    }
  }
  return EvidenceContext{std::move(passages)};
}

void to_json(nlohmann::json& j, const Provenance& p) { j = std::string(to_string(p)); }

void from_json(const nlohmann::json& j, Provenance& p) {
  const auto s = j.get<std::string>();
  if (s == "Corpus") p = Provenance::Corpus;
  else if (s == "WebSearch") p = Provenance::WebSearch;
  else if (s == "UserSubmitted") p = Provenance::UserSubmitted;
  else throw Error(errc::kBadDocument, "unknown provenance '" + s + "'");
}

void to_json(nlohmann::json& j, const EvidencePassage& p) {
  j = nlohmann::json{{"passage_id", p.passage_id}, {"document_id", p.document_id},
                     {"text", p.text},             {"relevance", p.relevance},
                     {"provenance", p.provenance}, {"offset", p.offset}};
}

void from_json(const nlohmann::json& j, EvidencePassage& p) {
  j.at("passage_id").get_to(p.passage_id);
  p.document_id = j.value("document_id", std::string{});
  j.at("text").get_to(p.text);
  p.relevance = j.value("relevance", 0.0);
  p.provenance = j.value("provenance", Provenance::Corpus);
  p.offset = j.value("offset", std::size_t{0});
}

void to_json(nlohmann::json& j, const EvidenceContext& c) {
  j = nlohmann::json{{"passages", c.passages}};
}

void from_json(const nlohmann::json& j, EvidenceContext& c) { j.at("passages").get_to(c.passages); }

void to_json(nlohmann::json& j, const ChunkParams& c) {
  j = nlohmann::json{{"window", c.window}, {"overlap", c.overlap}};
}

void from_json(const nlohmann::json& j, ChunkParams& c) {
  c.window = j.value("window", c.window);
  c.overlap = j.value("overlap", c.overlap);
}

}  // namespace acal
