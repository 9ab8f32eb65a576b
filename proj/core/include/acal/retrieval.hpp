#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace acal {

enum class Provenance { Corpus, WebSearch, UserSubmitted };

std::string_view to_string(Provenance p);

struct EvidencePassage {
  std::string passage_id;
  std::string document_id;
  std::string text;
  double relevance = 0.0;
  Provenance provenance = Provenance::Corpus;
  // Byte offset of the passage inside its source document.
  std::size_t offset = 0;

  friend bool operator==(const EvidencePassage&, const EvidencePassage&) = default;
};

struct SourceDocument {
  std::string id;
  std::string text;
};

struct ChunkParams {
  std::size_t window = 1000;
  std::size_t overlap = 200;

  friend bool operator==(const ChunkParams&, const ChunkParams&) = default;
};

/// Ranks passages for a query. Lexical overlap is the built-in scorer;
/// embedding scorers implement the same interface.
class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;
  virtual std::vector<double> score(std::string_view query,
                                    const std::vector<EvidencePassage>& passages) const = 0;
};

/// Cosine overlap between the lowercase alphanumeric token sets of query
/// and passage. An exact textual match scores 1.
class LexicalScorer final : public RelevanceScorer {
 public:
  std::vector<double> score(std::string_view query,
                            const std::vector<EvidencePassage>& passages) const override;
};

std::vector<std::string> tokenize(std::string_view text);

class CorpusIndex {
 public:
  CorpusIndex() = default;
  CorpusIndex(std::vector<SourceDocument> documents, std::vector<EvidencePassage> passages,
              ChunkParams params);

  const std::vector<EvidencePassage>& passages() const noexcept { return passages_; }
  const std::vector<SourceDocument>& documents() const noexcept { return documents_; }
  const ChunkParams& chunk_params() const noexcept { return params_; }
  bool empty() const noexcept { return passages_.empty(); }

  /// Recovers the passage text from its document and offset.
  std::string_view source_span(const EvidencePassage& p) const;

 private:
  std::vector<SourceDocument> documents_;
  std::vector<EvidencePassage> passages_;
  ChunkParams params_;
};

/// Fixed-window chunking: windows start at every multiple of
/// (window - overlap) below the document length.
CorpusIndex index_corpus(std::vector<SourceDocument> documents, ChunkParams params = {});

/// Reads `manifest.tsv` (id<TAB>relative path, one per line) from `dir`.
std::vector<SourceDocument> load_corpus_dir(const std::filesystem::path& dir);

/// At most k passages, descending relevance, ties by passage id.
std::vector<EvidencePassage> retrieve(const CorpusIndex& index, std::string_view query,
                                      std::size_t k, const RelevanceScorer& scorer = LexicalScorer{});

class WebSearch {
 public:
  virtual ~WebSearch() = default;
  virtual std::vector<EvidencePassage> search(std::string_view query, std::size_t k) const = 0;
};

/// Default web search: returns nothing.
class NullWebSearch final : public WebSearch {
 public:
  std::vector<EvidencePassage> search(std::string_view, std::size_t) const override { return {}; }
};

/// Corpus hits followed by web hits, re-sorted by relevance and cut to k.
std::vector<EvidencePassage> retrieve_hybrid(const CorpusIndex& index, const WebSearch& web,
                                             std::string_view query, std::size_t k,
                                             const RelevanceScorer& scorer = LexicalScorer{});

struct EvidenceContext {
  std::vector<EvidencePassage> passages;

  const EvidencePassage* find(std::string_view passage_id) const;
  std::vector<std::string> ids() const;

  friend bool operator==(const EvidenceContext&, const EvidenceContext&) = default;
};

/// Keeps the given order. Duplicate passage ids are rejected.
EvidenceContext assemble_context(std::string_view claim, std::vector<EvidencePassage> passages);

void to_json(nlohmann::json& j, const Provenance& p);
void from_json(const nlohmann::json& j, Provenance& p);
void to_json(nlohmann::json& j, const EvidencePassage& p);
void from_json(const nlohmann::json& j, EvidencePassage& p);
void to_json(nlohmann::json& j, const EvidenceContext& c);
void from_json(const nlohmann::json& j, EvidenceContext& c);
void to_json(nlohmann::json& j, const ChunkParams& c);
void from_json(const nlohmann::json& j, ChunkParams& c);

}  // namespace acal
