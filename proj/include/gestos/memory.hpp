#pragma once

#include "gestos/types.hpp"

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gestos {

struct StorageFailure : Error {
  using Error::Error;
};

enum class MemoryOutcome { kSuccess, kRejected, kFailed };

std::string to_string(MemoryOutcome o);
std::optional<MemoryOutcome> memory_outcome_from_string(const std::string& s);

// One remembered interaction. Only success records are served as few-shot
// exemplars; the others are kept for audit.
struct MemoryRecord {
  std::string description_text;
  std::string robot_id;
  std::string command_id;
  double timestamp = 0.0;  // seconds
  MemoryOutcome outcome = MemoryOutcome::kSuccess;

  bool operator==(const MemoryRecord&) const = default;
};

// FNV-1a 64-bit hash; the fixed token hash behind the baseline embedder.
std::uint64_t fnv1a64(std::string_view data);

// Lowercased alphanumeric token runs, in order of appearance.
std::vector<std::string> tokenize(const std::string& text);

// Baseline hashing bag-of-words embedder: each token increments the bucket
// fnv1a64(token) % dim, then the vector is L2-normalized. Empty text gives
// the zero vector. Deterministic across processes.
Eigen::VectorXd embed_text(const std::string& text, int dim = 256);

// Cosine similarity; 0.0 when either vector has zero norm.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// One persisted line: {"text","robot","command","t","outcome","embedding"}.
std::string serialize_memory_record(const MemoryRecord& record,
                                    const Eigen::VectorXd& embedding);
std::optional<std::pair<MemoryRecord, Eigen::VectorXd>> parse_memory_line(
    const std::string& line);

// Vector-based memory of interactions with append-only JSONL persistence.
// Thread-safe: concurrent retrievals, serialized stores.
class VectorMemory {
 public:
  explicit VectorMemory(int dim = 256);

  // Loads an existing memory file (missing file = empty memory) and appends
  // to it on every store. Unparseable lines — e.g. a truncated final line
  // after a crash — are skipped. A stored embedding of the wrong dimension
  // is re-derived from the record text.
  static VectorMemory open(const std::string& path, int dim = 256);

  // Appends to the in-memory index and, when opened on a file, to the file.
  // Throws StorageFailure when the append cannot be written.
  void store(const MemoryRecord& record);

  // Up to k success records, ranked by cosine similarity to the query text
  // (descending), then most-recent timestamp, then earliest insertion.
  std::vector<MemoryRecord> retrieve(const std::string& query_text, size_t k) const;

  std::vector<MemoryRecord> records() const;  // insertion order, all outcomes
  size_t size() const;
  size_t success_count() const;
  int dim() const;
  const std::string& path() const { return path_; }

 private:
  VectorMemory(const std::string& path, int dim);  // loads; see open()

  struct Entry {
    MemoryRecord record;
    Eigen::VectorXd embedding;
  };

  mutable std::shared_mutex mu_;
  std::vector<Entry> entries_;
  std::string path_;
  int dim_ = 256;
  // True when the loaded file did not end with a newline (crash mid-write);
  // the next append first terminates that partial line.
  bool unterminated_tail_ = false;
};

}  // namespace gestos
