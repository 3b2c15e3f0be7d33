#include "gestos/memory.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>

namespace gestos {
namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

}  // namespace

std::string to_string(MemoryOutcome o) {
  switch (o) {
    case MemoryOutcome::kSuccess:
      return "success";
    case MemoryOutcome::kRejected:
      return "rejected";
    case MemoryOutcome::kFailed:
      return "failed";
  }
  return "failed";
}

std::optional<MemoryOutcome> memory_outcome_from_string(const std::string& s) {
  if (s == "success") return MemoryOutcome::kSuccess;
  if (s == "rejected") return MemoryOutcome::kRejected;
  if (s == "failed") return MemoryOutcome::kFailed;
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = kFnvOffset;
  for (const char c : data) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) != 0) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Eigen::VectorXd embed_text(const std::string& text, int dim) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const std::string& token : tokenize(text)) {
    v[static_cast<Eigen::Index>(fnv1a64(token) % static_cast<std::uint64_t>(dim))] += 1.0;
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::string serialize_memory_record(const MemoryRecord& record,
                                    const Eigen::VectorXd& embedding) {
  nlohmann::ordered_json doc;
  doc["text"] = record.description_text;
  doc["robot"] = record.robot_id;
  doc["command"] = record.command_id;
  doc["t"] = record.timestamp;
  doc["outcome"] = to_string(record.outcome);
  nlohmann::ordered_json emb = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < embedding.size(); ++i) emb.push_back(embedding[i]);
  doc["embedding"] = std::move(emb);
  return doc.dump();
}

std::optional<std::pair<MemoryRecord, Eigen::VectorXd>> parse_memory_line(
    const std::string& line) {
  const json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  if (!doc.contains("text") || !doc["text"].is_string() || !doc.contains("robot") ||
      !doc["robot"].is_string() || !doc.contains("command") ||
      !doc["command"].is_string() || !doc.contains("t") || !doc["t"].is_number() ||
      !doc.contains("outcome") || !doc["outcome"].is_string()) {
    return std::nullopt;
  }
  MemoryRecord record;
  record.description_text = doc["text"].get<std::string>();
  record.robot_id = doc["robot"].get<std::string>();
  record.command_id = doc["command"].get<std::string>();
  record.timestamp = doc["t"].get<double>();
  const auto outcome = memory_outcome_from_string(doc["outcome"].get<std::string>());
  if (!outcome.has_value()) return std::nullopt;
  record.outcome = *outcome;

  Eigen::VectorXd embedding;
  if (doc.contains("embedding") && doc["embedding"].is_array()) {
    const json& emb = doc["embedding"];
    embedding.resize(static_cast<Eigen::Index>(emb.size()));
    for (size_t i = 0; i < emb.size(); ++i) {
      if (!emb[i].is_number()) return std::nullopt;
      embedding[static_cast<Eigen::Index>(i)] = emb[i].get<double>();
    }
  }
  return std::make_pair(std::move(record), std::move(embedding));
}

VectorMemory::VectorMemory(int dim) : dim_(dim) {}

VectorMemory::VectorMemory(const std::string& path, int dim)
    : path_(path), dim_(dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;  // a missing file is an empty memory
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parsed = parse_memory_line(line);
    if (!parsed.has_value()) continue;  // truncated or foreign line
    Entry entry{std::move(parsed->first), std::move(parsed->second)};
    if (entry.embedding.size() != dim) {
      entry.embedding = embed_text(entry.record.description_text, dim);
    }
    entries_.push_back(std::move(entry));
  }
  // getline() hides whether the final line was newline-terminated; check the
  // last byte so a later append does not glue onto a crash-truncated line.
  in.clear();
  in.seekg(0, std::ios::end);
  if (in.tellg() > std::streamoff{0}) {
    in.seekg(-1, std::ios::end);
    char last = '\n';
    if (in.get(last)) unterminated_tail_ = last != '\n';
  }
}

VectorMemory VectorMemory::open(const std::string& path, int dim) {
  return VectorMemory(path, dim);
}

void VectorMemory::store(const MemoryRecord& record) {
  Entry entry{record, embed_text(record.description_text, dim_)};
  std::unique_lock lock(mu_);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    if (out && unterminated_tail_) out << '\n';  // heal a crash-truncated tail
    if (!out || !(out << serialize_memory_record(entry.record, entry.embedding) << '\n')) {
      throw StorageFailure("cannot append to memory file: " + path_);
    }
    out.flush();
    if (!out) throw StorageFailure("cannot flush memory file: " + path_);
    unterminated_tail_ = false;
  }
  entries_.push_back(std::move(entry));
}

std::vector<MemoryRecord> VectorMemory::retrieve(const std::string& query_text,
                                                 size_t k) const {
  const Eigen::VectorXd query = embed_text(query_text, dim_);
  std::shared_lock lock(mu_);

  struct Scored {
    double similarity;
    double timestamp;
    size_t seq;
  };
  std::vector<Scored> scored;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].record.outcome != MemoryOutcome::kSuccess) continue;
    scored.push_back(Scored{cosine_similarity(query, entries_[i].embedding),
                            entries_[i].record.timestamp, i});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
    return a.seq < b.seq;
  });
  if (scored.size() > k) scored.resize(k);

  std::vector<MemoryRecord> out;
  out.reserve(scored.size());
  for (const Scored& s : scored) out.push_back(entries_[s.seq].record);
  return out;
}

std::vector<MemoryRecord> VectorMemory::records() const {
  std::shared_lock lock(mu_);
  std::vector<MemoryRecord> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.record);
  return out;
}

size_t VectorMemory::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

size_t VectorMemory::success_count() const {
  std::shared_lock lock(mu_);
  return static_cast<size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) {
        return e.record.outcome == MemoryOutcome::kSuccess;
      }));
}

int VectorMemory::dim() const { return dim_; }

}  // namespace gestos
