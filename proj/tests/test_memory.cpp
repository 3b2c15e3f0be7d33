#include "gestos/memory.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace gestos;
using gestos::testing::TempFile;

namespace {

MemoryRecord record(const std::string& text, double t,
                    MemoryOutcome outcome = MemoryOutcome::kSuccess,
                    const std::string& robot = "ur3",
                    const std::string& command = "manipulator_close_gripper") {
  return MemoryRecord{text, robot, command, t, outcome};
}

// Brute-force reference ranking straight from the contract: success records
// only, cosine descending, then newest timestamp, then earliest insertion.
std::vector<MemoryRecord> brute_force(const std::vector<MemoryRecord>& all,
                                      const std::string& query, size_t k,
                                      int dim) {
  struct Scored {
    MemoryRecord rec;
    double cos;
    size_t index;
  };
  const Eigen::VectorXd q = embed_text(query, dim);
  std::vector<Scored> scored;
  for (size_t i = 0; i < all.size(); ++i) {
    if (all[i].outcome != MemoryOutcome::kSuccess) continue;
    scored.push_back(
        {all[i], cosine_similarity(q, embed_text(all[i].description_text, dim)),
         i});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.cos != b.cos) return a.cos > b.cos;
    if (a.rec.timestamp != b.rec.timestamp) return a.rec.timestamp > b.rec.timestamp;
    return a.index < b.index;
  });
  std::vector<MemoryRecord> top;
  for (size_t i = 0; i < scored.size() && i < k; ++i) top.push_back(scored[i].rec);
  return top;
}

}  // namespace

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);    // offset basis
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("tokenize lowercases alphanumeric runs in order") {
  CHECK(tokenize("Hand: Right, pose[0]!") ==
        std::vector<std::string>{"hand", "right", "pose", "0"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("...") == std::vector<std::string>{});
}

TEST_CASE("embed_text is deterministic, normalized, and zero for empty text") {
  const Eigen::VectorXd a = embed_text("fingers index pointing left", 256);
  const Eigen::VectorXd b = embed_text("fingers index pointing left", 256);
  CHECK(a == b);
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(a.size() == 256);

  const Eigen::VectorXd zero = embed_text("", 256);
  CHECK(zero.norm() == doctest::Approx(0.0));
  CHECK(cosine_similarity(zero, a) == doctest::Approx(0.0));

  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
}

TEST_CASE("disjoint token sets with disjoint buckets have cosine zero") {
  const std::string left = "alpha beta gamma";
  const std::string right = "delta epsilon zeta";
  const int dim = 256;

  // Oracle precondition: the two token sets collide with no shared bucket.
  std::set<std::uint64_t> left_buckets, right_buckets;
  for (const auto& tok : tokenize(left)) left_buckets.insert(fnv1a64(tok) % dim);
  for (const auto& tok : tokenize(right)) right_buckets.insert(fnv1a64(tok) % dim);
  std::vector<std::uint64_t> shared;
  std::set_intersection(left_buckets.begin(), left_buckets.end(),
                        right_buckets.begin(), right_buckets.end(),
                        std::back_inserter(shared));
  REQUIRE(shared.empty());

  CHECK(cosine_similarity(embed_text(left, dim), embed_text(right, dim)) ==
        doctest::Approx(0.0));
}

TEST_CASE("memory record lines round-trip byte-for-byte") {
  const MemoryRecord r = record("hand: right\npose[0]: fingers=none", 12.5,
                                MemoryOutcome::kRejected);
  const std::string line = serialize_memory_record(r, embed_text(r.description_text, 16));
  const auto back = parse_memory_line(line);
  REQUIRE(back.has_value());
  CHECK(back->first == r);
  CHECK(serialize_memory_record(back->first, back->second) == line);

  CHECK_FALSE(parse_memory_line("").has_value());
  CHECK_FALSE(parse_memory_line("{\"text\": 3}").has_value());
  CHECK_FALSE(parse_memory_line("{\"text\":\"x\"").has_value());  // truncated
}

TEST_CASE("retrieve returns the self-match first with cosine one") {
  VectorMemory memory(256);
  memory.store(record("open palm facing camera", 1.0));
  memory.store(record("index finger pointing left", 2.0));
  memory.store(record("fist held still", 3.0));

  const auto got = memory.retrieve("index finger pointing left", 2);
  REQUIRE(!got.empty());
  CHECK(got[0].description_text == "index finger pointing left");
}

TEST_CASE("only success records are retrieved; all records are kept") {
  VectorMemory memory(256);
  memory.store(record("alpha", 1.0, MemoryOutcome::kSuccess));
  memory.store(record("alpha", 2.0, MemoryOutcome::kRejected));
  memory.store(record("alpha", 3.0, MemoryOutcome::kFailed));

  CHECK(memory.size() == 3);
  CHECK(memory.success_count() == 1);
  const auto got = memory.retrieve("alpha", 10);
  REQUIRE(got.size() == 1);
  CHECK(got[0].outcome == MemoryOutcome::kSuccess);
  CHECK(got[0].timestamp == doctest::Approx(1.0));
}

TEST_CASE("empty memory and k zero return nothing") {
  VectorMemory memory(256);
  CHECK(memory.retrieve("anything", 3).empty());
  memory.store(record("alpha", 1.0));
  CHECK(memory.retrieve("alpha", 0).empty());
}

TEST_CASE("ties break to newest timestamp, then insertion order") {
  VectorMemory memory(256);
  // Identical text: identical cosine for any query.
  memory.store(record("same words here", 1.0, MemoryOutcome::kSuccess, "ur3", "a"));
  memory.store(record("same words here", 9.0, MemoryOutcome::kSuccess, "ur3", "b"));
  memory.store(record("same words here", 9.0, MemoryOutcome::kSuccess, "ur3", "c"));
  memory.store(record("same words here", 4.0, MemoryOutcome::kSuccess, "ur3", "d"));

  const auto got = memory.retrieve("same words here", 4);
  REQUIRE(got.size() == 4);
  CHECK(got[0].command_id == "b");  // t=9, inserted before c
  CHECK(got[1].command_id == "c");  // t=9
  CHECK(got[2].command_id == "d");  // t=4
  CHECK(got[3].command_id == "a");  // t=1
}

TEST_CASE("retrieve matches the brute-force oracle on random corpora") {
  std::mt19937_64 rng(47);
  const std::vector<std::string> vocab = {
      "hand",  "right", "left",  "pose",   "fingers", "index",
      "thumb", "move",  "large", "small",  "toward",  "away",
      "up",    "down",  "open",  "closed", "group",   "still"};
  std::uniform_int_distribution<int> words(1, 6);
  std::uniform_int_distribution<int> outcome(0, 2);
  std::uniform_real_distribution<double> stamp(0.0, 100.0);

  for (int corpus = 0; corpus < 10; ++corpus) {
    VectorMemory memory(64);
    std::vector<MemoryRecord> all;
    for (int i = 0; i < 100; ++i) {
      std::string text;
      const int n = words(rng);
      for (int w = 0; w < n; ++w) {
        if (w > 0) text += ' ';
        text += vocab[rng() % vocab.size()];
      }
      const auto out = static_cast<MemoryOutcome>(outcome(rng));
      const MemoryRecord r = record(text, stamp(rng), out);
      memory.store(r);
      all.push_back(r);
    }
    std::string query;
    for (int w = 0; w < 3; ++w) {
      if (w > 0) query += ' ';
      query += vocab[rng() % vocab.size()];
    }
    for (size_t k : {1, 3, 10}) {
      const auto got = memory.retrieve(query, k);
      const auto want = brute_force(all, query, k, 64);
      REQUIRE(got.size() == want.size());
      for (size_t i = 0; i < got.size(); ++i) {
        CAPTURE(corpus);
        CAPTURE(query);
        CAPTURE(i);
        CHECK(got[i] == want[i]);
      }
    }
    // Prefix property: retrieve(q, k) is a prefix of retrieve(q, k+1).
    const auto three = memory.retrieve(query, 3);
    const auto four = memory.retrieve(query, 4);
    REQUIRE(four.size() >= three.size());
    for (size_t i = 0; i < three.size(); ++i) CHECK(three[i] == four[i]);
  }
}

TEST_CASE("memory persists across reopen and appends") {
  TempFile file("memory");
  {
    VectorMemory memory = VectorMemory::open(file.path(), 64);
    CHECK(memory.size() == 0);  // missing file = empty memory
    memory.store(record("alpha beta", 1.0));
    memory.store(record("gamma delta", 2.0));
  }
  {
    VectorMemory memory = VectorMemory::open(file.path(), 64);
    CHECK(memory.size() == 2);
    memory.store(record("epsilon", 3.0));
  }
  {
    VectorMemory memory = VectorMemory::open(file.path(), 64);
    CHECK(memory.size() == 3);
    const auto got = memory.retrieve("alpha beta", 1);
    REQUIRE(got.size() == 1);
    CHECK(got[0].description_text == "alpha beta");
  }
}

TEST_CASE("a truncated final line is skipped on load") {
  TempFile file("memory-trunc");
  {
    VectorMemory memory = VectorMemory::open(file.path(), 64);
    memory.store(record("alpha", 1.0));
    memory.store(record("beta", 2.0));
  }
  {
    // Chop the file mid-way through the last line (simulates a crash).
    std::ifstream in(file.path());
    std::string contents((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(file.path(), std::ios::trunc);
    out << contents.substr(0, contents.size() - 20);
  }
  VectorMemory memory = VectorMemory::open(file.path(), 64);
  CHECK(memory.size() == 1);
  // Appending after recovery still works.
  memory.store(record("gamma", 3.0));
  CHECK(VectorMemory::open(file.path(), 64).size() == 2);
}

TEST_CASE("a stored embedding of the wrong dimension is re-derived") {
  TempFile file("memory-dim");
  {
    VectorMemory memory = VectorMemory::open(file.path(), 16);
    memory.store(record("alpha beta gamma", 1.0));
  }
  // Reopen at a different dimension: record text survives, embedding adapts.
  VectorMemory memory = VectorMemory::open(file.path(), 64);
  REQUIRE(memory.size() == 1);
  const auto got = memory.retrieve("alpha beta gamma", 1);
  REQUIRE(got.size() == 1);
  CHECK(got[0].description_text == "alpha beta gamma");
}

TEST_CASE("store throws StorageFailure when the file cannot be appended") {
  VectorMemory memory =
      VectorMemory::open("/nonexistent-dir/never/memory.jsonl", 16);
  CHECK_THROWS_AS(memory.store(record("alpha", 1.0)), StorageFailure);
}

TEST_CASE("concurrent retrieves during stores do not interleave badly") {
  VectorMemory memory(64);
  std::atomic<bool> done{false};
  std::thread writer([&] {
    for (int i = 0; i < 200; ++i) {
      memory.store(record("text number " + std::to_string(i), i));
    }
    done = true;
  });
  size_t last = 0;
  bool monotone = true;
  while (!done) {
    const size_t got = memory.retrieve("text number 7", 3).size();
    const size_t capped = got > 3 ? 3 : got;
    if (capped < last) monotone = false;
    last = capped;
  }
  writer.join();
  CHECK(monotone);
  CHECK(memory.size() == 200);
  CHECK(memory.retrieve("text number 7", 3).size() == 3);
}
