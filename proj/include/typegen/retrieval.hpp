#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "typegen/eval.hpp"

namespace typegen {

/// A worked example built from an annotated training target.
struct ExampleRecord {
  std::string id;
  std::string target_name;
  VarCategory kind = VarCategory::Var;
  std::string slice;       // rendered code slice
  std::string hint;        // rendered type-hint line, possibly empty
  std::string cot;         // rendered chain of thought, ends with the conclusion
  std::string annotation;  // annotated type quoted by the conclusion

  bool operator==(const ExampleRecord& other) const = default;
};

/// Alphanumeric runs split further at snake_case and camelCase boundaries,
/// lowercased: "getDefaultEngine()" -> get, default, engine.
std::vector<std::string> tokenize(std::string_view text);

/// Okapi BM25 over the tokenized slices of a fixed set of example records.
/// IDF is ln((N - n + 0.5) / (n + 0.5)) floored at 0; every occurrence of a
/// query token contributes.
class Bm25Index {
 public:
  static constexpr int kFormatVersion = 1;

  Bm25Index() = default;
  static Bm25Index build(std::vector<ExampleRecord> records, double k1 = 1.2,
                         double b = 0.75);

  size_t size() const { return records_.size(); }
  const std::vector<ExampleRecord>& records() const { return records_; }
  double k1() const { return k1_; }
  double b() const { return b_; }
  double average_length() const { return avgdl_; }
  uint32_t document_length(size_t doc) const { return doc_len_[doc]; }

  /// Score of every record for the query, indexed like records().
  std::vector<double> scores(const std::vector<std::string>& query_tokens) const;
  std::vector<double> scores(std::string_view query_text) const;

  std::string to_json() const;
  static Bm25Index from_json(const std::string& text);  // throws InputError
  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

  bool operator==(const Bm25Index& other) const = default;

 private:
  struct Posting {
    uint32_t doc;
    uint32_t tf;
    bool operator==(const Posting& other) const = default;
  };

  std::vector<ExampleRecord> records_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::vector<uint32_t> doc_len_;
  double avgdl_ = 0;
  double k1_ = 1.2;
  double b_ = 0.75;
};

struct ScoredExample {
  const ExampleRecord* record;
  double score;
};

/// The k best-scoring records (ties: smaller id wins), returned least similar
/// first so the most similar example sits right before the target.
std::vector<ScoredExample> select_examples(const Bm25Index& index,
                                           std::string_view target_slice, int k = 5);

/// Records named by `ids`, in the order given, scored against the target.
/// Throws UnknownTargetId for an id that is not in the index.
std::vector<ScoredExample> fixed_examples(const Bm25Index& index,
                                          const std::vector<std::string>& ids,
                                          std::string_view target_slice);

}  // namespace typegen
