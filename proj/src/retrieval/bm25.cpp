#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "typegen/error.hpp"
#include "typegen/retrieval.hpp"

namespace typegen {

namespace {

bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void split_camel(std::string_view word, std::vector<std::string>& out) {
  size_t start = 0;
  for (size_t i = 1; i < word.size(); ++i) {
    bool lower_to_upper = (is_lower(word[i - 1]) || std::isdigit(static_cast<unsigned char>(word[i - 1]))) &&
                          is_upper(word[i]);
    // "HTTPServer": the run of capitals ends before the capital that starts "Server".
    bool acronym_end = is_upper(word[i - 1]) && is_upper(word[i]) && i + 1 < word.size() &&
                       is_lower(word[i + 1]);
    if (lower_to_upper || acronym_end) {
      out.emplace_back(word.substr(start, i - start));
      start = i;
    }
  }
  out.emplace_back(word.substr(start));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    if (!is_alnum(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && is_alnum(text[j])) ++j;
    split_camel(text.substr(i, j - i), out);
    i = j;
  }
  for (auto& t : out) {
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  return out;
}

Bm25Index Bm25Index::build(std::vector<ExampleRecord> records, double k1, double b) {
  if (records.empty()) throw InputError("cannot build an index without examples");
  Bm25Index idx;
  idx.records_ = std::move(records);
  idx.k1_ = k1;
  idx.b_ = b;
  uint64_t total = 0;
  for (size_t d = 0; d < idx.records_.size(); ++d) {
    auto tokens = tokenize(idx.records_[d].slice);
    std::map<std::string, uint32_t> tf;
    for (auto& t : tokens) ++tf[t];
    for (auto& [t, n] : tf) idx.postings_[t].push_back({static_cast<uint32_t>(d), n});
    idx.doc_len_.push_back(static_cast<uint32_t>(tokens.size()));
    total += tokens.size();
  }
  idx.avgdl_ = idx.records_.empty() ? 0.0 : static_cast<double>(total) / idx.records_.size();
  return idx;
}

std::vector<double> Bm25Index::scores(const std::vector<std::string>& query_tokens) const {
  std::vector<double> out(records_.size(), 0.0);
  const double n_docs = static_cast<double>(records_.size());
  for (const auto& q : query_tokens) {
    auto it = postings_.find(q);
    if (it == postings_.end()) continue;
    const double n = static_cast<double>(it->second.size());
    const double idf = std::max(0.0, std::log((n_docs - n + 0.5) / (n + 0.5)));
    if (idf == 0.0) continue;
    for (const auto& p : it->second) {
      const double tf = p.tf;
      const double norm = avgdl_ > 0 ? doc_len_[p.doc] / avgdl_ : 0.0;
      out[p.doc] += idf * tf * (k1_ + 1) / (tf + k1_ * (1 - b_ + b_ * norm));
    }
  }
  return out;
}

std::vector<double> Bm25Index::scores(std::string_view query_text) const {
  return scores(tokenize(query_text));
}

std::string Bm25Index::to_json() const {
  using nlohmann::json;
  json records = json::array();
  for (const auto& r : records_) {
    records.push_back({{"id", r.id},
                       {"target_name", r.target_name},
                       {"kind", dataset_kind(r.kind)},
                       {"slice", r.slice},
                       {"hint", r.hint},
                       {"cot", r.cot},
                       {"annotation", r.annotation}});
  }
  json postings = json::object();
  for (const auto& [token, list] : postings_) {
    json entries = json::array();
    for (const auto& p : list) entries.push_back({p.doc, p.tf});
    postings[token] = entries;
  }
  json j = {{"format", "typegen-bm25"},
            {"version", kFormatVersion},
            {"k1", k1_},
            {"b", b_},
            {"average_length", avgdl_},
            {"document_lengths", doc_len_},
            {"records", records},
            {"postings", postings}};
  return j.dump() + "\n";
}

Bm25Index Bm25Index::from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("index is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "typegen-bm25") {
    throw InputError("not a BM25 index file");
  }
  if (j.value("version", -1) != kFormatVersion) {
    throw InputError("unsupported index version " + j.value("version", json(-1)).dump());
  }
  try {
    Bm25Index idx;
    idx.k1_ = j.at("k1").get<double>();
    idx.b_ = j.at("b").get<double>();
    idx.avgdl_ = j.at("average_length").get<double>();
    idx.doc_len_ = j.at("document_lengths").get<std::vector<uint32_t>>();
    for (const auto& r : j.at("records")) {
      idx.records_.push_back({r.at("id").get<std::string>(),
                              r.at("target_name").get<std::string>(),
                              parse_var_category(r.at("kind").get<std::string>()),
                              r.at("slice").get<std::string>(), r.at("hint").get<std::string>(),
                              r.at("cot").get<std::string>(),
                              r.at("annotation").get<std::string>()});
    }
    for (const auto& [token, list] : j.at("postings").items()) {
      auto& out = idx.postings_[token];
      for (const auto& p : list) {
        Posting posting{p.at(0).get<uint32_t>(), p.at(1).get<uint32_t>()};
        if (posting.doc >= idx.records_.size()) throw InputError("posting refers to a missing record");
        out.push_back(posting);
      }
    }
    if (idx.doc_len_.size() != idx.records_.size()) {
      throw InputError("document length table does not match the record count");
    }
    return idx;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed index: ") + e.what());
  }
}

void Bm25Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json();
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<ScoredExample> select_examples(const Bm25Index& index,
                                           std::string_view target_slice, int k) {
  if (k < 1) throw InputError("number of examples must be at least 1");
  auto scores = index.scores(target_slice);
  const auto& records = index.records();
  std::vector<ScoredExample> all;
  for (size_t d = 0; d < records.size(); ++d) all.push_back({&records[d], scores[d]});
  auto best_first = [](const ScoredExample& a, const ScoredExample& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.record->id < b.record->id;
  };
  size_t keep = std::min(all.size(), static_cast<size_t>(k));
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    best_first);
  all.resize(keep);
  std::sort(all.begin(), all.end(), [](const ScoredExample& a, const ScoredExample& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.record->id < b.record->id;
  });
  return all;
}

std::vector<ScoredExample> fixed_examples(const Bm25Index& index,
                                          const std::vector<std::string>& ids,
                                          std::string_view target_slice) {
  auto scores = index.scores(target_slice);
  const auto& records = index.records();
  std::vector<ScoredExample> out;
  for (const auto& id : ids) {
    auto it = std::find_if(records.begin(), records.end(),
                           [&](const ExampleRecord& r) { return r.id == id; });
    if (it == records.end()) throw UnknownTargetId("no example with id '" + id + "' in the index");
    out.push_back({&*it, scores[static_cast<size_t>(it - records.begin())]});
  }
  return out;
}

}  // namespace typegen
