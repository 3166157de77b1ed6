#pragma once

// Brute-force BM25 straight from the formula: document frequencies and term
// counts are recomputed by scanning every document for every query token.

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace typegen::testing {

inline std::vector<double> brute_force_bm25(const std::vector<std::vector<std::string>>& docs,
                                            const std::vector<std::string>& query,
                                            double k1 = 1.2, double b = 0.75) {
  double total = 0;
  for (const auto& d : docs) total += static_cast<double>(d.size());
  const double avgdl = total / static_cast<double>(docs.size());
  const double n_docs = static_cast<double>(docs.size());
  std::vector<double> out;
  for (const auto& doc : docs) {
    double score = 0;
    for (const auto& q : query) {
      double df = 0;
      for (const auto& other : docs) {
        for (const auto& t : other) {
          if (t == q) {
            df += 1;
            break;
          }
        }
      }
      double tf = 0;
      for (const auto& t : doc) tf += t == q;
      if (df == 0 || tf == 0) continue;
      double idf = std::log((n_docs - df + 0.5) / (df + 0.5));
      if (idf < 0) idf = 0;
      score += idf * tf * (k1 + 1) /
               (tf + k1 * (1 - b + b * static_cast<double>(doc.size()) / avgdl));
    }
    out.push_back(score);
  }
  return out;
}

// Toy "code slice": words from a small vocabulary joined by spaces and
// punctuation, so tokenization is the identity on the chosen words.
inline std::vector<std::string> random_words(std::mt19937_64& rng, int max_len) {
  static const char* kVocab[] = {"open", "file", "path", "read", "data", "config", "name",
                                 "user", "db", "port", "host", "json", "load", "self",
                                 "result", "value", "key", "items", "append", "return"};
  std::vector<std::string> out;
  int n = std::uniform_int_distribution<int>(0, max_len)(rng);
  for (int i = 0; i < n; ++i) out.push_back(kVocab[std::uniform_int_distribution<int>(0, 19)(rng)]);
  return out;
}

inline std::string join_words(std::mt19937_64& rng, const std::vector<std::string>& words) {
  static const char* kSeps[] = {" ", " = ", "(", ".", ", ", "\n    "};
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += kSeps[std::uniform_int_distribution<int>(0, 5)(rng)];
    out += words[i];
  }
  return out;
}

}  // namespace typegen::testing
