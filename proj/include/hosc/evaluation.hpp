#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hosc/clustering.hpp"
#include "hosc/error.hpp"

namespace hosc {

struct Document {
  std::size_t id = 0;
  std::vector<std::string> tokens;
  std::string label;
};

/// Documents indexed by id; ids line up with point ids of the clustered set.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  explicit LabeledCorpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    for (std::size_t i = 0; i < docs_.size(); ++i)
      if (!by_id_.emplace(docs_[i].id, i).second)
        throw Error(ErrorKind::DuplicateId, "document id " + std::to_string(docs_[i].id));
  }

  std::size_t size() const noexcept { return docs_.size(); }
  const std::vector<Document>& docs() const noexcept { return docs_; }

  const Document& at(std::size_t id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw Error(ErrorKind::DegenerateInput, "no document with id " + std::to_string(id));
    return docs_[it->second];
  }
  bool contains(std::size_t id) const { return by_id_.contains(id); }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::size_t, std::size_t> by_id_;
};

using WordEmbeddingTable = std::unordered_map<std::string, std::vector<double>>;

/// Lowercase ASCII tokens split on every non-alphanumeric byte.
inline std::vector<std::string> tokenize(std::string_view text, const std::unordered_set<std::string>* stopwords = nullptr) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && (stopwords == nullptr || !stopwords->contains(cur))) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c))
      cur.push_back(static_cast<char>(std::tolower(c)));
    else
      flush();
  }
  flush();
  return out;
}

struct EvalConfig {
  std::size_t top_k = 10;
  std::unordered_set<std::string> stopwords;
  bool noise_as_singletons = false;  // AMI only
  double pmi_epsilon = 1e-12;
};

/// The K most frequent tokens across the given documents; ties alphabetical.
inline std::vector<std::string> top_k_words(std::span<const std::size_t> cluster, const LabeledCorpus& corpus,
                                            std::size_t k, const std::unordered_set<std::string>& stopwords = {}) {
  if (cluster.empty()) throw Error(ErrorKind::EmptyCluster, "top words of an empty cluster");
  std::map<std::string, std::size_t> freq;
  for (auto id : cluster)
    for (const auto& t : corpus.at(id).tokens)
      if (!stopwords.contains(t)) ++freq[t];
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

/// A scalar measure with its per-cluster breakdown. Clusters that could not
/// be scored (fewer than two usable words) appear as nullopt.
struct MeasureReport {
  std::string measure;
  double value = 0.0;
  std::vector<std::optional<double>> per_cluster;
};

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "embedding sizes differ");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

/// Mean over clusters of the mean pairwise cosine similarity between the
/// embeddings of the cluster's top-K words. Words missing from the table are
/// dropped and the pair count shrinks accordingly.
inline MeasureReport coherence_cosine(const ClusteringResult& result, const LabeledCorpus& corpus,
                                      const WordEmbeddingTable& table, const EvalConfig& cfg = {}) {
  if (result.clusters.empty()) throw Error(ErrorKind::NoClusters, "coherence needs at least one cluster");
  MeasureReport report{"coh-cos", 0.0, {}};
  double sum = 0.0;
  std::size_t scored = 0;
  for (const auto& cluster : result.clusters) {
    std::vector<const std::vector<double>*> vecs;
    for (const auto& w : top_k_words(cluster, corpus, cfg.top_k, cfg.stopwords))
      if (auto it = table.find(w); it != table.end()) vecs.push_back(&it->second);
    if (vecs.size() < 2) {
      report.per_cluster.push_back(std::nullopt);
      continue;
    }
    double s = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < vecs.size(); ++a)
      for (std::size_t b = a + 1; b < vecs.size(); ++b, ++pairs) s += cosine_similarity(*vecs[a], *vecs[b]);
    const double coh = s / static_cast<double>(pairs);
    report.per_cluster.push_back(coh);
    sum += coh;
    ++scored;
  }
  if (scored == 0) throw Error(ErrorKind::NoResolvableWords, "no cluster has two top words in the embedding table");
  report.value = sum / static_cast<double>(scored);
  return report;
}

/// Document-level PMI: p(x) is the fraction of corpus documents containing x,
/// p(x,y) the fraction containing both. Per cluster the PMI values of all
/// top-K word pairs are summed; cluster sums are averaged.
inline MeasureReport coherence_pmi(const ClusteringResult& result, const LabeledCorpus& corpus, const EvalConfig& cfg = {}) {
  if (result.clusters.empty()) throw Error(ErrorKind::NoClusters, "coherence needs at least one cluster");
  const double n_docs = static_cast<double>(corpus.size());

  std::vector<std::unordered_set<std::string>> doc_sets;
  doc_sets.reserve(corpus.size());
  for (const auto& d : corpus.docs()) doc_sets.emplace_back(d.tokens.begin(), d.tokens.end());
  auto df = [&](const std::string& x) {
    std::size_t c = 0;
    for (const auto& s : doc_sets) c += s.contains(x) ? 1 : 0;
    return static_cast<double>(c);
  };
  auto co_df = [&](const std::string& x, const std::string& y) {
    std::size_t c = 0;
    for (const auto& s : doc_sets) c += (s.contains(x) && s.contains(y)) ? 1 : 0;
    return static_cast<double>(c);
  };

  MeasureReport report{"coh-pmi", 0.0, {}};
  double sum = 0.0;
  std::size_t scored = 0;
  for (const auto& cluster : result.clusters) {
    const auto words = top_k_words(cluster, corpus, cfg.top_k, cfg.stopwords);
    if (words.size() < 2) {
      report.per_cluster.push_back(std::nullopt);
      continue;
    }
    double s = 0.0;
    for (std::size_t a = 0; a < words.size(); ++a)
      for (std::size_t b = a + 1; b < words.size(); ++b) {
        const double px = df(words[a]) / n_docs;
        const double py = df(words[b]) / n_docs;
        const double pxy = co_df(words[a], words[b]) / n_docs;
        s += std::log((pxy + cfg.pmi_epsilon) / (px * py));
      }
    report.per_cluster.push_back(s);
    sum += s;
    ++scored;
  }
  if (scored == 0) throw Error(ErrorKind::NoResolvableWords, "no cluster has two distinct top words");
  report.value = sum / static_cast<double>(scored);
  return report;
}

struct MajorityReport {
  std::size_t m = 0;  // clusters whose plurality topic is a strict majority
  std::size_t t = 0;  // clusters
  double accuracy = 0.0;
  double coverage = 0.0;
  std::vector<std::string> predicted;  // per cluster
};

/// Each cluster predicts its plurality topic (ties alphabetical) for all its
/// documents. Accuracy is over clustered documents only.
inline MajorityReport topic_majority(const ClusteringResult& result, const LabeledCorpus& corpus) {
  if (result.clusters.empty()) throw Error(ErrorKind::NoClusters, "majority needs at least one cluster");
  MajorityReport r;
  r.t = result.clusters.size();
  std::size_t correct = 0, clustered = 0;
  for (const auto& cluster : result.clusters) {
    std::map<std::string, std::size_t> counts;
    for (auto id : cluster) ++counts[corpus.at(id).label];
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
      if (it->second > best->second) best = it;
    if (2 * best->second > cluster.size()) ++r.m;
    correct += best->second;
    clustered += cluster.size();
    r.predicted.push_back(best->first);
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(clustered);
  r.coverage = corpus.size() == 0 ? 0.0 : static_cast<double>(clustered) / static_cast<double>(corpus.size());
  return r;
}

/// Contingency table between two labelings of the same items.
struct Contingency {
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::vector<std::vector<std::size_t>> cells;
  std::size_t total = 0;

  template <typename A, typename B>
  static Contingency of(std::span<const A> u, std::span<const B> v) {
    if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "labelings differ in length");
    std::map<A, std::size_t> ru;
    std::map<B, std::size_t> cv;
    for (const auto& x : u) ru.emplace(x, 0);
    for (const auto& x : v) cv.emplace(x, 0);
    std::size_t k = 0;
    for (auto& [_, idx] : ru) idx = k++;
    k = 0;
    for (auto& [_, idx] : cv) idx = k++;
    Contingency c;
    c.total = u.size();
    c.row_sums.assign(ru.size(), 0);
    c.col_sums.assign(cv.size(), 0);
    c.cells.assign(ru.size(), std::vector<std::size_t>(cv.size(), 0));
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto a = ru[u[i]];
      const auto b = cv[v[i]];
      ++c.cells[a][b];
      ++c.row_sums[a];
      ++c.col_sums[b];
    }
    return c;
  }
};

inline double entropy(std::span<const std::size_t> sums, std::size_t total) {
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (auto s : sums)
    if (s > 0) {
      const double p = static_cast<double>(s) / n;
      h -= p * std::log(p);
    }
  return h;
}

inline double mutual_information(const Contingency& c) {
  const double n = static_cast<double>(c.total);
  double mi = 0.0;
  for (std::size_t i = 0; i < c.row_sums.size(); ++i)
    for (std::size_t j = 0; j < c.col_sums.size(); ++j) {
      const auto nij = c.cells[i][j];
      if (nij == 0) continue;
      const double x = static_cast<double>(nij);
      mi += x / n * std::log(n * x / (static_cast<double>(c.row_sums[i]) * static_cast<double>(c.col_sums[j])));
    }
  return mi;
}

/// Expected mutual information under the hypergeometric model of random
/// labelings with the table's marginals. Probabilities via log-Gamma.
inline double expected_mutual_information(const Contingency& c) {
  const double n = static_cast<double>(c.total);
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (auto ai : c.row_sums) {
    for (auto bj : c.col_sums) {
      const double a = static_cast<double>(ai);
      const double b = static_cast<double>(bj);
      const std::size_t lo = std::max<std::size_t>(1, ai + bj > c.total ? ai + bj - c.total : 0);
      const std::size_t hi = std::min(ai, bj);
      const double fixed = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(n - a + 1.0) +
                           std::lgamma(n - b + 1.0) - lg_n;
      for (std::size_t nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double log_p = fixed - std::lgamma(x + 1.0) - std::lgamma(a - x + 1.0) - std::lgamma(b - x + 1.0) -
                             std::lgamma(n - a - b + x + 1.0);
        emi += (x / n) * std::log(n * x / (a * b)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

/// (MI - E[MI]) / (mean(H(U), H(V)) - E[MI]) with the arithmetic mean.
inline double adjusted_mutual_information(const Contingency& c) {
  if (c.total < 2) throw Error(ErrorKind::DegenerateInput, "AMI needs at least two items");
  if ((c.row_sums.size() == 1 && c.col_sums.size() == 1)) return 1.0;
  const double mi = mutual_information(c);
  const double emi = expected_mutual_information(c);
  const double mean_h = 0.5 * (entropy(c.row_sums, c.total) + entropy(c.col_sums, c.total));
  double denom = mean_h - emi;
  constexpr double tiny = std::numeric_limits<double>::epsilon();
  denom = denom < 0.0 ? std::min(denom, -tiny) : std::max(denom, tiny);
  return (mi - emi) / denom;
}

template <typename A, typename B>
double adjusted_mutual_information(std::span<const A> u, std::span<const B> v) {
  return adjusted_mutual_information(Contingency::of(u, v));
}

/// AMI between a clustering and the corpus topic labels. Noise points are
/// left out unless `noise_as_singletons` is set, in which case each becomes
/// its own cluster.
inline double adjusted_mutual_information(const ClusteringResult& pred, const LabeledCorpus& corpus,
                                          bool noise_as_singletons = false) {
  std::vector<long> cluster_ids;
  std::vector<std::string> topics;
  for (std::size_t c = 0; c < pred.clusters.size(); ++c)
    for (auto id : pred.clusters[c]) {
      cluster_ids.push_back(static_cast<long>(c));
      topics.push_back(corpus.at(id).label);
    }
  if (noise_as_singletons) {
    long next = static_cast<long>(pred.clusters.size());
    for (auto id : pred.noise) {
      cluster_ids.push_back(next++);
      topics.push_back(corpus.at(id).label);
    }
  }
  return adjusted_mutual_information(std::span<const long>(cluster_ids), std::span<const std::string>(topics));
}

}  // namespace hosc
