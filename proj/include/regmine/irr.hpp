#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "regmine/annotate.hpp"
#include "regmine/errors.hpp"
#include "regmine/labels.hpp"

namespace regmine {

// N items x k categories; cell = how many raters put the item in the
// category. Every row sums to the same rater count n.
struct RatingMatrix {
  std::vector<std::string> categories;
  std::vector<std::vector<int>> counts;

  std::size_t items() const { return counts.size(); }
  std::size_t k() const { return categories.size(); }
  int raters() const {
    if (counts.empty()) return 0;
    int n = 0;
    for (int c : counts.front()) n += c;
    return n;
  }
};

// Fleiss' kappa: (P_bar - Pe_bar) / (1 - Pe_bar) with
//   P_i    = (sum_j n_ij^2 - n) / (n (n - 1))
//   p_j    = sum_i n_ij / (N n)
//   Pe_bar = sum_j p_j^2
inline double fleiss_kappa(const RatingMatrix& m) {
  const std::size_t N = m.items();
  if (N == 0) fail(Errc::TooFewRaters, "no items");
  const int n = m.raters();
  if (n < 2) fail(Errc::TooFewRaters, "need at least 2 ratings per item, got " +
                                          std::to_string(n));
  for (const auto& row : m.counts) {
    if (row.size() != m.k()) fail(Errc::CoverageMismatch, "ragged rating matrix");
    int sum = 0;
    for (int c : row) {
      if (c < 0) fail(Errc::CoverageMismatch, "negative rating count");
      sum += c;
    }
    if (sum != n) fail(Errc::CoverageMismatch, "row does not sum to rater count");
  }

  double p_bar = 0.0;
  for (const auto& row : m.counts) {
    long sq = 0;
    for (int c : row) sq += static_cast<long>(c) * c;
    p_bar += (static_cast<double>(sq) - n) / (static_cast<double>(n) * (n - 1));
  }
  p_bar /= static_cast<double>(N);

  double pe_bar = 0.0;
  for (std::size_t j = 0; j < m.k(); ++j) {
    long col = 0;
    for (const auto& row : m.counts) col += row[j];
    const double p_j = static_cast<double>(col) / (static_cast<double>(N) * n);
    pe_bar += p_j * p_j;
  }

  if (pe_bar >= 1.0)
    fail(Errc::DegenerateDistribution, "all ratings fall into a single category");
  return (p_bar - pe_bar) / (1.0 - pe_bar);
}

struct IrrReport {
  double kappa = 0.0;
  std::size_t N = 0;  // items
  int n = 0;          // raters
  std::size_t k = 0;  // categories
  std::map<std::string, double> per_category_marginals;
};

// Builds the matrix over composite "Event|Valence" categories from complete
// annotator sets. Items are the messages rated by every annotator; partial
// coverage is a CoverageMismatch.
inline RatingMatrix rating_matrix(const std::map<std::string, AnnotatorRatings>& sets) {
  if (sets.size() < 2) fail(Errc::TooFewRaters, "need at least 2 annotators");
  std::set<std::size_t> ids;
  for (const auto& [id, _] : sets.begin()->second) ids.insert(id);
  for (const auto& [name, ratings] : sets) {
    if (ratings.size() != ids.size())
      fail(Errc::CoverageMismatch, "annotator " + name + " covers a different message set");
    for (const auto& [id, _] : ratings)
      if (!ids.count(id))
        fail(Errc::CoverageMismatch, "annotator " + name + " covers a different message set");
  }

  std::set<std::string> cats;
  for (const auto& [_, ratings] : sets)
    for (const auto& [__, a] : ratings)
      cats.insert(std::string(to_string(a.event)) + "|" + to_string(a.valence));

  RatingMatrix m;
  m.categories.assign(cats.begin(), cats.end());
  std::map<std::string, std::size_t> cat_index;
  for (std::size_t j = 0; j < m.categories.size(); ++j) cat_index[m.categories[j]] = j;

  for (const std::size_t id : ids) {
    std::vector<int> row(m.categories.size(), 0);
    for (const auto& [_, ratings] : sets) {
      const Annotation& a = ratings.at(id);
      ++row[cat_index.at(std::string(to_string(a.event)) + "|" + to_string(a.valence))];
    }
    m.counts.push_back(std::move(row));
  }
  return m;
}

inline IrrReport irr_report(const std::map<std::string, AnnotatorRatings>& sets) {
  const RatingMatrix m = rating_matrix(sets);
  IrrReport r;
  r.kappa = fleiss_kappa(m);
  r.N = m.items();
  r.n = m.raters();
  r.k = m.k();
  for (std::size_t j = 0; j < m.k(); ++j) {
    long col = 0;
    for (const auto& row : m.counts) col += row[j];
    r.per_category_marginals[m.categories[j]] =
        static_cast<double>(col) / (static_cast<double>(m.items()) * m.raters());
  }
  return r;
}

}  // namespace regmine
