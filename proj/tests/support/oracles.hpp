#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

// Reference implementations kept deliberately naive so they share no code
// with the library under test.
namespace narrative::testing {

// Independent kappa: explicit contingency table over the label alphabet.
template <class T>
inline double kappa_oracle(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> labels(a.begin(), a.end());
  labels.insert(labels.end(), b.begin(), b.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const std::size_t k = labels.size();
  std::vector<std::vector<double>> table(k, std::vector<double>(k, 0));
  auto idx = [&](const T& v) { return std::lower_bound(labels.begin(), labels.end(), v) - labels.begin(); };
  for (std::size_t i = 0; i < a.size(); ++i) table[idx(a[i])][idx(b[i])] += 1;
  const double n = static_cast<double>(a.size());
  double po = 0, pe = 0;
  for (std::size_t i = 0; i < k; ++i) {
    po += table[i][i] / n;
    double row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += table[i][j];
      col += table[j][i];
    }
    pe += (row / n) * (col / n);
  }
  return (po - pe) / (1 - pe);
}

// Independent Spearman: ranks by counting, then the textbook Pearson sums.
inline double spearman_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        less += w < v[i];
        equal += w == v[i];
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += ra[i];
    sb += rb[i];
    sab += ra[i] * rb[i];
    saa += ra[i] * ra[i];
    sbb += rb[i] * rb[i];
  }
  return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

}  // namespace narrative::testing
