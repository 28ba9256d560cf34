#include "a3gnn/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace a3gnn::surrogate {

namespace {

// Canonical-order sum: independent of the caller's row order.
double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double sorted_mean(const std::vector<double>& v, const std::vector<std::uint32_t>& rows) {
  std::vector<double> vals;
  vals.reserve(rows.size());
  for (std::uint32_t r : rows) vals.push_back(v[r]);
  return sorted_sum(std::move(vals)) / static_cast<double>(rows.size());
}

struct Split {
  bool valid = false;
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

Split best_split(const std::vector<std::vector<double>>& x, const std::vector<double>& resid,
                 const std::vector<std::uint32_t>& rows, std::uint32_t min_leaf) {
  const std::size_t n = rows.size();
  Split best;
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;
  const std::size_t n_features = x[rows[0]].size();

  std::vector<std::pair<double, double>> pairs(n);  // (feature value, residual)
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      pairs[i] = {x[rows[i]][f], resid[rows[i]]};
    }
    std::sort(pairs.begin(), pairs.end());
    if (pairs.front().first == pairs.back().first) continue;  // constant feature

    double total = 0.0;
    for (const auto& p : pairs) total += p.second;

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += pairs[i].second;
      if (pairs[i].first == pairs[i + 1].first) continue;
      const std::size_t n_left = i + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                          right_sum * right_sum / static_cast<double>(n_right);
      if (!best.valid || gain > best.gain) {
        best.valid = true;
        best.feature = static_cast<std::int32_t>(f);
        best.threshold = 0.5 * (pairs[i].first + pairs[i + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

std::int32_t grow(std::vector<GbtNode>& nodes, const std::vector<std::vector<double>>& x,
                  const std::vector<double>& resid, std::vector<std::uint32_t> rows,
                  std::uint32_t depth_left, std::uint32_t min_leaf) {
  const std::int32_t id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  if (depth_left > 0) {
    const Split s = best_split(x, resid, rows, min_leaf);
    if (s.valid) {
      std::vector<std::uint32_t> left_rows, right_rows;
      for (std::uint32_t r : rows) {
        (x[r][s.feature] <= s.threshold ? left_rows : right_rows).push_back(r);
      }
      nodes[id].feature = s.feature;
      nodes[id].threshold = s.threshold;
      const std::int32_t l = grow(nodes, x, resid, std::move(left_rows), depth_left - 1, min_leaf);
      nodes[id].left = l;
      const std::int32_t r = grow(nodes, x, resid, std::move(right_rows), depth_left - 1, min_leaf);
      nodes[id].right = r;
      return id;
    }
  }
  nodes[id].value = sorted_mean(resid, rows);
  return id;
}

}  // namespace

double GbtModel::predict(std::span<const double> x) const {
  double out = base;
  for (const auto& nodes : trees) {
    std::int32_t at = 0;
    while (nodes[at].feature >= 0) {
      at = x[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
    }
    out += shrinkage * nodes[at].value;
  }
  return out;
}

GbtModel gbt_fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                 const GbtHyper& hyper) {
  if (x.size() != y.size() || x.empty()) {
    throw ParameterError("gbt_fit: need matching non-empty x/y");
  }
  GbtModel model;
  model.shrinkage = hyper.shrinkage;
  model.base = sorted_sum(std::vector<double>(y)) / static_cast<double>(y.size());

  std::vector<double> pred(y.size(), model.base);
  std::vector<double> resid(y.size());
  std::vector<std::uint32_t> all_rows(y.size());
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (std::uint32_t t = 0; t < hyper.trees; ++t) {
    for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - pred[i];
    std::vector<GbtNode> nodes;
    grow(nodes, x, resid, all_rows, hyper.depth, hyper.min_leaf);
    for (std::size_t i = 0; i < y.size(); ++i) {
      std::int32_t at = 0;
      while (nodes[at].feature >= 0) {
        at = x[i][nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
      }
      pred[i] += hyper.shrinkage * nodes[at].value;
    }
    model.trees.push_back(std::move(nodes));
  }
  return model;
}

double r2_score(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw ParameterError("r2_score: need equal nonzero lengths");
  }
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) throw ParameterError("r2_score: constant truth");
  return 1.0 - ss_res / ss_tot;
}

}  // namespace a3gnn::surrogate
