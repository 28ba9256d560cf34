#pragma once

// Gradient-boosted regression trees, squared-error loss, exact greedy splits.
// Fit is full-batch and order-insensitive: all reductions run in a canonical
// (value-sorted) order, so permuting dataset rows yields a bit-identical model.

#include <cstdint>
#include <span>
#include <vector>

#include "a3gnn/common.hpp"

namespace a3gnn::surrogate {

struct GbtHyper {
  std::uint32_t trees = 200;
  std::uint32_t depth = 3;
  double shrinkage = 0.1;
  std::uint32_t min_leaf = 2;
};

struct GbtNode {
  std::int32_t feature = -1;  // -1 = leaf
  double threshold = 0.0;
  double value = 0.0;  // leaf value
  std::int32_t left = -1;
  std::int32_t right = -1;
};

struct GbtModel {
  double base = 0.0;
  double shrinkage = 0.1;
  std::vector<std::vector<GbtNode>> trees;

  double predict(std::span<const double> x) const;
};

GbtModel gbt_fit(const std::vector<std::vector<double>>& x,
                 const std::vector<double>& y, const GbtHyper& hyper);

// 1 - sum((t-p)^2) / sum((t-mean(t))^2); throws on constant truth.
double r2_score(std::span<const double> pred, std::span<const double> truth);

}  // namespace a3gnn::surrogate
