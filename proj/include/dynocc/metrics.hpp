#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dynocc/pair_sampling.hpp"
#include "dynocc/raster.hpp"

namespace dynocc {

using DepthMap = ScalarMap;

struct Query {
  PixelPoint i;
  PixelPoint j;
  Ordinal o = Ordinal::same;
  double weight = 1.0;
};

using QuerySet = std::vector<Query>;

/// Numerically stable log(1 + exp(x)) = max(x, 0) + log1p(exp(-|x|)).
double softplus(double x);

/// Ranking loss of one query: softplus(-(z_i - z_j)) for +1, softplus(z_i - z_j)
/// for -1 and (z_i - z_j)^2 for 0.
double query_loss(double z_i, double z_j, Ordinal o);

/// d query_loss / d (z_i - z_j).
double query_loss_gradient(double z_i, double z_j, Ordinal o);

/// Sum of query_loss over R (compensated summation). Throws DimensionError for
/// a query outside z and ParameterError for an empty set.
double ranking_loss(const DepthMap& z, std::span<const Query> queries);

/// Per-query losses in input order.
std::vector<double> query_losses(const DepthMap& z, std::span<const Query> queries);

/// Indices of the ceil(fraction * K) largest losses, ties to the lower index,
/// returned in ascending index order.
std::vector<std::size_t> top_fraction(std::span<const double> losses, double fraction);

/// +1 when z_i - z_j > t, -1 when z_i - z_j < -t, else 0.
Ordinal predicted_order(double z_i, double z_j, double t);

/// Weighted fraction of queries whose predicted order differs from the truth.
/// Throws ParameterError when the weights sum to zero or lengths differ.
double whdr(std::span<const Ordinal> predicted, std::span<const Query> truth);

/// whdr with predictions read from a depth map through predicted_order.
double whdr(const DepthMap& z, std::span<const Query> truth, double t);

/// Queries carried by annotation pairs, all with unit weight.
QuerySet queries_from_pairs(std::span<const DepthPair> pairs);

}  // namespace dynocc
