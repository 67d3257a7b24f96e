#include "dynocc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dynocc {

namespace {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_query(const DepthMap& z, const Query& q) {
  if (!z.contains(q.i) || !z.contains(q.j)) {
    throw DimensionError("query point outside the depth map");
  }
}

}  // namespace

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double query_loss(double z_i, double z_j, Ordinal o) {
  const double diff = z_i - z_j;
  switch (o) {
    case Ordinal::closer:
      return softplus(-diff);
    case Ordinal::further:
      return softplus(diff);
    case Ordinal::same:
      return diff * diff;
  }
  return 0.0;
}

double query_loss_gradient(double z_i, double z_j, Ordinal o) {
  const double diff = z_i - z_j;
  switch (o) {
    case Ordinal::closer:
      return -sigmoid(-diff);
    case Ordinal::further:
      return sigmoid(diff);
    case Ordinal::same:
      return 2.0 * diff;
  }
  return 0.0;
}

std::vector<double> query_losses(const DepthMap& z, std::span<const Query> queries) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const Query& q : queries) {
    check_query(z, q);
    out.push_back(query_loss(z[q.i], z[q.j], q.o));
  }
  return out;
}

double ranking_loss(const DepthMap& z, std::span<const Query> queries) {
  if (queries.empty()) throw ParameterError("ranking loss needs at least one query");
  CompensatedSum total;
  for (const Query& q : queries) {
    check_query(z, q);
    total.add(query_loss(z[q.i], z[q.j], q.o));
  }
  return total.value();
}

std::vector<std::size_t> top_fraction(std::span<const double> losses, double fraction) {
  if (losses.empty()) throw ParameterError("top_fraction needs a non-empty loss list");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("fraction must lie in (0, 1]");
  const auto keep = std::min(
      losses.size(),
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(losses.size()))));
  std::vector<std::size_t> order(losses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return losses[a] > losses[b]; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

Ordinal predicted_order(double z_i, double z_j, double t) {
  const double diff = z_i - z_j;
  if (diff > t) return Ordinal::closer;
  if (diff < -t) return Ordinal::further;
  return Ordinal::same;
}

double whdr(std::span<const Ordinal> predicted, std::span<const Query> truth) {
  if (predicted.size() != truth.size()) {
    throw ParameterError("prediction and ground-truth lists differ in length");
  }
  CompensatedSum wrong;
  CompensatedSum total;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k].weight < 0.0) throw ParameterError("query weights must be non-negative");
    total.add(truth[k].weight);
    if (predicted[k] != truth[k].o) wrong.add(truth[k].weight);
  }
  if (!(total.value() > 0.0)) throw ParameterError("query weights sum to zero");
  return wrong.value() / total.value();
}

double whdr(const DepthMap& z, std::span<const Query> truth, double t) {
  std::vector<Ordinal> predicted;
  predicted.reserve(truth.size());
  for (const Query& q : truth) {
    check_query(z, q);
    predicted.push_back(predicted_order(z[q.i], z[q.j], t));
  }
  return whdr(predicted, truth);
}

QuerySet queries_from_pairs(std::span<const DepthPair> pairs) {
  QuerySet out;
  out.reserve(pairs.size());
  for (const DepthPair& p : pairs) out.push_back(Query{p.i, p.j, p.o, 1.0});
  return out;
}

}  // namespace dynocc
