#include "photostyle/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "photostyle/bipartite.hpp"
#include "photostyle/error.hpp"

namespace photostyle {

ChannelStats compute_stats(const LabPlane& lab, const std::vector<std::size_t>& pixels) {
  ChannelStats s;
  if (pixels.empty()) return s;
  const double n = static_cast<double>(pixels.size());
  for (std::size_t i : pixels)
    for (int c = 0; c < 3; ++c) s.mean[c] += lab[i][c];
  for (int c = 0; c < 3; ++c) s.mean[c] /= n;
  // Two-pass variance.
  for (std::size_t i : pixels)
    for (int c = 0; c < 3; ++c) {
      const double d = lab[i][c] - s.mean[c];
      s.stddev[c] += d * d;
    }
  for (int c = 0; c < 3; ++c) s.stddev[c] = std::sqrt(s.stddev[c] / n);
  return s;
}

namespace {

SparseCode mean_code(const std::map<int, double>& sums, double n) {
  SparseCode out;
  out.ids.reserve(sums.size());
  out.values.reserve(sums.size());
  for (const auto& [id, v] : sums) {
    out.ids.push_back(id);
    out.values.push_back(v / n);
  }
  return out;
}

}  // namespace

std::vector<SuperpixelDescriptor> aggregate_superpixels(const PixelFeatureBank& bank, const SuperpixelLabelMap& labels,
                                                        const LabPlane& lab, Side side) {
  if (labels.dims() != bank.dims() || lab.dims() != bank.dims())
    throw ValidationError("aggregate_superpixels: dimension mismatch");
  if (labels.uncovered_count() != 0) throw ValidationError("aggregate_superpixels: label map has uncovered pixels");

  const auto members = labels.members();
  std::vector<SuperpixelDescriptor> out(members.size());
  for (std::size_t id = 0; id < members.size(); ++id) {
    const auto& px = members[id];
    SuperpixelDescriptor& d = out[id];
    d.id = static_cast<int>(id);
    d.side = side;
    d.pixel_count = px.size();
    if (px.empty()) throw ValidationError("aggregate_superpixels: empty superpixel");
    const double n = static_cast<double>(px.size());
    std::map<int, double> s_sum, lr_sum;
    for (std::size_t i : px) {
      const StyleFreeView f = bank.style_free(i);
      for (std::size_t k = 0; k < f.S.ids.size(); ++k) s_sum[f.S.ids[k]] += f.S.values[k];
      for (std::size_t k = 0; k < f.Lr.ids.size(); ++k) lr_sum[f.Lr.ids[k]] += f.Lr.values[k];
      for (std::size_t k = 0; k < kTextureDim; ++k) d.mean_f.T[k] += f.T[k];
      d.mean_f.La[0] += f.La[0];
      d.mean_f.La[1] += f.La[1];
    }
    d.mean_f.S = mean_code(s_sum, n);
    d.mean_f.Lr = mean_code(lr_sum, n);
    for (double& v : d.mean_f.T) v /= n;
    for (double& v : d.mean_f.La) v /= n;
    d.lab_stats = compute_stats(lab, px);
  }
  return out;
}

double superpixel_affinity(const SuperpixelDescriptor& a, const SuperpixelDescriptor& b, const FeatureWeights& weights) {
  return pixel_affinity(a.mean_f.view(), b.mean_f.view(), weights);
}

AffinityMatrix superpixel_affinities(const std::vector<SuperpixelDescriptor>& inputs,
                                     const std::vector<SuperpixelDescriptor>& refs, const FeatureWeights& weights) {
  AffinityMatrix m;
  const auto n = static_cast<Eigen::Index>(inputs.size());
  const auto k = static_cast<Eigen::Index>(refs.size());
  m.affinity.resize(n, k);
  m.exponent.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double e = affinity_exponent(inputs[static_cast<std::size_t>(i)].mean_f.view(),
                                         refs[static_cast<std::size_t>(j)].mean_f.view(), weights);
      m.exponent(i, j) = e;
      m.affinity(i, j) = std::exp(-e);
    }
  return m;
}

int CorrespondenceTable::resolve(int input_id) const {
  if (auto it = pairs.find(input_id); it != pairs.end()) return it->second;
  if (auto it = fallback.find(input_id); it != fallback.end()) return it->second;
  throw ValidationError("input superpixel " + std::to_string(input_id) + " has no correspondence");
}

bool CorrespondenceTable::resolves_all(int input_count) const {
  for (int i = 0; i < input_count; ++i)
    if (!pairs.contains(i) && !fallback.contains(i)) return false;
  return true;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != cost.rows()) throw ValidationError("solve_assignment needs a square cost matrix");
  if (n == 0) return {};
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting paths with row/column potentials; 1-based, column 0 is virtual.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> row_of(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = row_of[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(row_of[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      row_of[static_cast<std::size_t>(j0)] = row_of[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(row_of[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return assignment;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r) total += cost(static_cast<Eigen::Index>(r), assignment[r]);
  return total;
}

CorrespondenceTable hungarian_match(const Eigen::MatrixXd& affinity, double epsilon_edge, const Eigen::MatrixXd* exponent) {
  const Eigen::Index n = affinity.rows();
  const Eigen::Index m = affinity.cols();
  if (n < 1 || m < 1) throw ValidationError("hungarian_match needs a non-empty affinity matrix");
  if (exponent && (exponent->rows() != n || exponent->cols() != m))
    throw ValidationError("hungarian_match: exponent shape differs from affinity");

  const Eigen::Index size = std::max(n, m);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(size, size);
  cost.topLeftCorner(n, m) = (1.0 - affinity.array()).matrix();
  const std::vector<int> square = solve_assignment(cost);

  CorrespondenceTable table;
  table.total_cost = assignment_cost(cost, square);
  table.assignment.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = square[static_cast<std::size_t>(i)];
    table.assignment[static_cast<std::size_t>(i)] = j < m ? j : -1;
    if (j < m && affinity(i, j) >= epsilon_edge) {
      table.pairs.emplace(static_cast<int>(i), j);
      continue;
    }
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < m; ++c) {
      const bool better = exponent ? (*exponent)(i, c) < (*exponent)(i, best) : affinity(i, c) > affinity(i, best);
      if (better) best = c;
    }
    table.fallback.emplace(static_cast<int>(i), static_cast<int>(best));
  }
  return table;
}

void write_correspondences(std::ostream& out, const CorrespondenceTable& table, const Eigen::MatrixXd& affinity) {
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < affinity.rows(); ++i) {
    const int ref = table.resolve(static_cast<int>(i));
    out << i << ' ' << ref << ' ' << affinity(i, ref) << '\n';
  }
  out.precision(old);
}

}  // namespace photostyle
