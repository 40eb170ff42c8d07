#include "photostyle/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "photostyle/error.hpp"

namespace photostyle {

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

BipartiteAffinity::BipartiteAffinity(int n_x, int n_y, std::vector<BipartiteEdge> edges)
    : n_x_(n_x), n_y_(n_y), edges_(std::move(edges)) {
  if (n_x < 0 || n_y < 0) throw ValidationError("node counts must be non-negative");
  deg_x_.assign(static_cast<std::size_t>(n_x), 0.0);
  deg_y_.assign(static_cast<std::size_t>(n_y), 0.0);
  std::set<std::pair<int, int>> seen;
  for (const BipartiteEdge& e : edges_) {
    if (e.x < 0 || e.x >= n_x || e.y < 0 || e.y >= n_y) throw ValidationError("edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) throw ValidationError("edge weight must be positive and finite");
    if (!seen.emplace(e.x, e.y).second) throw ValidationError("duplicate edge");
    deg_x_[static_cast<std::size_t>(e.x)] += e.weight;
    deg_y_[static_cast<std::size_t>(e.y)] += e.weight;
  }
}

bool BipartiteAffinity::has_isolated() const {
  return std::any_of(deg_x_.begin(), deg_x_.end(), [](double d) { return d == 0.0; }) ||
         std::any_of(deg_y_.begin(), deg_y_.end(), [](double d) { return d == 0.0; });
}

BipartiteAffinity BipartiteAffinity::without_isolated(std::vector<int>& kept_x, std::vector<int>& kept_y) const {
  std::vector<int> remap_x(static_cast<std::size_t>(n_x_), -1), remap_y(static_cast<std::size_t>(n_y_), -1);
  kept_x.clear();
  kept_y.clear();
  for (int i = 0; i < n_x_; ++i)
    if (!isolated_x(i)) {
      remap_x[static_cast<std::size_t>(i)] = static_cast<int>(kept_x.size());
      kept_x.push_back(i);
    }
  for (int j = 0; j < n_y_; ++j)
    if (!isolated_y(j)) {
      remap_y[static_cast<std::size_t>(j)] = static_cast<int>(kept_y.size());
      kept_y.push_back(j);
    }
  std::vector<BipartiteEdge> edges;
  edges.reserve(edges_.size());
  for (const auto& e : edges_)
    edges.push_back({remap_x[static_cast<std::size_t>(e.x)], remap_y[static_cast<std::size_t>(e.y)], e.weight});
  return BipartiteAffinity(static_cast<int>(kept_x.size()), static_cast<int>(kept_y.size()), std::move(edges));
}

Eigen::SparseMatrix<double, Eigen::RowMajor> BipartiteAffinity::normalized_across_affinity() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges_.size());
  for (const auto& e : edges_) {
    const double dx = deg_x_[static_cast<std::size_t>(e.x)];
    const double dy = deg_y_[static_cast<std::size_t>(e.y)];
    triplets.emplace_back(e.x, e.y, e.weight / (std::sqrt(dx) * std::sqrt(dy)));
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(n_x_, n_y_);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::MatrixXd BipartiteAffinity::dense_across_affinity() const {
  return Eigen::MatrixXd(normalized_across_affinity());
}

double affinity_exponent(const StyleFreeView& a, const StyleFreeView& b, const FeatureWeights& w) {
  double sum = 0.0;
  if (w.terms.S) sum += squared_distance(a.S, b.S) * w.inv_S();
  if (w.terms.T) {
    double t = 0.0;
    for (std::size_t k = 0; k < a.T.size(); ++k) t += (a.T[k] - b.T[k]) * (a.T[k] - b.T[k]);
    sum += t * w.inv_T();
  }
  if (w.terms.La) {
    double l = 0.0;
    for (std::size_t k = 0; k < a.La.size(); ++k) l += (a.La[k] - b.La[k]) * (a.La[k] - b.La[k]);
    sum += l * w.inv_La();
  }
  if (w.terms.Lr) sum += squared_distance(a.Lr, b.Lr) * w.inv_Lr();
  return sum;
}

double pixel_affinity(const StyleFreeView& a, const StyleFreeView& b, const FeatureWeights& weights) {
  return std::exp(-affinity_exponent(a, b, weights));
}

int auto_stride(std::size_t uncovered_pixels) { return uncovered_pixels > kAutoStrideThreshold ? 2 : 1; }

PixelGraph build_pixel_graph(const PixelFeatureBank& bank_in, const PixelFeatureBank& bank_ref,
                             const SuperpixelLabelMap& labels_in, const SuperpixelLabelMap& labels_ref,
                             const FeatureWeights& weights, int stride_in, int stride_ref) {
  if (stride_in < 1 || stride_ref < 1) throw ValidationError("graph stride must be at least 1");
  if (labels_in.dims() != bank_in.dims() || labels_ref.dims() != bank_ref.dims())
    throw ValidationError("label map and feature bank dimensions differ");

  PixelGraph out;
  const auto sample = [](const SuperpixelLabelMap& labels, int stride) {
    std::vector<std::size_t> nodes;
    const int w = labels.dims().width;
    for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
      const int r = static_cast<int>(i / static_cast<std::size_t>(w));
      const int c = static_cast<int>(i % static_cast<std::size_t>(w));
      if (!labels.covered(i) && r % stride == 0 && c % stride == 0) nodes.push_back(i);
    }
    return nodes;
  };
  out.x_pixels = sample(labels_in, stride_in);
  out.y_pixels = sample(labels_ref, stride_ref);
  if (out.x_pixels.empty() || out.y_pixels.empty()) {
    out.degenerate = true;
    out.graph = BipartiteAffinity(static_cast<int>(out.x_pixels.size()), static_cast<int>(out.y_pixels.size()), {});
    return out;
  }

  std::map<int, std::vector<int>> x_groups, y_groups;
  for (std::size_t n = 0; n < out.x_pixels.size(); ++n)
    x_groups[bank_in.nearest_match(out.x_pixels[n])].push_back(static_cast<int>(n));
  for (std::size_t n = 0; n < out.y_pixels.size(); ++n)
    y_groups[bank_ref.nearest_match(out.y_pixels[n])].push_back(static_cast<int>(n));

  std::vector<BipartiteEdge> edges;
  for (const auto& [id, xs] : x_groups) {
    const auto it = y_groups.find(id);
    if (it == y_groups.end()) continue;
    for (int x : xs) {
      const StyleFreeView fx = bank_in.style_free(out.x_pixels[static_cast<std::size_t>(x)]);
      for (int y : it->second) {
        const double w = pixel_affinity(fx, bank_ref.style_free(out.y_pixels[static_cast<std::size_t>(y)]), weights);
        if (w >= std::numeric_limits<double>::min()) edges.push_back({x, y, w});
      }
    }
  }
  out.graph = BipartiteAffinity(static_cast<int>(out.x_pixels.size()), static_cast<int>(out.y_pixels.size()),
                                std::move(edges));
  return out;
}

void write_edge_list(std::ostream& out, const BipartiteAffinity& g) {
  const auto old = out.precision(17);
  for (const auto& e : g.edges()) out << e.x << ' ' << e.y << ' ' << e.weight << '\n';
  out.precision(old);
}

// ---------------------------------------------------------------------------
// Partial SVD
// ---------------------------------------------------------------------------

namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Portable uniform draw in [-1, 1).
double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

// Flip each column so that its largest-magnitude entry is positive.
void fix_signs(Eigen::MatrixXd& a, Eigen::MatrixXd& b) {
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (std::abs(a(r, c)) > best + 1e-12) {
        best = std::abs(a(r, c));
        arg = r;
      }
    if (a.rows() > 0 && a(arg, c) < 0) {
      a.col(c) *= -1.0;
      b.col(c) *= -1.0;
    }
  }
}

// Appends the part of v orthogonal to the current basis columns; returns false
// when nothing independent remains.
bool orthogonalize_into(Eigen::MatrixXd& basis, Eigen::Index& used, Eigen::VectorXd v) {
  const double original = v.norm();
  if (original == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (used > 0) {
      const auto q = basis.leftCols(used);
      v -= q * (q.transpose() * v);
    }
  }
  const double norm = v.norm();
  if (norm <= 1e-10 * original) return false;
  basis.col(used++) = v / norm;
  return true;
}

// Top eigenpairs of the Gram operator x -> A^T (A x) (or A (A^T x)) by
// restarted block Krylov iteration with Rayleigh-Ritz extraction.
struct GramEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  int restarts = 0;
};

GramEigen restarted_block_krylov(const RowSparse& a, bool right_side, int r, std::uint64_t seed,
                                 const CoClusterOptions& options) {
  const Eigen::Index n = right_side ? a.cols() : a.rows();
  const auto apply = [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    if (right_side) {
      const Eigen::MatrixXd ax = a * x;
      return a.transpose() * ax;
    }
    const Eigen::MatrixXd atx = a.transpose() * x;
    return a * atx;
  };

  const Eigen::Index block = std::min<Eigen::Index>(n, r + 10);
  const Eigen::Index max_basis = std::min<Eigen::Index>(n, std::max<Eigen::Index>(4 * block, 64));

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd start(n, block);
  for (Eigen::Index c = 0; c < block; ++c)
    for (Eigen::Index i = 0; i < n; ++i) start(i, c) = uniform_pm1(rng);

  Eigen::VectorXd previous;
  double drift = std::numeric_limits<double>::infinity();
  for (int restart = 1; restart <= options.max_restarts; ++restart) {
    Eigen::MatrixXd basis(n, max_basis);
    Eigen::Index used = 0;
    for (Eigen::Index c = 0; c < start.cols() && used < max_basis; ++c)
      orthogonalize_into(basis, used, start.col(c));
    Eigen::Index block_begin = 0;
    while (used < max_basis) {
      const Eigen::Index block_end = used;
      if (block_end == block_begin) break;  // invariant subspace reached
      const Eigen::MatrixXd next = apply(basis.middleCols(block_begin, block_end - block_begin));
      for (Eigen::Index c = 0; c < next.cols() && used < max_basis; ++c) orthogonalize_into(basis, used, next.col(c));
      block_begin = block_end;
    }
    const auto q = basis.leftCols(used);
    const Eigen::MatrixXd projected = q.transpose() * apply(q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (projected + projected.transpose()));
    const Eigen::Index keep = std::min<Eigen::Index>(used, block);
    // Eigen returns ascending eigenvalues.
    Eigen::VectorXd ritz(keep);
    Eigen::MatrixXd coords(used, keep);
    for (Eigen::Index c = 0; c < keep; ++c) {
      ritz(c) = eig.eigenvalues()(used - 1 - c);
      coords.col(c) = eig.eigenvectors().col(used - 1 - c);
    }
    start = q * coords;

    const Eigen::Index wanted = std::min<Eigen::Index>(r, keep);
    Eigen::VectorXd sigma = ritz.head(wanted).cwiseMax(0.0).cwiseSqrt();
    const bool complete = used == n;
    if (previous.size() == sigma.size()) drift = (sigma - previous).cwiseAbs().maxCoeff();
    if (complete || drift < options.drift_tolerance) {
      return {ritz.head(wanted), start.leftCols(wanted), restart};
    }
    previous = sigma;
  }
  throw SvdConvergenceError(options.max_restarts, drift);
}

}  // namespace

PartialSvd normalized_partial_svd(const BipartiteAffinity& g, int r, std::uint64_t seed,
                                  const CoClusterOptions& options) {
  if (g.has_isolated()) throw ValidationError("partial SVD requires a graph without isolated nodes");
  const int rank_bound = std::min(g.n_x(), g.n_y());
  r = std::clamp(r, 0, rank_bound);
  PartialSvd out;
  const bool dense = options.method == SvdMethod::dense ||
                     (options.method == SvdMethod::automatic && g.n_x() + g.n_y() < options.dense_node_limit);
  if (dense) {
    const Eigen::MatrixXd a = g.dense_across_affinity();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.values = svd.singularValues().head(r);
    out.U = svd.matrixU().leftCols(r);
    out.V = svd.matrixV().leftCols(r);
  } else {
    const RowSparse a = g.normalized_across_affinity();
    const bool right_side = g.n_y() <= g.n_x();
    GramEigen eig = restarted_block_krylov(a, right_side, r, seed, options);
    out.restarts = eig.restarts;
    out.values = eig.values.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd& known = right_side ? out.V : out.U;
    Eigen::MatrixXd& other = right_side ? out.U : out.V;
    known = eig.vectors;
    other = right_side ? Eigen::MatrixXd(a * known) : Eigen::MatrixXd(a.transpose() * known);
    for (Eigen::Index c = 0; c < other.cols(); ++c) {
      const double s = out.values(c);
      if (s > 1e-12) {
        other.col(c) /= s;
      } else {
        other.col(c).setZero();
      }
    }
  }
  fix_signs(out.U, out.V);
  return out;
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int max_iterations, double tolerance, int max_repairs) {
  const Eigen::Index n = points.rows();
  if (k < 1 || k > n) throw ValidationError("k-means needs 1 <= k <= point count");
  KMeansResult res;
  res.centers.resize(k, points.cols());

  // Farthest-first start.
  const Eigen::RowVectorXd centroid = points.colwise().mean();
  std::vector<double> min_d2(static_cast<std::size_t>(n));
  Eigen::Index first = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (points.row(i) - centroid).squaredNorm();
    if (d > best) {
      best = d;
      first = i;
    }
  }
  res.centers.row(0) = points.row(first);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  chosen[static_cast<std::size_t>(first)] = true;
  for (Eigen::Index i = 0; i < n; ++i) min_d2[static_cast<std::size_t>(i)] = (points.row(i) - res.centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    Eigen::Index arg = -1;
    double far = -1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!chosen[static_cast<std::size_t>(i)] && min_d2[static_cast<std::size_t>(i)] > far) {
        far = min_d2[static_cast<std::size_t>(i)];
        arg = i;
      }
    chosen[static_cast<std::size_t>(arg)] = true;
    res.centers.row(c) = points.row(arg);
    for (Eigen::Index i = 0; i < n; ++i)
      min_d2[static_cast<std::size_t>(i)] =
          std::min(min_d2[static_cast<std::size_t>(i)], (points.row(i) - res.centers.row(c)).squaredNorm());
  }

  res.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  double previous_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iterations; ++iter) {
    res.iterations = iter;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int arg = 0;
      double d_best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - res.centers.row(c)).squaredNorm();
        if (d < d_best) {
          d_best = d;
          arg = c;
        }
      }
      res.labels[static_cast<std::size_t>(i)] = arg;
      dist[static_cast<std::size_t>(i)] = d_best;
      inertia += d_best;
    }
    res.inertia = inertia;

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : res.labels) ++counts[static_cast<std::size_t>(l)];
    bool repaired = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0 || res.repairs >= max_repairs) continue;
      // Re-seed from the point farthest from its center, if its cluster can spare it.
      Eigen::Index arg = -1;
      double far = -1.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])] > 1 &&
            dist[static_cast<std::size_t>(i)] > far) {
          far = dist[static_cast<std::size_t>(i)];
          arg = i;
        }
      if (arg < 0) break;
      --counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(arg)])];
      res.labels[static_cast<std::size_t>(arg)] = c;
      dist[static_cast<std::size_t>(arg)] = 0.0;
      counts[static_cast<std::size_t>(c)] = 1;
      ++res.repairs;
      repaired = true;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(res.labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) res.centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];

    const double change = std::abs(previous_inertia - inertia);
    if (!repaired && change <= tolerance * std::max(inertia, std::numeric_limits<double>::min())) break;
    if (!repaired && inertia == 0.0) break;
    previous_inertia = inertia;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Co-clustering
// ---------------------------------------------------------------------------

namespace {

// Spectral co-clustering of one connected graph.
CoClustering co_cluster_connected(const BipartiteAffinity& g, int k, std::uint64_t seed, const CoClusterOptions& options) {
  const int total = g.n_x() + g.n_y();
  CoClustering out;
  out.k = std::min(k, total);
  out.x_labels.assign(static_cast<std::size_t>(g.n_x()), 0);
  out.y_labels.assign(static_cast<std::size_t>(g.n_y()), 0);
  if (out.k <= 1) {
    out.k = 1;
    out.one_sided = {g.n_x() == 0 || g.n_y() == 0};
    return out;
  }

  const PartialSvd svd = normalized_partial_svd(g, out.k, seed, options);
  out.svd_restarts = svd.restarts;
  const Eigen::Index dim = svd.values.size();
  Eigen::MatrixXd embedding(total, std::max<Eigen::Index>(dim, 1));
  embedding.setZero();
  for (int i = 0; i < g.n_x(); ++i)
    embedding.row(i).head(dim) = svd.U.row(i) / std::sqrt(g.deg_x()[static_cast<std::size_t>(i)]);
  for (int j = 0; j < g.n_y(); ++j)
    embedding.row(g.n_x() + j).head(dim) = svd.V.row(j) / std::sqrt(g.deg_y()[static_cast<std::size_t>(j)]);

  const KMeansResult km =
      kmeans(embedding, out.k, options.kmeans_max_iterations, options.kmeans_tolerance, options.kmeans_max_repairs);
  out.repairs = km.repairs;
  std::vector<int> x_count(static_cast<std::size_t>(out.k), 0), y_count(static_cast<std::size_t>(out.k), 0);
  for (int i = 0; i < g.n_x(); ++i) {
    out.x_labels[static_cast<std::size_t>(i)] = km.labels[static_cast<std::size_t>(i)];
    ++x_count[static_cast<std::size_t>(km.labels[static_cast<std::size_t>(i)])];
  }
  for (int j = 0; j < g.n_y(); ++j) {
    out.y_labels[static_cast<std::size_t>(j)] = km.labels[static_cast<std::size_t>(g.n_x() + j)];
    ++y_count[static_cast<std::size_t>(km.labels[static_cast<std::size_t>(g.n_x() + j)])];
  }
  out.one_sided.resize(static_cast<std::size_t>(out.k));
  for (int c = 0; c < out.k; ++c)
    out.one_sided[static_cast<std::size_t>(c)] = x_count[static_cast<std::size_t>(c)] == 0 || y_count[static_cast<std::size_t>(c)] == 0;
  return out;
}

struct ComponentSplit {
  int count = 0;
  std::vector<int> x_comp;
  std::vector<int> y_comp;
};

// Connected components, numbered by their lowest node (x nodes before y nodes).
ComponentSplit connected_components(const BipartiteAffinity& g) {
  const int n = g.n_x() + g.n_y();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const BipartiteEdge& e : g.edges()) {
    const int a = find(e.x), b = find(g.n_x() + e.y);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  ComponentSplit out;
  std::vector<int> id(static_cast<std::size_t>(n), -1);
  std::vector<int> comp(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const int root = find(v);
    if (id[static_cast<std::size_t>(root)] < 0) id[static_cast<std::size_t>(root)] = out.count++;
    comp[static_cast<std::size_t>(v)] = id[static_cast<std::size_t>(root)];
  }
  out.x_comp.assign(comp.begin(), comp.begin() + g.n_x());
  out.y_comp.assign(comp.begin() + g.n_x(), comp.end());
  return out;
}

// Highest-averages share of `total` clusters, at least one per component and
// at most one per node.
std::vector<int> allocate_clusters(const std::vector<int>& sizes, int total) {
  std::vector<int> share(sizes.size(), 1);
  int remaining = total - static_cast<int>(sizes.size());
  while (remaining > 0) {
    std::size_t best = sizes.size();
    double best_quotient = 0.0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (share[c] >= sizes[c]) continue;
      const double q = static_cast<double>(sizes[c]) / (share[c] + 1);
      if (q > best_quotient) {
        best_quotient = q;
        best = c;
      }
    }
    if (best == sizes.size()) break;
    ++share[best];
    --remaining;
  }
  return share;
}

std::uint64_t component_seed(std::uint64_t seed, int component) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(component + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CoClustering co_cluster(const BipartiteAffinity& g, int k, std::uint64_t seed, const CoClusterOptions& options) {
  if (k < 1) throw ValidationError("co_cluster needs k >= 1");
  if (g.has_isolated()) throw ValidationError("co_cluster requires a graph without isolated nodes");
  const ComponentSplit split = connected_components(g);
  if (split.count <= 1) return co_cluster_connected(g, k, seed, options);

  std::vector<std::vector<int>> xs(static_cast<std::size_t>(split.count)), ys(static_cast<std::size_t>(split.count));
  for (int i = 0; i < g.n_x(); ++i) xs[static_cast<std::size_t>(split.x_comp[static_cast<std::size_t>(i)])].push_back(i);
  for (int j = 0; j < g.n_y(); ++j) ys[static_cast<std::size_t>(split.y_comp[static_cast<std::size_t>(j)])].push_back(j);
  std::vector<std::vector<BipartiteEdge>> edges(static_cast<std::size_t>(split.count));
  std::vector<int> local_x(static_cast<std::size_t>(g.n_x())), local_y(static_cast<std::size_t>(g.n_y()));
  std::vector<int> sizes(static_cast<std::size_t>(split.count));
  for (int c = 0; c < split.count; ++c) {
    const auto& cx = xs[static_cast<std::size_t>(c)];
    const auto& cy = ys[static_cast<std::size_t>(c)];
    for (std::size_t a = 0; a < cx.size(); ++a) local_x[static_cast<std::size_t>(cx[a])] = static_cast<int>(a);
    for (std::size_t b = 0; b < cy.size(); ++b) local_y[static_cast<std::size_t>(cy[b])] = static_cast<int>(b);
    sizes[static_cast<std::size_t>(c)] = static_cast<int>(cx.size() + cy.size());
  }
  for (const BipartiteEdge& e : g.edges())
    edges[static_cast<std::size_t>(split.x_comp[static_cast<std::size_t>(e.x)])].push_back(
        {local_x[static_cast<std::size_t>(e.x)], local_y[static_cast<std::size_t>(e.y)], e.weight});

  const std::vector<int> share = allocate_clusters(sizes, std::max(k, split.count));
  CoClustering out;
  out.x_labels.assign(static_cast<std::size_t>(g.n_x()), 0);
  out.y_labels.assign(static_cast<std::size_t>(g.n_y()), 0);
  for (int c = 0; c < split.count; ++c) {
    const auto& cx = xs[static_cast<std::size_t>(c)];
    const auto& cy = ys[static_cast<std::size_t>(c)];
    const BipartiteAffinity sub(static_cast<int>(cx.size()), static_cast<int>(cy.size()),
                                std::move(edges[static_cast<std::size_t>(c)]));
    const CoClustering part = co_cluster_connected(sub, share[static_cast<std::size_t>(c)], component_seed(seed, c), options);
    for (std::size_t a = 0; a < cx.size(); ++a) out.x_labels[static_cast<std::size_t>(cx[a])] = out.k + part.x_labels[a];
    for (std::size_t b = 0; b < cy.size(); ++b) out.y_labels[static_cast<std::size_t>(cy[b])] = out.k + part.y_labels[b];
    out.one_sided.insert(out.one_sided.end(), part.one_sided.begin(), part.one_sided.end());
    out.k += part.k;
    out.repairs += part.repairs;
    out.svd_restarts += part.svd_restarts;
  }
  return out;
}

int choose_k(std::size_t uncovered_count, std::size_t target_area) {
  if (target_area < 1) throw ValidationError("target superpixel area must be at least 1");
  const std::size_t k = (uncovered_count + target_area - 1) / target_area;
  return static_cast<int>(std::max<std::size_t>(2, k));
}

}  // namespace photostyle
