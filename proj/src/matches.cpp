#include "photostyle/matches.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>

#include "photostyle/error.hpp"

namespace photostyle {

namespace {

inline long long dist2(PixelLoc a, PixelLoc b) {
  const long long dr = a.row - b.row;
  const long long dc = a.col - b.col;
  return dr * dr + dc * dc;
}

struct Candidate {
  long long d2;
  int id;
  bool operator<(const Candidate& o) const { return std::tie(d2, id) < std::tie(o.d2, o.id); }
};

std::vector<int> take_ids(std::vector<Candidate>& cands, std::size_t k) {
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end());
  std::vector<int> ids(k);
  for (std::size_t i = 0; i < k; ++i) ids[i] = cands[i].id;
  return ids;
}

}  // namespace

MatchedPointSet::MatchedPointSet(std::vector<Match> entries, Dims input_dims, Dims ref_dims)
    : entries_(std::move(entries)), input_dims_(input_dims), ref_dims_(ref_dims) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Match& m = entries_[i];
    if (!input_dims_.contains(m.input) || !ref_dims_.contains(m.ref))
      throw ValidationError("match " + std::to_string(i) + " lies outside the image bounds");
    if (!(m.score >= 0.0) || !std::isfinite(m.score))
      throw ValidationError("match " + std::to_string(i) + " has an invalid score");
  }
  if (entries_.size() >= kGridIndexThreshold) {
    input_grid_ = build_grid(Side::input);
    ref_grid_ = build_grid(Side::reference);
  }
}

MatchedPointSet::Grid MatchedPointSet::build_grid(Side side) const {
  const Dims d = dims(side);
  Grid g;
  // Roughly two points per bucket.
  const double cell = std::sqrt(2.0 * static_cast<double>(d.area()) / static_cast<double>(entries_.size()));
  g.cell = std::max(1, static_cast<int>(std::ceil(cell)));
  g.rows = (d.height + g.cell - 1) / g.cell;
  g.cols = (d.width + g.cell - 1) / g.cell;
  g.buckets.resize(static_cast<std::size_t>(g.rows) * g.cols);
  for (std::size_t id = 0; id < entries_.size(); ++id) {
    const PixelLoc p = loc(id, side);
    g.buckets[static_cast<std::size_t>(p.row / g.cell) * g.cols + p.col / g.cell].push_back(static_cast<int>(id));
  }
  return g;
}

std::vector<int> MatchedPointSet::nearest(Side side, PixelLoc loc, std::size_t k) const {
  if (k > entries_.size()) throw ValidationError("requested more neighbours than matched points");
  if (k == 0) return {};
  if (entries_.size() < kGridIndexThreshold) return nearest_brute(side, loc, k);
  return nearest_grid(side == Side::input ? input_grid_ : ref_grid_, side, loc, k);
}

std::vector<int> MatchedPointSet::nearest_brute(Side side, PixelLoc loc, std::size_t k) const {
  std::vector<Candidate> cands(entries_.size());
  for (std::size_t id = 0; id < entries_.size(); ++id)
    cands[id] = {dist2(this->loc(id, side), loc), static_cast<int>(id)};
  return take_ids(cands, k);
}

std::vector<int> MatchedPointSet::nearest_grid(const Grid& g, Side side, PixelLoc loc, std::size_t k) const {
  const int qr = std::clamp(loc.row / g.cell, 0, g.rows - 1);
  const int qc = std::clamp(loc.col / g.cell, 0, g.cols - 1);
  std::vector<Candidate> cands;
  const int max_ring = std::max(g.rows, g.cols);
  for (int ring = 0; ring <= max_ring; ++ring) {
    for (int r = qr - ring; r <= qr + ring; ++r) {
      if (r < 0 || r >= g.rows) continue;
      const bool edge_row = (r == qr - ring || r == qr + ring);
      for (int c = qc - ring; c <= qc + ring; c += (edge_row ? 1 : 2 * ring)) {
        if (c >= 0 && c < g.cols)
          for (int id : g.buckets[static_cast<std::size_t>(r) * g.cols + c])
            cands.push_back({dist2(this->loc(static_cast<std::size_t>(id), side), loc), id});
        if (ring == 0) break;
      }
    }
    if (cands.size() >= k) {
      // Anything outside rings 0..ring is at least ring*cell+1 pixels away.
      std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k - 1), cands.end());
      const long long bound = static_cast<long long>(ring) * g.cell + 1;
      if (cands[k - 1].d2 < bound * bound) break;
    }
  }
  return take_ids(cands, k);
}

std::vector<int> nearest_matches(const MatchedPointSet& set, Side side, PixelLoc loc, std::size_t k) {
  return set.nearest(side, loc, k);
}

MatchedPointSet load_matches(std::istream& text, Dims input_dims, Dims ref_dims) {
  std::vector<Match> entries;
  std::vector<std::size_t> lines;
  std::map<std::pair<int, int>, std::size_t> by_input;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(text, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    long long xi, yi, xr, yr;
    double score;
    if (!(fields >> xi >> yi >> xr >> yr >> score))
      throw ParseError(line_no, "expected 'x_input y_input x_ref y_ref score'");
    std::string rest;
    if (fields >> rest) throw ParseError(line_no, "unexpected trailing field '" + rest + "'");

    const auto in_range = [](long long v) { return v >= 0 && v <= 1'000'000'000; };
    if (!in_range(xi) || !in_range(yi) || !in_range(xr) || !in_range(yr))
      throw ValidationError("line " + std::to_string(line_no) + ": coordinate out of bounds");
    Match m{{static_cast<int>(yi), static_cast<int>(xi)}, {static_cast<int>(yr), static_cast<int>(xr)}, score};
    if (!input_dims.contains(m.input) || !ref_dims.contains(m.ref))
      throw ValidationError("line " + std::to_string(line_no) + ": coordinate out of bounds");
    if (!std::isfinite(score) || score < 0.0)
      throw ValidationError("line " + std::to_string(line_no) + ": score must be finite and non-negative");

    const auto key = std::make_pair(m.input.row, m.input.col);
    if (auto it = by_input.find(key); it != by_input.end()) {
      // Keep the higher score; on a tie the earlier line wins.
      if (m.score > entries[it->second].score) entries[it->second] = m;
      continue;
    }
    by_input.emplace(key, entries.size());
    entries.push_back(m);
  }
  if (entries.size() < kMinMatches) throw InsufficientMatchesError(entries.size(), kMinMatches);
  return MatchedPointSet(std::move(entries), input_dims, ref_dims);
}

MatchedPointSet filter_top_fraction(const MatchedPointSet& set, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("match fraction must lie in (0,1]");
  const std::size_t n = set.size();
  // The small slack keeps e.g. 0.7 * 10 from rounding up to 8.
  const auto keep = std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set[a].score > set[b].score; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  if (keep < kMinMatches) throw InsufficientMatchesError(keep, kMinMatches);
  std::vector<Match> kept;
  kept.reserve(keep);
  for (std::size_t id : order) kept.push_back(set[id]);
  return MatchedPointSet(std::move(kept), set.input_dims(), set.ref_dims());
}

}  // namespace photostyle
