#include "evenspace/dl_box.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "evenspace/errors.hpp"

namespace evenspace {

namespace {

constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

}  // namespace

TreeNode DLBox::coord1(VertexId v) const {
  const DLVertex& c = coords_.at(v);
  return {margin_ - c.level, c.addr1};
}

TreeNode DLBox::coord2(VertexId v) const {
  const DLVertex& c = coords_.at(v);
  return {n_ + margin_ + c.level, c.addr2};
}

std::uint64_t DLBox::dense_index(const DLVertex& c) const {
  const int total = span_depth();
  const int d1 = margin_ - c.level;
  const int d2 = total - d1;
  return (static_cast<std::uint64_t>(d1) << total) + (c.addr1 << d2) + c.addr2;
}

std::optional<VertexId> DLBox::find(const DLVertex& c) const {
  const int d1 = margin_ - c.level;
  const int d2 = span_depth() - d1;
  if (d1 < 0 || d2 < 0) return std::nullopt;
  if (c.addr1 >> d1 != 0 || c.addr2 >> d2 != 0) return std::nullopt;
  const VertexId v = by_dense_[dense_index(c)];
  if (v == kNoVertex) return std::nullopt;
  return v;
}

VertexId DLBox::at(const DLVertex& c) const {
  if (auto v = find(c)) return *v;
  throw std::out_of_range("DLBox: vertex (" + std::to_string(c.level) + ", " + std::to_string(c.addr1) +
                          ", " + std::to_string(c.addr2) + ") not in box");
}

bool DLBox::in_core(VertexId v) const {
  const DLVertex& c = coords_.at(v);
  if (c.level > 0 || c.level < -n_) return false;
  return (c.addr1 >> (-c.level)) == 0 && (c.addr2 >> (n_ + c.level)) == 0;
}

DLBox build_dl_box(int n, int margin, std::size_t max_vertices) {
  if (n < 1) throw std::invalid_argument("build_dl_box: n must be at least 1");
  if (margin < 0) throw std::invalid_argument("build_dl_box: margin must be nonnegative");
  const int total = n + 2 * margin;
  if (total > 40) throw BudgetExceeded("build_dl_box: n + 2*margin too large");
  const std::size_t per_level = std::size_t{1} << total;
  const std::size_t vertex_count = static_cast<std::size_t>(total + 1) * per_level;
  if (vertex_count > max_vertices) {
    throw BudgetExceeded("build_dl_box: " + std::to_string(vertex_count) + " vertices exceed budget " +
                         std::to_string(max_vertices));
  }

  DLBox box;
  box.n_ = n;
  box.margin_ = margin;
  box.by_dense_.assign(vertex_count, kNoVertex);
  box.coords_.reserve(vertex_count);

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(total) * 2 * per_level);
  std::vector<bool> processed;
  processed.reserve(vertex_count);

  auto assign = [&](const DLVertex& c) {
    VertexId& slot = box.by_dense_[box.dense_index(c)];
    if (slot == kNoVertex) {
      slot = static_cast<VertexId>(box.coords_.size());
      box.coords_.push_back(c);
      processed.push_back(false);
    }
    return slot;
  };

  box.origin_ = assign({0, 0, 0});
  for (std::size_t head = 0; head < box.coords_.size(); ++head) {
    const DLVertex c = box.coords_[head];
    const auto u = static_cast<VertexId>(head);
    const int d1 = margin - c.level;
    DLVertex nb[4];
    int count = 0;
    if (d1 < total) {
      for (std::uint64_t bit = 0; bit < 2; ++bit) nb[count++] = {c.level - 1, (c.addr1 << 1) | bit, c.addr2 >> 1};
    }
    if (d1 > 0) {
      for (std::uint64_t bit = 0; bit < 2; ++bit) nb[count++] = {c.level + 1, c.addr1 >> 1, (c.addr2 << 1) | bit};
    }
    for (int i = 0; i < count; ++i) {
      const VertexId w = assign(nb[i]);
      if (!processed[w]) edges.push_back({u, w});
    }
    processed[u] = true;
  }
  if (box.coords_.size() != vertex_count) {
    throw StructuralViolation("build_dl_box: box is not connected");
  }
  box.graph_ = Graph(vertex_count, std::move(edges));

  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  for (std::uint64_t a = 0; a < 2 * half; ++a) {
    (a < half ? box.l1_ : box.l1_prime_).push_back(box.at({-n, a, 0}));
  }
  for (std::uint64_t x = half; x < 2 * half; ++x) box.l2_.push_back(box.at({0, 0, x}));
  for (int j = 0; j <= n; ++j) box.spine_.push_back({n + margin - j, 0});
  return box;
}

}  // namespace evenspace
