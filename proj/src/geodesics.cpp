#include "evenspace/geodesics.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace evenspace {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::no:
      return "false";
    case Verdict::yes:
      return "true";
    case Verdict::indeterminate:
      break;
  }
  return "indeterminate";
}

const std::vector<int>& BfsOracle::row(VertexId source) const {
  if (source >= view_.vertex_count()) throw std::out_of_range("BfsOracle: vertex out of range");
  {
    std::shared_lock lock(mutex_);
    if (auto it = rows_.find(source); it != rows_.end()) return *it->second;
  }
  auto computed = std::make_unique<const std::vector<int>>(bfs_distances(view_, source));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = rows_.try_emplace(source, std::move(computed));
  return *it->second;
}

DlMarginOracle::DlMarginOracle(const DLBox& base, std::optional<int> max_margin, std::size_t max_vertices)
    : base_(&base), max_margin_(max_margin.value_or(base.margin() + 1)), max_vertices_(max_vertices) {
  if (max_margin_ < base.margin()) throw std::invalid_argument("DlMarginOracle: max_margin below base margin");
  levels_.resize(static_cast<std::size_t>(max_margin_ - base.margin()) + 2);
}

const DlMarginOracle::Level& DlMarginOracle::level(std::size_t offset) const {
  {
    std::shared_lock lock(mutex_);
    if (levels_[offset]) return *levels_[offset];
  }
  std::unique_lock lock(mutex_);
  if (!levels_[offset]) {
    auto lv = std::make_unique<Level>();
    if (offset == 0) {
      lv->box = std::shared_ptr<const DLBox>(base_, [](const DLBox*) {});
    } else {
      lv->box = std::make_shared<const DLBox>(
          build_dl_box(base_->depth(), base_->margin() + static_cast<int>(offset), max_vertices_));
    }
    lv->oracle = std::make_unique<BfsOracle>(GraphView(lv->box->graph()));
    levels_[offset] = std::move(lv);
  }
  return *levels_[offset];
}

int DlMarginOracle::lifted_distance(std::size_t offset, VertexId u, VertexId v) const {
  const Level& lv = level(offset);
  if (offset == 0) return lv.oracle->row(u)[v];
  const VertexId lu = lv.box->at(base_->coords(u));
  const VertexId lv_id = lv.box->at(base_->coords(v));
  return lv.oracle->row(lu)[lv_id];
}

std::optional<int> DlMarginOracle::distance(VertexId u, VertexId v) const {
  if (u >= vertex_count() || v >= vertex_count()) throw std::out_of_range("DlMarginOracle: vertex out of range");
  if (u == v) return 0;
  int lower = lifted_distance(0, u, v);
  const std::size_t last = static_cast<std::size_t>(max_margin_ - base_->margin());
  for (std::size_t offset = 0; offset <= last; ++offset) {
    const int upper = lifted_distance(offset + 1, u, v);
    if (upper == lower) return lower;
    if (offset == 0) escalations_.fetch_add(1);
    lower = upper;
  }
  unstable_.fetch_add(1);
  return std::nullopt;
}

namespace {

template <class Expect>
Verdict check_pairs(const Cycle& c, const DistanceOracle& oracle, bool diagonal_only, Expect expected) {
  const std::size_t len = c.length();
  bool uncertain = false;
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = i + 1; j < len; ++j) {
      const std::size_t arc = j - i;
      if (diagonal_only && arc * 2 != len) continue;
      const auto d = oracle.distance(c[i], c[j]);
      if (!d) {
        uncertain = true;
      } else if (*d != expected(arc)) {
        return Verdict::no;
      }
    }
  }
  return uncertain ? Verdict::indeterminate : Verdict::yes;
}

}  // namespace

Verdict is_geodesic_cycle(const Cycle& c, const DistanceOracle& oracle) {
  const std::size_t len = c.length();
  return check_pairs(c, oracle, false, [len](std::size_t arc) { return static_cast<int>(std::min(arc, len - arc)); });
}

Verdict diagonal_criterion(const Cycle& c, const DistanceOracle& oracle) {
  const std::size_t len = c.length();
  if (len % 2 != 0) throw std::invalid_argument("diagonal_criterion: cycle length must be even");
  return check_pairs(c, oracle, true, [len](std::size_t) { return static_cast<int>(len / 2); });
}

GeodesicEnumeration enumerate_geodesic_cycles_through(const GraphView& gv, VertexId v, std::size_t max_len,
                                                      const DistanceOracle& oracle, std::size_t budget) {
  if (oracle.vertex_count() != gv.vertex_count()) {
    throw std::invalid_argument("enumerate_geodesic_cycles_through: oracle is over a different graph");
  }
  GeodesicEnumeration out;
  for (Cycle& c : enumerate_cycles_through(gv, v, max_len, budget)) {
    switch (is_geodesic_cycle(c, oracle)) {
      case Verdict::yes:
        out.geodesic.push_back(std::move(c));
        break;
      case Verdict::indeterminate:
        out.indeterminate.push_back(std::move(c));
        break;
      case Verdict::no:
        break;
    }
  }
  return out;
}

}  // namespace evenspace
