#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evenspace/dl_box.hpp"
#include "evenspace/gf2.hpp"
#include "evenspace/graph.hpp"

namespace evenspace {

enum class Verdict { no, yes, indeterminate };

std::string_view to_string(Verdict v) noexcept;

// Graph distances between vertex ids of some host graph. nullopt means the
// oracle could not certify the value; kUnreachable means no path exists.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;
  virtual std::size_t vertex_count() const noexcept = 0;
  virtual std::optional<int> distance(VertexId u, VertexId v) const = 0;
};

// Exact BFS distances over the open edges of a view. One BFS row per source,
// computed on first use and cached; safe for concurrent readers.
class BfsOracle final : public DistanceOracle {
 public:
  explicit BfsOracle(GraphView gv) : view_(std::move(gv)) {}

  std::size_t vertex_count() const noexcept override { return view_.vertex_count(); }
  std::optional<int> distance(VertexId u, VertexId v) const override { return row(u)[v]; }

  // Shared BFS row from `source`; stays valid for the oracle's lifetime.
  const std::vector<int>& row(VertexId source) const;
  const GraphView& view() const noexcept { return view_; }

 private:
  GraphView view_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<VertexId, std::unique_ptr<const std::vector<int>>> rows_;
};

// Distances in the infinite DL(2,2) graph, estimated inside finite boxes.
// A distance between two vertices of `base` (margin m) is accepted when the
// boxes with margins m and m + 1 agree on it; otherwise the comparison moves
// to margins m + 1 and m + 2, and so on while the lower margin stays at or
// below `max_margin`. Pairs that never stabilize yield nullopt.
class DlMarginOracle final : public DistanceOracle {
 public:
  // max_margin defaults to base.margin() + 1. The base box must outlive the
  // oracle.
  explicit DlMarginOracle(const DLBox& base, std::optional<int> max_margin = std::nullopt,
                          std::size_t max_vertices = kDefaultDlVertexBudget);

  std::size_t vertex_count() const noexcept override { return base_->graph().vertex_count(); }
  std::optional<int> distance(VertexId u, VertexId v) const override;

  const DLBox& base() const noexcept { return *base_; }
  int max_margin() const noexcept { return max_margin_; }
  // Number of distance queries answered with nullopt.
  std::size_t unstable_count() const noexcept { return unstable_.load(); }
  // Number of queries that needed more than the first margin pair.
  std::size_t escalation_count() const noexcept { return escalations_.load(); }

 private:
  struct Level {
    std::shared_ptr<const DLBox> box;
    std::unique_ptr<BfsOracle> oracle;
  };

  // Distance between the lifted images of u and v in the box of margin
  // base.margin() + offset.
  int lifted_distance(std::size_t offset, VertexId u, VertexId v) const;
  const Level& level(std::size_t offset) const;

  const DLBox* base_;
  int max_margin_;
  std::size_t max_vertices_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::unique_ptr<Level>> levels_;
  mutable std::atomic<std::size_t> unstable_{0};
  mutable std::atomic<std::size_t> escalations_{0};
};

// Every pair of cycle vertices at arc distance a (a <= L/2) must be at graph
// distance a. A definite failure gives `no`; otherwise any uncertified
// distance gives `indeterminate`.
Verdict is_geodesic_cycle(const Cycle& c, const DistanceOracle& oracle);

// Antipodal pairs of an even cycle of length 2L must be at distance L.
// Throws std::invalid_argument for odd length.
Verdict diagonal_criterion(const Cycle& c, const DistanceOracle& oracle);

struct GeodesicEnumeration {
  std::vector<Cycle> geodesic;
  std::vector<Cycle> indeterminate;
};

// Cycles of gv through v of length <= max_len, split by the oracle's verdict.
// The oracle decides which notion of geodesy applies (ambient graph or gv).
GeodesicEnumeration enumerate_geodesic_cycles_through(const GraphView& gv, VertexId v, std::size_t max_len,
                                                      const DistanceOracle& oracle,
                                                      std::size_t budget = kDefaultCycleBudget);

}  // namespace evenspace
