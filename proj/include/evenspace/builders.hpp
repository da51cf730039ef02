#pragma once

#include <cstddef>

#include "evenspace/graph.hpp"

namespace evenspace {

// rows x cols vertex grid, vertex (r, c) has id r * cols + c. For every vertex
// in row-major order the right edge (if any) precedes the down edge.
Graph build_grid_patch(std::size_t rows, std::size_t cols);

// Same numbering as the grid, with wrap-around edges. rows, cols >= 3.
Graph build_torus(std::size_t rows, std::size_t cols);

Graph build_triangle();
Graph build_complete(std::size_t n);
// `length` edges, length + 1 vertices numbered along the path.
Graph build_path(std::size_t length);
// `length` vertices, length >= 3.
Graph build_cycle(std::size_t length);
// K4 minus the edge {2,3}: vertices 0 and 1 joined by three internally
// disjoint paths.
Graph build_theta();
// Full binary tree of the given depth in heap order: root 0, children of v
// are 2v+1 and 2v+2.
Graph build_binary_tree(std::size_t depth);

}  // namespace evenspace
