#pragma once

#include <cstdint>

namespace dpstore {

// Geometry of a complete k-ary tree over a domain padded up to the next power
// of the arity. `height` counts levels below the root, so the tree has
// height + 1 levels and padded_domain = arity^height leaves.
struct KaryShape {
  uint32_t arity = 2;
  uint32_t height = 1;
  uint64_t padded_domain = 2;
  uint64_t node_count = 3;

  // Nodes per level and level offsets in a level-order layout.
  uint64_t level_width(uint32_t level) const;
  uint64_t level_offset(uint32_t level) const;
  // Width of the domain range covered by one node at `level`.
  uint64_t span_at(uint32_t level) const;

  // domain >= 1, arity >= 2. The node count is obtained by constructing the
  // tree level by level, not from a closed-form expression.
  static KaryShape over(uint64_t domain, uint32_t arity);
};

}  // namespace dpstore
