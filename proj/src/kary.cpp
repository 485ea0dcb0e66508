#include "dpstore/kary.hpp"

#include "dpstore/errors.hpp"

namespace dpstore {

uint64_t KaryShape::level_width(uint32_t level) const {
  uint64_t w = 1;
  for (uint32_t d = 0; d < level; ++d) w *= arity;
  return w;
}

uint64_t KaryShape::level_offset(uint32_t level) const {
  uint64_t off = 0, w = 1;
  for (uint32_t d = 0; d < level; ++d) {
    off += w;
    w *= arity;
  }
  return off;
}

uint64_t KaryShape::span_at(uint32_t level) const {
  uint64_t s = 1;
  for (uint32_t d = level; d < height; ++d) s *= arity;
  return s;
}

KaryShape KaryShape::over(uint64_t domain, uint32_t arity) {
  if (domain < 1) throw ParameterError("tree domain must be at least 1");
  if (arity < 2) throw ParameterError("tree arity must be at least 2");
  KaryShape shape;
  shape.arity = arity;
  shape.height = 1;
  shape.padded_domain = arity;
  while (shape.padded_domain < domain) {
    shape.padded_domain *= arity;
    ++shape.height;
  }
  shape.node_count = 0;
  uint64_t width = 1;
  for (uint32_t level = 0; level <= shape.height; ++level) {
    shape.node_count += width;
    width *= arity;
  }
  return shape;
}

}  // namespace dpstore
