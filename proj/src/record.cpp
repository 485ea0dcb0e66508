#include "dpstore/record.hpp"

#include "dpstore/errors.hpp"

namespace dpstore {

Histogram histogram_of(const Database& db) {
  Histogram hist(db.domain_size, 0);
  for (const KeyedRecord& r : db.records) {
    if (r.key < 1 || r.key > db.domain_size) {
      throw ParameterError("record key outside domain [1, N]");
    }
    ++hist[r.key - 1];
  }
  return hist;
}

}  // namespace dpstore
