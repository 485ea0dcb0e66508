#include "dpstore/budget.hpp"

#include <algorithm>
#include <cmath>

#include "dpstore/errors.hpp"

namespace dpstore {

Epsilon::Epsilon(double v) : value(v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError("epsilon must be positive and finite");
  }
}

double PrivacyBudget::spent() const {
  double sequential = 0.0;
  double parallel = 0.0;
  for (const BudgetCharge& charge : ledger_) {
    if (charge.kind == CompositionKind::kSequential) {
      sequential += charge.epsilon;
    } else {
      parallel = std::max(parallel, charge.epsilon);
    }
  }
  return sequential + parallel;
}

PrivacyBudget PrivacyBudget::charged(const std::string& label, Epsilon eps,
                                     CompositionKind kind) const {
  PrivacyBudget next = *this;
  next.ledger_.push_back({label, eps.value, kind});
  if (next.spent() > next.total_) {
    throw BudgetExceededError(label, eps.value, total_);
  }
  return next;
}

}  // namespace dpstore
