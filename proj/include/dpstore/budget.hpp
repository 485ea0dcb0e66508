#pragma once

#include <string>
#include <vector>

namespace dpstore {

// Privacy budget, validated strictly positive and finite.
struct Epsilon {
  double value;

  explicit Epsilon(double v);
};

enum class CompositionKind { kSequential, kParallel };

struct BudgetCharge {
  std::string label;
  double epsilon;
  CompositionKind kind;
};

// Value-type budget accountant. Sequential charges add up; parallel charges
// (mechanisms over disjoint data) cost the maximum of their group. The spent
// amount is always recomputed from the ledger, never cached.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(Epsilon total) : total_(total.value) {}

  double total() const { return total_; }
  const std::vector<BudgetCharge>& ledger() const { return ledger_; }

  double spent() const;

  // Returns the budget with one more charge appended; throws
  // BudgetExceededError (naming the label) if the charge would overspend.
  PrivacyBudget charged(const std::string& label, Epsilon eps, CompositionKind kind) const;

 private:
  double total_;
  std::vector<BudgetCharge> ledger_;
};

inline PrivacyBudget budget_charge(const PrivacyBudget& budget, const std::string& label,
                                   Epsilon eps, CompositionKind kind) {
  return budget.charged(label, eps, kind);
}

}  // namespace dpstore
