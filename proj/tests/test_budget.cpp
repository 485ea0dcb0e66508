#include <doctest.h>

#include "dpstore/budget.hpp"
#include "dpstore/errors.hpp"

using namespace dpstore;

TEST_CASE("sequential charges add up") {
  PrivacyBudget budget(Epsilon(1.0));
  budget = budget.charged("tree", Epsilon(0.3), CompositionKind::kSequential);
  budget = budget.charged("histogram", Epsilon(0.7), CompositionKind::kSequential);
  CHECK(budget.spent() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(budget.ledger().size() == 2);
}

TEST_CASE("parallel charges cost their maximum") {
  PrivacyBudget budget(Epsilon(0.7));
  budget = budget.charged("shard-a", Epsilon(0.3), CompositionKind::kParallel);
  budget = budget.charged("shard-b", Epsilon(0.7), CompositionKind::kParallel);
  CHECK(budget.spent() == 0.7);
}

TEST_CASE("over-budget charge names the label") {
  PrivacyBudget budget(Epsilon(0.4));
  try {
    budget.charged("greedy", Epsilon(0.5), CompositionKind::kSequential);
    FAIL("expected BudgetExceededError");
  } catch (const BudgetExceededError& e) {
    CHECK(e.label() == "greedy");
  }
}

TEST_CASE("re-summing the ledger reproduces spent exactly") {
  PrivacyBudget budget(Epsilon(2.0));
  budget = budget.charged("a", Epsilon(0.1), CompositionKind::kSequential);
  budget = budget.charged("b", Epsilon(0.25), CompositionKind::kSequential);
  budget = budget.charged("c", Epsilon(0.5), CompositionKind::kParallel);
  budget = budget.charged("d", Epsilon(0.4), CompositionKind::kParallel);

  double sequential = 0.0, parallel = 0.0;
  for (const BudgetCharge& charge : budget.ledger()) {
    if (charge.kind == CompositionKind::kSequential) sequential += charge.epsilon;
    else parallel = std::max(parallel, charge.epsilon);
  }
  CHECK(budget.spent() == sequential + parallel);
}

TEST_CASE("mixed composition respects the total") {
  PrivacyBudget budget(Epsilon(1.0));
  budget = budget.charged("seq", Epsilon(0.6), CompositionKind::kSequential);
  budget = budget.charged("par-1", Epsilon(0.4), CompositionKind::kParallel);
  CHECK_NOTHROW(budget.charged("par-2", Epsilon(0.35), CompositionKind::kParallel));
  CHECK_THROWS_AS(budget.charged("par-3", Epsilon(0.45), CompositionKind::kParallel),
                  BudgetExceededError);
  CHECK_THROWS_AS(Epsilon(0.0), ParameterError);
  CHECK_THROWS_AS(Epsilon(-1.0), ParameterError);
}
