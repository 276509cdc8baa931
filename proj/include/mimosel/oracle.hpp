#pragma once

#include <cstdint>
#include <functional>

#include "mimosel/interference_model.hpp"
#include "mimosel/selection.hpp"

namespace mimosel {

struct OracleConfig {
  std::uint64_t budget = 10'000'000;
  int threads = 1;
};

struct OracleResult {
  SelectionVector best;
  double sinr_db = 0.0;
  std::uint64_t candidates_evaluated = 0;
};

/// Closed-form number of distinct feasible selections (saturates at
/// UINT64_MAX).
std::uint64_t feasible_count(const SelectionMode& mode, const ArrayGeometry& geometry);

/// Throws BudgetExceeded when enumerating the mode would visit more than
/// budget candidates, InvalidArgument when M*N > 64.
void check_oracle_budget(const SelectionMode& mode, const ArrayGeometry& geometry,
                         std::uint64_t budget);

/// Visit every feasible selection exactly once, as a bit mask over the flat
/// index. Requires M*N <= 64. Throws BudgetExceeded when the enumeration
/// (before de-duplication) would exceed the budget.
void enumerate_feasible(const SelectionMode& mode, const ArrayGeometry& geometry,
                        const std::function<void(std::uint64_t)>& visit,
                        std::uint64_t budget = 10'000'000);

/// True when mask a reads lexicographically smaller than mask b as a bit
/// string with element 0 first.
bool mask_less(std::uint64_t a, std::uint64_t b) noexcept;

/// Best SINR over all feasible selections, lowest bit string on ties.
OracleResult exhaustive_optimum(const CovarianceModel& model, const SelectionMode& mode,
                                const OracleConfig& config = {});

}  // namespace mimosel
