// acceptance.hpp: the end-to-end acceptance criteria, runnable from tests and
// from `qndsim validate`.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qnd/cli/config.hpp"

namespace qnd::acceptance {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed{false};
    // Measured versus expected values; deterministic for fixed seeds.
    std::string detail;
    double budget_seconds{0};
    double elapsed_seconds{0};
    bool within_budget{true};
};

// Pinned settings: every criterion fixes its own parameters and seeds. The
// config only supplies the thread count and, for AC8, the command settings
// whose outputs must reproduce.
CriterionResult ac1_mean_relaxation(const cli::RunConfig& config);
CriterionResult ac2_survival_from_ground(const cli::RunConfig& config);
CriterionResult ac3_zeno_rates(const cli::RunConfig& config);
CriterionResult ac4_dwell_fractions(const cli::RunConfig& config);
CriterionResult ac5_engine_equivalence(const cli::RunConfig& config);
CriterionResult ac6_quasicontinuity(const cli::RunConfig& config);
CriterionResult ac7_invariants(const cli::RunConfig& config);
CriterionResult ac8_determinism(const cli::RunConfig& config);

// Partial Zeno ordering slowdown_k > 1 at the configured n_thermal.
CriterionResult zeno_ordering(const cli::RunConfig& config);

struct Criterion {
    std::string id;
    std::function<CriterionResult(const cli::RunConfig&)> run;
};

const std::vector<Criterion>& all_criteria();

// "AC1 PASS  title | detail"; the runtime is reported as within/over budget only,
// so the line is reproducible.
std::string format_line(const CriterionResult& result);

} // namespace qnd::acceptance
