#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace svi::cli {

struct CheckRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<CheckRow> checks;
    double seconds = 0.0;
    /// Wall-clock allowance; exceeding it fails the criterion.
    double budget_seconds = 0.0;
    /// Name of the check that best summarises the criterion.
    std::string key;
    /// Set when the criterion aborted with an exception.
    std::string error;

    bool pass() const;
    /// The first failing check, else the key check.
    const CheckRow* worst() const;
};

struct AcceptanceOptions {
    unsigned workers = 1;
    /// Scratch space for the determinism criterion.
    std::filesystem::path scratch;
    /// Criteria to run (1..9); empty runs all.
    std::vector<int> only;
};

/// Runs the acceptance criteria. Exceptions inside one criterion mark it failed and do
/// not stop the others.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

}  // namespace svi::cli
