#pragma once

#include "isac/channel.hpp"
#include "isac/inner.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace isac {

struct SubCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CriterionResult {
    int id = 0;
    std::string tag;
    std::string title;
    std::vector<SubCheck> checks;
    double seconds = 0.0;

    bool pass() const;
};

struct AcceptanceOptions {
    std::vector<std::string> only;  // tags or criterion numbers; empty runs all
    Example4Constants example4;     // perturb to exercise the failure path
    SweepGrid grid;
    unsigned threads = 0;
    std::function<void(const CriterionResult&)> on_result;
};

struct CriterionInfo {
    int id;
    std::string tag;
    std::string title;
};

const std::vector<CriterionInfo>& acceptance_criteria();

// Throws UsageError for an unknown --only selector.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// One line per criterion; failing sub-checks are listed beneath when verbose is false.
void print_result(std::ostream& os, const CriterionResult& r, bool verbose = false);

}  // namespace isac
