#pragma once

#include <string>
#include <vector>

namespace kinlab {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;   // measured quantities backing the verdict
    double seconds = 0.0;
};

// Run one of the ten release criteria (1-based index; throws on other values).
CriterionResult run_criterion(int index);

std::vector<CriterionResult> run_all_criteria();

}  // namespace kinlab
