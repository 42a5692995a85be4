#include "opsim/core/issue.hpp"

#include "opsim/core/error.hpp"

namespace opsim {

void throw_if_issues(const std::vector<Issue>& issues) {
    if (issues.empty()) return;
    const Issue& first = issues.front();
    throw ValidationError(first.code + " at " + first.path + ": " + first.message);
}

}  // namespace opsim
