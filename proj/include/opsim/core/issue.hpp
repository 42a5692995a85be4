#pragma once

#include <string>
#include <vector>

namespace opsim {

/// A static defect in a model. `path` names the offending element
/// (`cell[0]`, `rule[2]`, `machine Ant/function wake`, ...) and `token` the
/// offending name, if any, so front ends can point at the exact source token.
struct Issue {
    std::string code;
    std::string message;
    std::string path;
    std::string token;
};

/// Throws ValidationError describing the first issue, if any.
void throw_if_issues(const std::vector<Issue>& issues);

}  // namespace opsim
