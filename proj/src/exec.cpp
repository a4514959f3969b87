#include "formcount/exec.hpp"

#include <iostream>
#include <string>

#include "formcount/errors.hpp"

namespace formcount {

void check_guard(double cost, double limit, const ExecPolicy& policy, std::string_view what) {
    if (cost <= limit) return;
    if (!policy.unsafe_guard) throw GuardExceeded(std::string(what), cost, limit);
    std::clog << "warning: " << what << ": guard overridden, estimated cost " << cost << " exceeds " << limit << '\n';
}

}  // namespace formcount
