#pragma once

#include <string>
#include <vector>

namespace relfeat {

/// Run one CLI invocation. Returns 0 on success, 1 on a domain error
/// (one-line machine-parsable code on stderr), 2 on a usage error.
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace relfeat
