#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace acal {
class Service;
}

namespace acal::cli {

struct Hooks {
  // Called by `serve` once the port is bound, before blocking. Tests use it
  // to learn the port and to stop the server.
  std::function<void(Service&, int port)> on_listening;
};

/// Exit codes: 0 success, 1 runtime failure ("error: [stage] ..."), 2 usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace acal::cli
