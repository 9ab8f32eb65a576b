#pragma once

#include <sstream>

#include "acal/agents.hpp"

namespace acal {

// Shared prompt fragment: task id, claim and the numbered evidence context.
inline void append_task(std::ostringstream& os, const LegalTask& task) {
  if (!task.task_id.empty()) os << "Task: " << task.task_id << "\n";
  os << "Claim: " << task.claim << "\n";
  if (task.context.passages.empty()) {
    os << "Evidence: (none retrieved)\n";
    return;
  }
  os << "Evidence:\n";
  for (const auto& p : task.context.passages) {
    os << "[" << p.passage_id << "] " << p.text << "\n";
  }
}

}  // namespace acal
