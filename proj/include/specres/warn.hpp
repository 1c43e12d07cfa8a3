#pragma once

#include <iostream>
#include <mutex>
#include <set>
#include <string>

namespace specres {

// Advisory diagnostics (guarantee preconditions violated, degenerate inputs
// nudged, ...) are emitted at most once per tag per process, so that a
// 10^4-trial sweep cannot flood stderr.
inline void warn_once(const std::string& tag, const std::string& message) {
  static std::mutex mu;
  static std::set<std::string> seen;
  const std::lock_guard<std::mutex> lock(mu);
  if (seen.insert(tag).second) std::cerr << "specres: warning: " << message << std::endl;
}

}  // namespace specres
