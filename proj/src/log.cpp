#include "propdet/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace propdet::log {

namespace {
std::atomic<bool> g_quiet{false};
std::mutex g_mutex;
}  // namespace

void warn(std::string_view message) {
  if (g_quiet) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "warning: " << message << '\n';
}

void info(std::string_view message) {
  if (g_quiet) return;
  std::lock_guard lock(g_mutex);
  std::cerr << message << '\n';
}

void set_quiet(bool quiet) { g_quiet = quiet; }

}  // namespace propdet::log
