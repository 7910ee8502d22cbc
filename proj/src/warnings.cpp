#include "swarm/warnings.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace swarm {

namespace {

std::mutex g_mutex;
WarningHandler g_handler;  // empty -> default stderr handler

}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_handler) {
    g_handler(message);
  } else {
    std::fprintf(stderr, "[swarm] warning: %s\n", message.c_str());
  }
}

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_mutex);
  WarningHandler previous = std::move(g_handler);
  g_handler = std::move(handler);
  return previous;
}

}  // namespace swarm
