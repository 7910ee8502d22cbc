#pragma once

#include <functional>
#include <string>

namespace swarm {

using WarningHandler = std::function<void(const std::string&)>;

// Emits a non-fatal diagnostic. The default handler prints to stderr;
// tests may install a collector. Thread-safe.
void warn(const std::string& message);

// Installs a new handler and returns the previous one. Passing nullptr
// restores the default stderr handler.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace swarm
