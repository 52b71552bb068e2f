#pragma once

#include <sstream>
#include <string>

namespace sepmark::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold comes from the SEPMARK_LOG environment variable
// ("error" | "warn" | "info" | "debug" or a digit 0-3); default is warn.
Level threshold();
bool enabled(Level level);
void write(Level level, const std::string& message);

template <class... Args>
void error(Args&&... args) {
  if (!enabled(Level::Error)) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::Error, os.str());
}

template <class... Args>
void warn(Args&&... args) {
  if (!enabled(Level::Warn)) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::Warn, os.str());
}

template <class... Args>
void info(Args&&... args) {
  if (!enabled(Level::Info)) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::Info, os.str());
}

template <class... Args>
void debug(Args&&... args) {
  if (!enabled(Level::Debug)) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::Debug, os.str());
}

}  // namespace sepmark::log
