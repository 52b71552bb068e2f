#include "sepmark/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace sepmark::log {

namespace {

Level parse_level(const char* value) {
  if (value == nullptr) return Level::Warn;
  std::string v(value);
  if (v == "error" || v == "0") return Level::Error;
  if (v == "warn" || v == "1") return Level::Warn;
  if (v == "info" || v == "2") return Level::Info;
  if (v == "debug" || v == "3") return Level::Debug;
  return Level::Warn;
}

const char* tag(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

std::mutex g_mutex;

}  // namespace

Level threshold() {
  static const Level level = parse_level(std::getenv("SEPMARK_LOG"));
  return level;
}

bool enabled(Level level) {
  return static_cast<int>(level) <= static_cast<int>(threshold());
}

void write(Level level, const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "sepmark [" << tag(level) << "] " << message << "\n";
}

}  // namespace sepmark::log
