#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ultrafractal {

/// Outcome of a verification pass over a finite fragment.
struct Report {
  std::string name;
  /// Human-readable description of the fragment that was checked.
  std::string scope;
  bool passed = true;
  std::size_t checked = 0;
  /// Suite-specific count (support size, net size, ...), when meaningful.
  std::optional<std::size_t> count;
  std::vector<std::string> failures;

  static constexpr std::size_t kMaxRecordedFailures = 16;

  explicit Report(std::string suite_name = {}, std::string checked_scope = {})
      : name(std::move(suite_name)), scope(std::move(checked_scope)) {}

  void fail(std::string message) {
    passed = false;
    if (failures.size() < kMaxRecordedFailures) failures.push_back(std::move(message));
  }

  /// Folds another report into this one.
  void absorb(const Report& other) {
    checked += other.checked;
    for (const auto& f : other.failures) fail(other.name.empty() ? f : other.name + ": " + f);
    if (!other.passed && other.failures.empty()) passed = false;
  }

  explicit operator bool() const noexcept { return passed; }
};

}  // namespace ultrafractal
