#include "fracgs/report.hpp"

#include <algorithm>
#include <cmath>

namespace fracgs {

const PropertyCheck& PropertyLedger::add(PropertyCheck check) {
  checks_.push_back(std::move(check));
  return checks_.back();
}

const PropertyCheck& PropertyLedger::at_most(std::string name, double value, double tolerance,
                                             std::string anchor, std::string detail) {
  const bool ok = std::isfinite(value) && value <= tolerance;
  return add({std::move(name), ok, value, tolerance, std::move(anchor), std::move(detail)});
}

const PropertyCheck& PropertyLedger::at_least(std::string name, double value, double bound,
                                              std::string anchor, std::string detail) {
  const bool ok = std::isfinite(value) && value >= bound;
  return add({std::move(name), ok, value, bound, std::move(anchor), std::move(detail)});
}

const PropertyCheck& PropertyLedger::holds(std::string name, bool ok, double value,
                                           std::string anchor, std::string detail) {
  return add({std::move(name), ok, value, 0.0, std::move(anchor), std::move(detail)});
}

void PropertyLedger::merge(const PropertyLedger& other, const std::string& prefix) {
  for (PropertyCheck c : other.checks_) {
    if (!prefix.empty()) c.name = prefix + "/" + c.name;
    checks_.push_back(std::move(c));
  }
}

bool PropertyLedger::all_passed() const noexcept {
  return std::all_of(checks_.begin(), checks_.end(), [](const PropertyCheck& c) { return c.passed; });
}

std::size_t PropertyLedger::failures() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(checks_.begin(), checks_.end(), [](const PropertyCheck& c) { return !c.passed; }));
}

const PropertyCheck* PropertyLedger::find(const std::string& name) const noexcept {
  auto it = std::find_if(checks_.begin(), checks_.end(),
                         [&](const PropertyCheck& c) { return c.name == name; });
  return it == checks_.end() ? nullptr : &*it;
}

}  // namespace fracgs
