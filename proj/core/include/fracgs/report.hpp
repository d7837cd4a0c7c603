#pragma once

#include <string>
#include <vector>

namespace fracgs {

/// One named, falsifiable assertion with the number that decided it.
struct PropertyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  /// Short statement of the mathematical fact being certified.
  std::string anchor;
  std::string detail;
};

class PropertyLedger {
 public:
  const PropertyCheck& add(PropertyCheck check);
  /// passed iff value <= tolerance
  const PropertyCheck& at_most(std::string name, double value, double tolerance, std::string anchor,
                               std::string detail = {});
  /// passed iff value >= bound; stored tolerance is the bound
  const PropertyCheck& at_least(std::string name, double value, double bound, std::string anchor,
                                std::string detail = {});
  const PropertyCheck& holds(std::string name, bool ok, double value, std::string anchor,
                             std::string detail = {});
  /// Append every check of `other`, prefixing names with `prefix` + "/".
  void merge(const PropertyLedger& other, const std::string& prefix = {});

  bool all_passed() const noexcept;
  std::size_t failures() const noexcept;
  const std::vector<PropertyCheck>& checks() const noexcept { return checks_; }
  const PropertyCheck* find(const std::string& name) const noexcept;

 private:
  std::vector<PropertyCheck> checks_;
};

}  // namespace fracgs
