#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace symcover {

/// `info` rows are recorded for reference and never fail.
enum class Relation { le, ge, info };

struct LedgerEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::le;
  double slack = 0.0;  // tolerated violation, e.g. 3 combined standard errors
  std::string provenance;

  bool pass() const;
};

/// Named inequality evaluations with an audit trail.
class BoundLedger {
 public:
  void add(LedgerEntry entry) { entries_.push_back(std::move(entry)); }
  void add(std::string name, double lhs, Relation rel, double rhs, double slack, std::string provenance);
  void append(const BoundLedger& other);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  bool overall_pass() const;
  /// Entry by name; throws DomainError when absent.
  const LedgerEntry& at(const std::string& name) const;

  nlohmann::json to_json() const;
  static BoundLedger from_json(const nlohmann::json& j);

 private:
  std::vector<LedgerEntry> entries_;
};

std::string to_string(Relation rel);

}  // namespace symcover
