#include "symcover/ledger.hpp"

#include "symcover/common.hpp"

#include <cmath>

namespace symcover {

std::string to_string(Relation rel) {
  switch (rel) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::info: return "info";
  }
  return "?";
}

namespace {

Relation relation_from(const std::string& s) {
  if (s == "<=") return Relation::le;
  if (s == ">=") return Relation::ge;
  if (s == "info") return Relation::info;
  throw Error(ErrorKind::SchemaMismatch, "unknown ledger relation '" + s + "'");
}

// JSON has no infinity; store it as a string.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

}  // namespace

bool LedgerEntry::pass() const {
  switch (relation) {
    case Relation::le: return lhs <= rhs + slack;
    case Relation::ge: return lhs + slack >= rhs;
    case Relation::info: return true;
  }
  return false;
}

void BoundLedger::add(std::string name, double lhs, Relation rel, double rhs, double slack, std::string provenance) {
  entries_.push_back({std::move(name), lhs, rhs, rel, slack, std::move(provenance)});
}

void BoundLedger::append(const BoundLedger& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

bool BoundLedger::overall_pass() const {
  for (const auto& e : entries_) {
    if (!e.pass()) return false;
  }
  return true;
}

const LedgerEntry& BoundLedger::at(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::DomainError, "no ledger entry named " + name);
}

nlohmann::json BoundLedger::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries_) {
    list.push_back({{"name", e.name},
                    {"lhs", number(e.lhs)},
                    {"rhs", number(e.rhs)},
                    {"relation", to_string(e.relation)},
                    {"slack", number(e.slack)},
                    {"provenance", e.provenance},
                    {"pass", e.pass()}});
  }
  return {{"entries", list}, {"overall_pass", overall_pass()}};
}

BoundLedger BoundLedger::from_json(const nlohmann::json& j) {
  BoundLedger out;
  try {
    for (const auto& e : j.at("entries")) {
      out.add(e.at("name").get<std::string>(), number_from(e.at("lhs")), relation_from(e.at("relation").get<std::string>()),
              number_from(e.at("rhs")), number_from(e.at("slack")), e.at("provenance").get<std::string>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::SchemaMismatch, std::string("ledger JSON: ") + ex.what());
  }
  return out;
}

}  // namespace symcover
