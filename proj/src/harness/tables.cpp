// SPDX-License-Identifier: Apache-2.0
#include "torusflow/harness/tables.hpp"

#include "torusflow/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace torusflow::harness {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table::Row& Table::Row::operator<<(const std::string& s) {
  cells_.push_back(s);
  return *this;
}
Table::Row& Table::Row::operator<<(double v) { return *this << format_number(v); }
Table::Row& Table::Row::operator<<(int v) { return *this << std::to_string(v); }
Table::Row& Table::Row::operator<<(std::size_t v) { return *this << std::to_string(v); }

Table::Row& Table::row() { return rows_.emplace_back(); }

std::string Table::csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) {
    if (r.cells_.size() != header_.size()) {
      throw Error(ErrorKind::InvalidArgument, "row has " + std::to_string(r.cells_.size()) + " cells, header has " +
                                                  std::to_string(header_.size()));
    }
    line(r.cells_);
  }
  return out;
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << csv();
}

std::vector<CheckOutcome> evaluate_acceptance(const ExperimentConfig& c, const std::vector<Quantity>& reported) {
  std::vector<CheckOutcome> out;
  for (const auto& [name, bound] : c.acceptance) {
    bool found = false;
    for (const auto& q : reported) {
      if (q.name != name) continue;
      found = true;
      const bool pass = bound.lower ? q.value >= bound.limit : q.value <= bound.limit;
      out.push_back({q, bound, pass});
    }
    if (!found) throw Error(ErrorKind::Config, "acceptance." + name + " names a quantity this run does not report");
  }
  return out;
}

Table summary_table(const std::vector<Quantity>& reported, const std::vector<CheckOutcome>& checks) {
  Table t({"law", "quantity", "value", "relation", "limit", "status"});
  for (const auto& q : reported) {
    auto& r = t.row();
    r << q.law << q.name << q.value;
    const CheckOutcome* hit = nullptr;
    for (const auto& c : checks) {
      if (c.quantity.name == q.name && c.quantity.law == q.law) hit = &c;
    }
    if (hit) {
      r << (hit->bound.lower ? ">=" : "<=") << hit->bound.limit << (hit->pass ? "pass" : "fail");
    } else {
      r << "" << "" << "";
    }
  }
  return t;
}

}  // namespace torusflow::harness
