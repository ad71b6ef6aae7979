// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/harness/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace torusflow::harness {

/// Comma-delimited table with one header row.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Cells are strings or numbers; numbers print with 17 significant digits.
  class Row {
   public:
    Row& operator<<(const std::string& s);
    Row& operator<<(const char* s) { return *this << std::string(s); }
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(std::size_t v);

   private:
    friend class Table;
    std::vector<std::string> cells_;
  };

  Row& row();
  std::size_t size() const noexcept { return rows_.size(); }
  std::string csv() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

std::string format_number(double v);

/// A number a command reports, tagged with the law or check it measures.
struct Quantity {
  std::string law;
  std::string name;
  double value = 0.0;
};

struct CheckOutcome {
  Quantity quantity;
  Bound bound;
  bool pass = false;
};

/// Compares the acceptance bounds against the reported quantities. A bound on a quantity the
/// command did not report throws Config.
std::vector<CheckOutcome> evaluate_acceptance(const ExperimentConfig& c, const std::vector<Quantity>& reported);
/// law,quantity,value,relation,limit,status with status empty for quantities no bound mentions.
Table summary_table(const std::vector<Quantity>& reported, const std::vector<CheckOutcome>& checks);

}  // namespace torusflow::harness
