#pragma once

#include <map>
#include <string>
#include <vector>

namespace gapkin::cli {

enum class Status { pass, fail, skipped };

struct Check {
  std::string name;
  double value = 0;     // the headline measurement
  double tolerance = 0; // what it was compared against
  Status status = Status::fail;
  std::string detail;
  double seconds = 0;

  bool passed() const { return status != Status::fail; }
};

struct RunReport {
  std::string command;
  std::string experiment;
  std::string config_hash;
  unsigned long long seed = 0;
  int threads = 1;
  std::map<std::string, std::string> grids; // name -> "n x m x ..."
  std::vector<Check> checks;
  std::map<std::string, double> values; // extra scalar results
  std::map<std::string, double> timings;

  bool passed() const;
  std::string to_json() const;
};

std::string status_name(Status s);

//! Shortest round-trip decimal form of a double.
std::string num(double x);

} // namespace gapkin::cli
