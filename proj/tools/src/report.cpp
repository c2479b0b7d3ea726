#include "gapkin_cli/report.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>

namespace gapkin::cli {

std::string status_name(Status s)
{
  switch (s) {
  case Status::pass: return "pass";
  case Status::fail: return "fail";
  case Status::skipped: return "skipped";
  }
  return "?";
}

std::string num(double x)
{
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

bool RunReport::passed() const
{
  for (const auto& c : checks)
    if (!c.passed()) return false;
  return true;
}

namespace {

// JSON has no inf/nan; keep them readable as strings.
nlohmann::json jnum(double x)
{
  if (std::isfinite(x)) return x;
  return num(x);
}

} // namespace

std::string RunReport::to_json() const
{
  nlohmann::json j;
  j["command"] = command;
  j["experiment"] = experiment;
  j["status"] = passed() ? "pass" : "fail";
  j["environment"] = {{"version", GAPKIN_VERSION}, {"seed", seed}, {"threads", threads},
                      {"config_hash", config_hash}, {"grids", grids}};
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name},
                  {"value", jnum(c.value)},
                  {"tolerance", jnum(c.tolerance)},
                  {"status", status_name(c.status)},
                  {"detail", c.detail},
                  {"seconds", c.seconds}});
  j["checks"] = cs;
  nlohmann::json vs = nlohmann::json::object();
  for (const auto& [k, v] : values) vs[k] = jnum(v);
  j["values"] = vs;
  j["timings"] = timings;
  return j.dump(2) + "\n";
}

} // namespace gapkin::cli
