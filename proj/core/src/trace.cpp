#include "sap/trace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "sap/errors.hpp"

namespace sap {

void Trace::add(int trial, long long iteration, const std::string& metric, double value) {
  if (!std::isfinite(value))
    throw NumericalError("trace: non-finite value for metric '" + metric + "' at iteration " +
                         std::to_string(iteration));
  records_.push_back({trial, iteration, metric, value});
}

void Trace::append(const Trace& other) {
  records_.insert(records_.end(), other.records_.begin(), other.records_.end());
}

std::vector<std::pair<long long, double>> Trace::series(int trial,
                                                        const std::string& metric) const {
  std::vector<std::pair<long long, double>> out;
  for (const auto& r : records_)
    if (r.trial == trial && r.metric == metric) out.emplace_back(r.iteration, r.value);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<long long, double>> Trace::mean_series(const std::string& metric) const {
  std::map<long long, std::pair<double, int>> acc;
  std::set<int> trial_ids;
  for (const auto& r : records_) {
    if (r.metric != metric) continue;
    trial_ids.insert(r.trial);
    auto& slot = acc[r.iteration];
    slot.first += r.value;
    slot.second += 1;
  }
  std::vector<std::pair<long long, double>> out;
  const int k = static_cast<int>(trial_ids.size());
  for (const auto& [iter, slot] : acc)
    if (slot.second == k) out.emplace_back(iter, slot.first / k);
  return out;
}

std::vector<int> Trace::trials() const {
  std::set<int> ids;
  for (const auto& r : records_) ids.insert(r.trial);
  return {ids.begin(), ids.end()};
}

void Trace::write_csv(std::ostream& out) const {
  out << "trial,iteration,metric,value\n" << std::setprecision(17);
  for (const auto& r : records_)
    out << r.trial << ',' << r.iteration << ',' << r.metric << ',' << r.value << '\n';
}

Trace Trace::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "trial,iteration,metric,value")
    throw ValidationError("trace: bad CSV header, expected trial,iteration,metric,value");
  Trace t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    TraceRecord r;
    if (!std::getline(ls, field, ',')) throw ValidationError("trace: bad CSV row");
    r.trial = std::stoi(field);
    if (!std::getline(ls, field, ',')) throw ValidationError("trace: bad CSV row");
    r.iteration = std::stoll(field);
    if (!std::getline(ls, r.metric, ',')) throw ValidationError("trace: bad CSV row");
    if (!std::getline(ls, field)) throw ValidationError("trace: bad CSV row");
    r.value = std::stod(field);
    t.records_.push_back(std::move(r));
  }
  return t;
}

double fitted_decay_factor(const std::vector<std::pair<long long, double>>& series,
                           long long from, long long to) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long long count = 0;
  for (const auto& [k, v] : series) {
    if (k < from || k > to || v <= 0.0) continue;
    const double x = static_cast<double>(k);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw NumericalError("fitted_decay_factor: fewer than two usable points");
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) throw NumericalError("fitted_decay_factor: degenerate abscissae");
  const double slope = (count * sxy - sx * sy) / denom;
  return std::exp(slope);
}

}  // namespace sap
