#ifndef SAP_TRACE_HPP
#define SAP_TRACE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sap {

struct TraceRecord {
  int trial = 0;
  long long iteration = 0;
  std::string metric;
  double value = 0.0;
};

// Flat per-iteration metric log. Within a trial, iterations of one metric are
// strictly increasing; values are finite.
class Trace {
 public:
  void add(int trial, long long iteration, const std::string& metric, double value);
  void append(const Trace& other);

  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  // Values of one metric for one trial, ordered by iteration.
  std::vector<std::pair<long long, double>> series(int trial, const std::string& metric) const;
  // Mean over trials at each iteration index (only iterations present in
  // every trial are kept).
  std::vector<std::pair<long long, double>> mean_series(const std::string& metric) const;

  std::vector<int> trials() const;

  // CSV with the exact header "trial,iteration,metric,value".
  void write_csv(std::ostream& out) const;
  static Trace read_csv(std::istream& in);

 private:
  std::vector<TraceRecord> records_;
};

// Least-squares fit of log(value) against iteration over [from, to]; returns
// exp(slope), the per-iteration geometric decay factor. Non-positive values
// are skipped.
double fitted_decay_factor(const std::vector<std::pair<long long, double>>& series,
                           long long from, long long to);

}  // namespace sap

#endif
