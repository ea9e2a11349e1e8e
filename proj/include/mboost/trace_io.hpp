#pragma once

// Trace files: one record per line, fields t, j, r, gamma, alpha, s, g, mu, logF.
// CSV has a header row; JSONL has one object per line. Implicit columns are
// written as "i<index>" in the j field. Doubles are written in shortest
// round-trip form so a trace re-reads to identical records.

#include <iosfwd>
#include <string>
#include <vector>

#include "mboost/margin_core.hpp"

namespace mboost {

enum class TraceFormat { Csv, Jsonl };

TraceFormat parse_trace_format(const std::string& name);

void write_trace(std::ostream& out, const std::vector<IterationRecord>& records, TraceFormat format);
std::vector<IterationRecord> read_trace(std::istream& in, TraceFormat format);

void write_trace_file(const std::string& path, const std::vector<IterationRecord>& records,
                      TraceFormat format);
std::vector<IterationRecord> read_trace_file(const std::string& path, TraceFormat format);

/// Field-wise equality where NaN matches NaN.
bool same_record(const IterationRecord& a, const IterationRecord& b);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace mboost
