#include "mboost/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mboost {

namespace {

const char* const kHeader = "t,j,r,gamma,alpha,s,g,mu,logF";

double parse_double(const std::string& tok) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw std::invalid_argument("bad number '" + tok + "' in trace");
  }
  return v;
}

std::string format_j(const IterationRecord& rec) {
  return rec.implicit ? "i" + std::to_string(rec.j) : std::to_string(rec.j);
}

void parse_j(const std::string& tok, IterationRecord& rec) {
  rec.implicit = !tok.empty() && tok.front() == 'i';
  const char* first = tok.data() + (rec.implicit ? 1 : 0);
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, rec.j);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument("bad column '" + tok + "'");
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double json_double(const nlohmann::json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  return std::string(buf, ptr);
}

TraceFormat parse_trace_format(const std::string& name) {
  if (name == "csv") return TraceFormat::Csv;
  if (name == "jsonl") return TraceFormat::Jsonl;
  throw std::invalid_argument("unknown trace format '" + name + "'");
}

void write_trace(std::ostream& out, const std::vector<IterationRecord>& records, TraceFormat format) {
  if (format == TraceFormat::Csv) {
    out << kHeader << '\n';
    for (const auto& rec : records) {
      out << rec.t << ',' << format_j(rec) << ',' << format_double(rec.r) << ','
          << format_double(rec.gamma) << ',' << format_double(rec.alpha) << ','
          << format_double(rec.s) << ',' << format_double(rec.g) << ',' << format_double(rec.mu)
          << ',' << format_double(rec.logF) << '\n';
    }
    return;
  }
  for (const auto& rec : records) {
    nlohmann::ordered_json obj;
    obj["t"] = rec.t;
    if (rec.implicit) {
      obj["j"] = format_j(rec);
    } else {
      obj["j"] = rec.j;
    }
    obj["r"] = json_number(rec.r);
    obj["gamma"] = json_number(rec.gamma);
    obj["alpha"] = json_number(rec.alpha);
    obj["s"] = json_number(rec.s);
    obj["g"] = json_number(rec.g);
    obj["mu"] = json_number(rec.mu);
    obj["logF"] = json_number(rec.logF);
    out << obj.dump() << '\n';
  }
}

std::vector<IterationRecord> read_trace(std::istream& in, TraceFormat format) {
  std::vector<IterationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  if (format == TraceFormat::Csv) {
    if (!std::getline(in, line) || line != kHeader) {
      throw std::invalid_argument("trace is missing the header row");
    }
    ++lineno;
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    IterationRecord rec;
    try {
      if (format == TraceFormat::Csv) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.size() != 9) throw std::invalid_argument("expected 9 fields");
        rec.t = std::stoull(fields[0]);
        parse_j(fields[1], rec);
        rec.r = parse_double(fields[2]);
        rec.gamma = parse_double(fields[3]);
        rec.alpha = parse_double(fields[4]);
        rec.s = parse_double(fields[5]);
        rec.g = parse_double(fields[6]);
        rec.mu = parse_double(fields[7]);
        rec.logF = parse_double(fields[8]);
      } else {
        const auto obj = nlohmann::json::parse(line);
        rec.t = obj.at("t").get<std::size_t>();
        const auto& j = obj.at("j");
        if (j.is_string()) {
          parse_j(j.get<std::string>(), rec);
        } else {
          rec.j = j.get<std::int64_t>();
        }
        rec.r = json_double(obj.at("r"));
        rec.gamma = json_double(obj.at("gamma"));
        rec.alpha = json_double(obj.at("alpha"));
        rec.s = json_double(obj.at("s"));
        rec.g = json_double(obj.at("g"));
        rec.mu = json_double(obj.at("mu"));
        rec.logF = json_double(obj.at("logF"));
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(rec);
  }
  return out;
}

void write_trace_file(const std::string& path, const std::vector<IterationRecord>& records,
                      TraceFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file " + path);
  write_trace(out, records, format);
  if (!out) throw std::runtime_error("error writing trace file " + path);
}

std::vector<IterationRecord> read_trace_file(const std::string& path, TraceFormat format) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trace file " + path);
  return read_trace(in, format);
}

bool same_record(const IterationRecord& a, const IterationRecord& b) {
  return a.t == b.t && a.j == b.j && a.implicit == b.implicit && same_double(a.r, b.r) &&
         same_double(a.gamma, b.gamma) && same_double(a.alpha, b.alpha) && same_double(a.s, b.s) &&
         same_double(a.g, b.g) && same_double(a.mu, b.mu) && same_double(a.logF, b.logF);
}

}  // namespace mboost
