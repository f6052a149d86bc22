#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gait/error.hpp"
#include "gait/io.hpp"

namespace gait {

std::string format_decimal(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string out(buf, static_cast<std::size_t>(n));
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::optional<double> parse_decimal(std::string_view f) {
  while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
  while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
    f.remove_suffix(1);
  }
  if (f.empty()) return std::nullopt;
  if (f.front() == '+') f.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) return std::nullopt;
  return v;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Calls row(fields, where) for every data line after checking the header.
template <typename Row>
void for_each_row(std::string_view text, std::string_view header,
                  const std::string& source, Row&& row) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = chomp(text.substr(pos, nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!have_header) {
      if (line != header) {
        fail_input(where + ": expected header '" + std::string(header) +
                   "', got '" + std::string(line) + "'");
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line);
    const std::size_t want =
        static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    if (fields.size() != want) {
      fail_input(where + ": expected " + std::to_string(want) +
                 " columns, got " + std::to_string(fields.size()));
    }
    row(fields, where);
  }
  if (!have_header) fail_input(source + ": empty file (missing header)");
}

double number(std::string_view f, const std::string& where) {
  const auto v = parse_decimal(f);
  if (!v) fail_input(where + ": '" + std::string(f) + "' is not a number");
  return *v;
}

}  // namespace

std::vector<ImuSample> parse_imu_csv(std::string_view text,
                                     const std::string& source,
                                     ParseReport* report) {
  ParseReport local;
  ParseReport& r = report ? *report : local;
  std::vector<ImuSample> out;
  for_each_row(text, kImuHeader, source, [&](const auto& f, const std::string& where) {
    ++r.rows;
    double v[7];
    for (std::size_t i = 0; i < 7; ++i) v[i] = number(f[i], where);
    for (double x : v) {
      if (!std::isfinite(x)) {
        ++r.dropped_nonfinite;
        return;
      }
    }
    const ImuSample s{v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6]}};
    if (auto msg = range_violation(s)) {
      ++r.rejected_range;
      r.messages.push_back(where + ": row rejected: " + *msg);
      return;
    }
    out.push_back(s);
  });
  return out;
}

std::vector<BendSample> parse_bend_csv(std::string_view text,
                                       const std::string& source,
                                       ParseReport* report) {
  ParseReport local;
  ParseReport& r = report ? *report : local;
  std::vector<BendSample> out;
  for_each_row(text, kBendHeader, source, [&](const auto& f, const std::string& where) {
    ++r.rows;
    const BendSample s{number(f[0], where), number(f[1], where)};
    if (!std::isfinite(s.t) || !std::isfinite(s.angle)) {
      ++r.dropped_nonfinite;
      return;
    }
    if (auto msg = range_violation(s)) {
      ++r.rejected_range;
      r.messages.push_back(where + ": row rejected: " + *msg);
      return;
    }
    out.push_back(s);
  });
  return out;
}

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path,
                                    ParseReport* report) {
  return parse_imu_csv(read_file(path), path.string(), report);
}

std::vector<BendSample> read_bend_csv(const std::filesystem::path& path,
                                      ParseReport* report) {
  return parse_bend_csv(read_file(path), path.string(), report);
}

namespace {

std::size_t index_field(std::string_view f, const std::string& where) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    fail_input(where + ": '" + std::string(f) + "' is not a step index");
  }
  return v;
}

Side side_field(std::string_view f, const std::string& where) {
  try {
    return parse_side(f);
  } catch (const Error& e) {
    fail_input(where + ": " + e.what());
  }
}

}  // namespace

std::vector<ReferenceStep> read_reference_csv(const std::filesystem::path& path) {
  std::vector<ReferenceStep> out;
  for_each_row(read_file(path), kReferenceHeader, path.string(),
               [&](const auto& f, const std::string& where) {
                 ReferenceStep r;
                 r.step_index = index_field(f[0], where);
                 r.side = side_field(f[1], where);
                 r.length_cm = number(f[2], where);
                 if (!(r.length_cm > 0.0) || !std::isfinite(r.length_cm)) {
                   fail_input(where + ": reference length must be positive");
                 }
                 out.push_back(r);
               });
  return out;
}

std::vector<TruthStep> read_truth_csv(const std::filesystem::path& path) {
  std::vector<TruthStep> out;
  for_each_row(read_file(path), kTruthHeader, path.string(),
               [&](const auto& f, const std::string& where) {
                 TruthStep s;
                 s.index = index_field(f[0], where);
                 s.side = side_field(f[1], where);
                 s.length = number(f[2], where);
                 s.angles = {number(f[3], where), number(f[4], where),
                             number(f[5], where), number(f[6], where)};
                 s.measured = s.angles;
                 s.t_front = number(f[7], where);
                 s.t_back = number(f[8], where);
                 out.push_back(s);
               });
  return out;
}

std::string format_imu_csv(const std::vector<ImuSample>& samples) {
  std::string out(kImuHeader);
  out += '\n';
  for (const ImuSample& s : samples) {
    out += format_decimal(s.t);
    for (double v : s.accel) out += ',' + format_decimal(v);
    for (double v : s.gyro) out += ',' + format_decimal(v);
    out += '\n';
  }
  return out;
}

std::string format_bend_csv(const std::vector<BendSample>& samples) {
  std::string out(kBendHeader);
  out += '\n';
  for (const BendSample& s : samples) {
    out += format_decimal(s.t) + ',' + format_decimal(s.angle) + '\n';
  }
  return out;
}

std::string format_reference_csv(const std::vector<ReferenceStep>& refs) {
  std::string out(kReferenceHeader);
  out += '\n';
  for (const ReferenceStep& r : refs) {
    out += std::to_string(r.step_index) + ',' + std::string(to_string(r.side)) +
           ',' + format_decimal(r.length_cm) + '\n';
  }
  return out;
}

std::string format_truth_csv(const std::vector<TruthStep>& steps) {
  std::string out(kTruthHeader);
  out += '\n';
  for (const TruthStep& s : steps) {
    out += std::to_string(s.index) + ',' + std::string(to_string(s.side));
    for (double v : {s.length, s.angles.alpha_f, s.angles.beta_f,
                     s.angles.alpha_b, s.angles.beta_b, s.t_front, s.t_back}) {
      out += ',' + format_decimal(v);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_input("cannot write " + path.string());
  out << text;
  if (!out) fail_input("failed writing " + path.string());
}

TrialFiles trial_files(const std::filesystem::path& dir,
                       const std::string& trial) {
  TrialFiles f;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const std::string side = leg == 0 ? "L" : "R";
    f.imu[leg] = dir / (trial + "_" + side + "_imu.csv");
    f.bend[leg] = dir / (trial + "_" + side + "_bend.csv");
  }
  f.reference = dir / (trial + "_ref.csv");
  f.truth = dir / (trial + "_truth.csv");
  return f;
}

LoadedTrial load_trial(const TrialFiles& files) {
  LoadedTrial t;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    t.streams.imu[leg] = read_imu_csv(files.imu[leg], &t.report);
    t.streams.bend[leg] = read_bend_csv(files.bend[leg], &t.report);
  }
  if (!files.reference.empty() && std::filesystem::exists(files.reference)) {
    t.references = read_reference_csv(files.reference);
  }
  return t;
}

void save_trial(const TrialFiles& files, const RawTrial& raw,
                const GroundTruth& truth) {
  for (std::size_t leg = 0; leg < 2; ++leg) {
    write_text(files.imu[leg], format_imu_csv(raw.imu[leg]));
    write_text(files.bend[leg], format_bend_csv(raw.bend[leg]));
  }
  write_text(files.reference, format_reference_csv(truth.references()));
  write_text(files.truth, format_truth_csv(truth.steps));
}

}  // namespace gait
