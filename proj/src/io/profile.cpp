#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gait/error.hpp"
#include "gait/io.hpp"

namespace gait {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Entry {
  std::string value;
  std::string where;
};

double real(const Entry& e, const std::string& key) {
  const auto v = parse_decimal(e.value);
  if (!v || !std::isfinite(*v)) {
    fail_input(e.where + ": " + key + " = '" + e.value + "' is not a number");
  }
  return *v;
}

std::size_t count(const Entry& e, const std::string& key) {
  std::size_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end || v == 0) {
    fail_input(e.where + ": " + key + " = '" + e.value +
               "' is not a positive integer");
  }
  return v;
}

constexpr const char* kKnownKeys[] = {
    "l1_cm", "l2_cm", "d5_cm", "madgwick_beta", "downsample_imu",
    "downsample_bend", "refractory_s", "prominence_deg", "asym_threshold_pct",
    "rls_lambda", "rls_p0", "mounting_axis", "fitted_l1_cm", "fitted_l2_cm",
    "fitted_d5_cm", "bias_alpha_f_deg", "bias_beta_f_deg", "bias_alpha_b_deg",
    "bias_beta_b_deg"};

bool known(const std::string& key) {
  for (const char* k : kKnownKeys) {
    if (key == k) return true;
  }
  return false;
}

}  // namespace

SubjectProfile parse_profile(std::string_view text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail_input(where + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known(key)) fail_input(where + ": unknown key '" + key + "'");
    if (value.empty()) fail_input(where + ": empty value for " + key);
    if (entries.count(key)) fail_input(where + ": duplicate key " + key);
    entries[key] = {value, where};
  }

  SubjectProfile p;
  auto get = [&](const char* key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  for (const char* key : {"l1_cm", "l2_cm", "d5_cm"}) {
    if (!get(key)) fail_input(source + ": missing required key " + key);
  }
  p.nominal = {real(*get("l1_cm"), "l1_cm"), real(*get("l2_cm"), "l2_cm"),
               real(*get("d5_cm"), "d5_cm")};

  const Entry* f1 = get("fitted_l1_cm");
  const Entry* f2 = get("fitted_l2_cm");
  const Entry* f3 = get("fitted_d5_cm");
  if (f1 || f2 || f3) {
    if (!(f1 && f2 && f3)) {
      fail_input(source + ": fitted_l1_cm, fitted_l2_cm and fitted_d5_cm "
                 "must be given together");
    }
    p.fitted = StaticParams{real(*f1, "fitted_l1_cm"), real(*f2, "fitted_l2_cm"),
                            real(*f3, "fitted_d5_cm")};
  }

  const char* bias_keys[] = {"bias_alpha_f_deg", "bias_beta_f_deg",
                             "bias_alpha_b_deg", "bias_beta_b_deg"};
  bool any_bias = false;
  for (const char* k : bias_keys) any_bias = any_bias || get(k);
  if (any_bias) {
    AngleBias b;
    double* fields[] = {&b.alpha_f, &b.beta_f, &b.alpha_b, &b.beta_b};
    for (std::size_t i = 0; i < 4; ++i) {
      if (const Entry* e = get(bias_keys[i])) *fields[i] = real(*e, bias_keys[i]);
    }
    p.bias = b;
  }

  if (const Entry* e = get("madgwick_beta")) p.madgwick_beta = real(*e, "madgwick_beta");
  if (const Entry* e = get("downsample_imu")) p.downsample_imu = count(*e, "downsample_imu");
  if (const Entry* e = get("downsample_bend")) p.downsample_bend = count(*e, "downsample_bend");
  if (const Entry* e = get("refractory_s")) p.refractory_s = real(*e, "refractory_s");
  if (const Entry* e = get("prominence_deg")) p.prominence_deg = real(*e, "prominence_deg");
  if (const Entry* e = get("asym_threshold_pct")) {
    p.asym_threshold_pct = real(*e, "asym_threshold_pct");
  }
  if (const Entry* e = get("rls_lambda")) p.rls_lambda = real(*e, "rls_lambda");
  if (const Entry* e = get("rls_p0")) p.rls_p0 = real(*e, "rls_p0");
  if (const Entry* e = get("mounting_axis")) {
    try {
      p.mounting = parse_mounting(e->value);
    } catch (const Error& err) {
      fail_input(e->where + ": " + err.what());
    }
  }
  try {
    p.validate();
  } catch (const Error& err) {
    fail_input(source + ": " + err.what());
  }
  return p;
}

SubjectProfile read_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot open profile " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str(), path.string());
}

void SubjectProfile::validate() const {
  gait::validate(nominal);
  if (fitted) {
    gait::validate(*fitted);
    const double n[3] = {nominal.l1, nominal.l2, nominal.d5};
    const double f[3] = {fitted->l1, fitted->l2, fitted->d5};
    const char* names[3] = {"l1", "l2", "d5"};
    for (std::size_t i = 0; i < 3; ++i) {
      const double half = kCalibrationBoxFraction * std::abs(n[i]);
      if (std::abs(f[i] - n[i]) > half + 1e-6) {
        std::ostringstream os;
        os << "fitted " << names[i] << " = " << f[i]
           << " cm lies outside the calibration box [" << n[i] - half << ", "
           << n[i] + half << "]";
        fail_input(os.str());
      }
    }
  }
  if (!(madgwick_beta > 0.0)) fail_input("madgwick_beta must be > 0");
  if (!(refractory_s > 0.0)) fail_input("refractory_s must be > 0");
  if (!(prominence_deg >= 0.0)) fail_input("prominence_deg must be >= 0");
  if (!(asym_threshold_pct > 0.0)) fail_input("asym_threshold_pct must be > 0");
  if (!(rls_lambda > 0.9 && rls_lambda <= 1.0)) {
    fail_input("rls_lambda must lie in (0.9, 1]");
  }
  if (!(rls_p0 > 0.0)) fail_input("rls_p0 must be > 0");
  pipeline_config().validate();
}

PipelineConfig SubjectProfile::pipeline_config() const {
  PipelineConfig c;
  c.params = active_params();
  c.bias = bias.value_or(AngleBias{});
  c.madgwick_beta = madgwick_beta;
  c.downsample_imu = downsample_imu;
  c.downsample_bend = downsample_bend;
  c.segmenter.minima.refractory_s = refractory_s;
  c.segmenter.minima.prominence_deg = prominence_deg;
  c.feedback.asym_threshold_pct = asym_threshold_pct;
  c.mounting = mounting;
  return c;
}

std::string format_profile(const SubjectProfile& p) {
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& v) {
    os << key << " = " << v << '\n';
  };
  line("l1_cm", format_decimal(p.nominal.l1));
  line("l2_cm", format_decimal(p.nominal.l2));
  line("d5_cm", format_decimal(p.nominal.d5));
  line("madgwick_beta", format_decimal(p.madgwick_beta));
  line("downsample_imu", std::to_string(p.downsample_imu));
  line("downsample_bend", std::to_string(p.downsample_bend));
  line("refractory_s", format_decimal(p.refractory_s));
  line("prominence_deg", format_decimal(p.prominence_deg));
  line("asym_threshold_pct", format_decimal(p.asym_threshold_pct));
  line("rls_lambda", format_decimal(p.rls_lambda));
  line("rls_p0", format_decimal(p.rls_p0));
  line("mounting_axis", std::string(to_string(p.mounting)));
  if (p.fitted) {
    line("fitted_l1_cm", format_decimal(p.fitted->l1));
    line("fitted_l2_cm", format_decimal(p.fitted->l2));
    line("fitted_d5_cm", format_decimal(p.fitted->d5));
  }
  if (p.bias) {
    line("bias_alpha_f_deg", format_decimal(p.bias->alpha_f));
    line("bias_beta_f_deg", format_decimal(p.bias->beta_f));
    line("bias_alpha_b_deg", format_decimal(p.bias->alpha_b));
    line("bias_beta_b_deg", format_decimal(p.bias->beta_b));
  }
  return os.str();
}

}  // namespace gait
