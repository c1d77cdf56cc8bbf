#include "moltiming/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "moltiming/analysis.hpp"
#include "moltiming/detectors.hpp"
#include "moltiming/error.hpp"
#include "moltiming/montecarlo.hpp"

namespace moltiming::cli {

namespace {

namespace mc = moltiming::montecarlo;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, std::string, double, long long>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Options {
  std::optional<double> c;
  double delta = 1.0;
  std::string m = "1";
  int bits = 1;
  std::string detector = "fa";
  std::string trials = "1e6";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int fig = 0;
  std::string preset;
  std::optional<double> tol_x;
  std::optional<double> tol_f;
  int threads = 0;
  bool mc = false;
  std::string vary = "delta";
  std::string grid;
  double target = 0.01;
};

std::string csv_field(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
  if (std::holds_alternative<long long>(cell)) return std::to_string(std::get<long long>(cell));
  if (!std::holds_alternative<std::string>(cell)) return "";
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

void write_table(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, std::monostate>) {
                obj[t.columns[i]] = nullptr;
              } else {
                obj[t.columns[i]] = v;
              }
            },
            row[i]);
      }
      rows.push_back(std::move(obj));
    }
    os << rows.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
}

void emit(const Table& t, const Options& o, std::ostream& out) {
  if (o.out.empty() || o.out == "-") {
    write_table(t, o.format, out);
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw IoError("cannot open " + o.out + " for writing");
  write_table(t, o.format, file);
  file.close();
  if (!file) throw IoError("failed writing " + o.out);
}

std::uint64_t parse_trials(const std::string& text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !(v >= 1.0) || v != std::floor(v) ||
      v > 1e15) {
    throw UsageError("--trials must be a positive integer, got " + text);
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<int> parse_counts(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_number_list(text)) {
    if (v < 1.0) throw UsageError(std::string(what) + " must be ≥ 1");
    if (v != std::floor(v) || v > 2147483647.0) {
      throw UsageError(std::string(what) + " must be an integer, got " + format_double(v));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

channels::ChannelSpec preset_channel(const std::string& name) {
  const auto presets = load_presets();
  const auto it = presets.find(name);
  if (it == presets.end()) throw UsageError("unknown channel preset " + name);
  return it->second;
}

double resolve_c(const Options& o) {
  double c = 0.0;
  if (o.c) {
    c = *o.c;
  } else if (!o.preset.empty()) {
    c = preset_channel(o.preset).levy().c;
  } else {
    throw UsageError("give --c or --channel-preset");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("c must be positive");
  return c;
}

void check_delta(const Options& o) {
  if (!(o.delta > 0.0) || !std::isfinite(o.delta)) throw UsageError("delta must be positive");
}

std::string series_label(std::string_view detector, int m, std::optional<int> bits = {}) {
  std::string label = std::string(detector) + "[M=" + std::to_string(m);
  if (bits) label += ",L=" + std::to_string(*bits);
  return label + "]";
}

struct Series {
  mc::SweepSpec spec;
  std::string label;
};

Table sweep_table(const std::vector<Series>& series, std::ostream& err, bool& failed) {
  Table t{{"param", "value", "detector", "p_hat", "ci_lo", "ci_hi", "trials", "seed"}, {}};
  for (const auto& s : series) {
    for (const auto& r : mc::sweep(s.spec)) {
      std::vector<Cell> row{std::string(mc::to_string(s.spec.vary)), r.value, s.label};
      if (r.stats) {
        row.insert(row.end(), {r.stats->p_hat, r.stats->ci_lo, r.stats->ci_hi,
                               static_cast<long long>(r.stats->trials)});
      } else {
        failed = true;
        err << "error at " << s.label << ' ' << mc::to_string(s.spec.vary) << '='
            << format_double(r.value) << ": " << r.error << '\n';
        row.insert(row.end(), {std::monostate{}, std::monostate{}, std::monostate{},
                               static_cast<long long>(s.spec.trials)});
      }
      row.emplace_back(static_cast<long long>(s.spec.seed));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

mc::SweepSpec base_spec(const Options& o) {
  mc::SweepSpec spec;
  spec.trials = parse_trials(o.trials);
  spec.seed = o.seed;
  spec.threads = o.threads;
  return spec;
}

mc::SweepAxis parse_axis(const std::string& name) {
  for (auto a : {mc::SweepAxis::delta, mc::SweepAxis::m, mc::SweepAxis::c, mc::SweepAxis::velocity,
                 mc::SweepAxis::bits}) {
    if (mc::to_string(a) == name) return a;
  }
  throw UsageError("unknown sweep axis " + name);
}

mc::DetectorKind parse_kind(const std::string& name) {
  const auto kind = mc::parse_detector(name);
  if (!kind) throw UsageError("unknown detector " + name);
  return *kind;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// Figure recipes. Figures 4, 5, 7 and 8 are simulated; figure 6 is closed form.
std::vector<Series> figure_series(int fig, const Options& o) {
  std::vector<Series> out;
  const auto add = [&](mc::DetectorKind kind, mc::SweepAxis axis, std::vector<double> grid,
                       double c, double delta, int m, int bits, std::string label) {
    Series s{base_spec(o), std::move(label)};
    s.spec.detector = kind;
    s.spec.vary = axis;
    s.spec.grid = std::move(grid);
    s.spec.fixed.c = c;
    s.spec.fixed.delta = delta;
    s.spec.fixed.m = m;
    s.spec.fixed.bits = bits;
    out.push_back(std::move(s));
  };
  switch (fig) {
    case 4:
      for (auto kind : {mc::DetectorKind::ml, mc::DetectorKind::fa, mc::DetectorKind::linear}) {
        for (int m : {1, 2, 3}) {
          add(kind, mc::SweepAxis::delta, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}, 1.0, 1.0, m, 1,
              series_label(mc::to_string(kind), m));
        }
      }
      break;
    case 5:
      for (auto kind : {mc::DetectorKind::ml, mc::DetectorKind::fa, mc::DetectorKind::linear}) {
        Series s{base_spec(o), std::string(mc::to_string(kind))};
        s.spec.detector = kind;
        s.spec.vary = mc::SweepAxis::m;
        s.spec.grid = {1, 2, 5, 10, 20, 50, 100};
        s.spec.fixed.c = 2.0;
        s.spec.fixed.delta = 0.5;
        out.push_back(std::move(s));
      }
      break;
    case 7:
      for (auto [m, bits] : {std::pair{25, 3}, std::pair{90, 4}, std::pair{350, 5}}) {
        add(mc::DetectorKind::gray_fa, mc::SweepAxis::delta, {1.0, 2.0, 3.0, 4.0, 5.0}, 1.0, 1.0, m,
            bits, series_label("gray-fa", m, bits));
      }
      break;
    case 8:
      for (auto kind : {mc::DetectorKind::ig_ml, mc::DetectorKind::ig_fa, mc::DetectorKind::ig_linear}) {
        Series s{base_spec(o), series_label(mc::to_string(kind), 4)};
        s.spec.channel = preset_channel("fig8");
        s.spec.detector = kind;
        s.spec.vary = mc::SweepAxis::velocity;
        s.spec.grid = {0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
        s.spec.fixed.delta = 1.0;
        s.spec.fixed.m = 4;
        out.push_back(std::move(s));
      }
      break;
    default:
      throw UsageError("--fig must be one of 4, 5, 6, 7, 8");
  }
  return out;
}

Table figure6_table() {
  Table t{{"param", "value", "series", "required_m"}, {}};
  for (double c : {0.5, 1.0, 2.0}) {
    for (double delta : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
      const int m = mc::required_m(c, delta, 0.01);
      t.rows.push_back({std::string("delta"), delta, "c=" + format_double(c), static_cast<long long>(m)});
    }
  }
  return t;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  const double c = resolve_c(o);
  check_delta(o);
  Table t{{"m", "theta"}, {}};
  for (int m : parse_counts(o.m, "M")) {
    t.rows.push_back({static_cast<long long>(m), detectors::fa_threshold(c, o.delta, m)});
  }
  emit(t, o, out);
  return ok;
}

int cmd_pe(const Options& o, std::ostream& out, std::ostream& err) {
  check_delta(o);
  const auto ms = parse_counts(o.m, "M");
  if (o.bits < 1 || o.bits > 30) throw UsageError("--bits must lie in [1, 30]");
  if (o.mc) {
    const std::string name = o.detector == "ml-single" ? "ml" : o.detector;
    const auto kind = parse_kind(name);
    Series s{base_spec(o), std::string(mc::to_string(kind))};
    s.spec.detector = kind;
    s.spec.vary = mc::SweepAxis::m;
    for (int m : ms) s.spec.grid.push_back(m);
    std::sort(s.spec.grid.begin(), s.spec.grid.end());
    s.spec.grid.erase(std::unique(s.spec.grid.begin(), s.spec.grid.end()), s.spec.grid.end());
    s.spec.fixed.delta = o.delta;
    s.spec.fixed.bits = o.bits;
    if (mc::uses_inverse_gaussian(kind)) {
      if (o.preset.empty()) throw UsageError("inverse Gaussian detectors need --channel-preset");
      s.spec.channel = preset_channel(o.preset);
      if (!s.spec.channel.has_drift()) throw UsageError("preset " + o.preset + " has no drift");
    } else {
      s.spec.fixed.c = resolve_c(o);
    }
    bool failed = false;
    emit(sweep_table({s}, err, failed), o, out);
    return failed ? numeric : ok;
  }

  const double c = resolve_c(o);
  Table t{{"name", "value"}, {}};
  if (o.detector == "ml-single") {
    t.rows.push_back({std::string("pe_ml_single"), analysis::pe_ml_single(c, o.delta)});
  } else if (o.detector == "fa" || o.detector == "linear") {
    for (int m : ms) {
      const double pe = o.detector == "fa" ? analysis::pe_fa(c, o.delta, m)
                                           : analysis::pe_linear(c, o.delta, m);
      t.rows.push_back({series_label("pe_" + o.detector, m), pe});
    }
  } else if (o.detector == "gray-fa") {
    for (int m : ms) {
      const auto g = analysis::pe_gray(c, o.delta, o.bits, m);
      if (g.clamped) err << "warning: pe_gray clamped at the random-guess ceiling\n";
      t.rows.push_back({series_label("pe_gray", m, o.bits), g.value});
    }
  } else {
    parse_kind(o.detector);
    throw UsageError("detector " + o.detector + " has no closed form; add --mc");
  }
  emit(t, o, out);
  return ok;
}

int cmd_exponent(const Options& o, std::ostream& out) {
  const double c = resolve_c(o);
  check_delta(o);
  analysis::ChernoffTolerance tol;
  if (o.tol_x) tol.s_abs = *o.tol_x;
  if (o.tol_f) tol.quad_rel = *o.tol_f;
  if (!(tol.s_abs > 0.0) || !(tol.quad_rel > 0.0)) throw UsageError("tolerances must be positive");
  const auto fa = analysis::err_exp_fa(c, o.delta);
  const auto ml = analysis::err_exp_ml(c, o.delta, tol);
  Table t{{"name", "value"}, {}};
  t.rows.push_back({std::string("E_FA"), fa.value});
  t.rows.push_back({std::string("E_ML"), ml.value});
  t.rows.push_back({std::string("s_opt"), *ml.optimizer_s});
  emit(t, o, out);
  return ok;
}

int cmd_mismatch(const Options& o, std::ostream& out) {
  const double c = resolve_c(o);
  check_delta(o);
  Table t{{"name", "value"}, {}};
  bool first = true;
  for (int m : parse_counts(o.m, "M")) {
    const auto mb = analysis::mismatch_bound(c, o.delta, m);
    if (first) {
      t.rows.push_back({std::string("x_star"), mb.x_star});
      t.rows.push_back({std::string("x1"), mb.x1});
      first = false;
    }
    t.rows.push_back({series_label("bound", m), mb.bound});
  }
  emit(t, o, out);
  return ok;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.fig == 6) {
    emit(figure6_table(), o, out);
    return ok;
  }
  std::vector<Series> series;
  if (o.fig != 0) {
    series = figure_series(o.fig, o);
  } else {
    if (o.grid.empty()) throw UsageError("sweep needs --fig or --grid");
    const auto axis = parse_axis(o.vary);
    std::vector<int> ms{1};
    if (axis != mc::SweepAxis::m) ms = parse_counts(o.m, "M");
    for (const auto& name : split(o.detector, ',')) {
      const auto kind = parse_kind(name);
      for (int m : ms) {
        Series s{base_spec(o), axis == mc::SweepAxis::m ? std::string(mc::to_string(kind))
                                                        : series_label(mc::to_string(kind), m)};
        s.spec.detector = kind;
        s.spec.vary = axis;
        s.spec.grid = parse_number_list(o.grid);
        s.spec.fixed.delta = o.delta;
        s.spec.fixed.m = m;
        s.spec.fixed.bits = o.bits;
        if (!o.preset.empty()) s.spec.channel = preset_channel(o.preset);
        if (o.c) s.spec.fixed.c = *o.c;
        if (!mc::uses_inverse_gaussian(kind) && !o.c && o.preset.empty() && axis != mc::SweepAxis::c) {
          throw UsageError("give --c or --channel-preset");
        }
        series.push_back(std::move(s));
      }
    }
  }
  for (const auto& s : series) {
    try {
      s.spec.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  bool failed = false;
  emit(sweep_table(series, err, failed), o, out);
  return failed ? numeric : ok;
}

int cmd_required_m(const Options& o, std::ostream& out) {
  const double c = resolve_c(o);
  check_delta(o);
  if (!(o.target > 0.0 && o.target < 0.5)) throw UsageError("--target must lie in (0, 0.5)");
  mc::RequiredMOptions opts;
  opts.use_closed_form = !o.mc;
  opts.trials = parse_trials(o.trials);
  opts.seed = o.seed;
  opts.threads = o.threads;
  Table t{{"name", "value"}, {}};
  t.rows.push_back({std::string("required_m"),
                    static_cast<long long>(mc::required_m(c, o.delta, o.target, opts))});
  emit(t, o, out);
  return ok;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain:
    case ErrorCode::bad_weights:
    case ErrorCode::length_mismatch:
      return usage;
    default:
      return numeric;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::vector<double> parse_number_list(const std::string& text) {
  const auto number = [&](const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
      throw UsageError("not a number: '" + s + "' in '" + text + "'");
    }
    return v;
  };
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (item.find(':') == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("bad range '" + item + "'");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double step = parts.size() == 3 ? number(parts[2]) : 1.0;
    if (!(step > 0.0) || b < a) throw UsageError("bad range '" + item + "'");
    const auto count = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    if (count > 1000000) throw UsageError("range '" + item + "' is too long");
    for (long long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::map<std::string, channels::ChannelSpec> read_preset_file(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw IoError(e.what());
  }
  std::map<std::string, channels::ChannelSpec> out;
  for (const auto& [name, section] : tree) {
    channels::ChannelSpec spec;
    try {
      spec.distance_d = section.get<double>("d", spec.distance_d);
      spec.diffusion_D = section.get<double>("D", spec.diffusion_D);
      spec.drift_v = section.get<double>("v", spec.drift_v);
      spec.dim_scale = section.get<double>("dim_scale", spec.dim_scale);
      spec.validate();
    } catch (const std::exception& e) {
      throw UsageError("preset " + name + " in " + path + ": " + e.what());
    }
    out[name] = spec;
  }
  return out;
}

std::map<std::string, channels::ChannelSpec> load_presets() {
  // d = 1 um and D = 0.5 um^2/s give c = lambda = 1 s.
  std::map<std::string, channels::ChannelSpec> presets{
      {"unit", {1.0, 0.5, 0.0, 1.0}},
      {"fig8", {1.0, 0.5, 1.0, 1.0}},
  };
  const char* env = std::getenv("MOLTIMING_CONFIG");
  const std::string path = env ? env : "channels.ini";
  if (!env && !std::filesystem::exists(path)) return presets;
  for (auto& [name, spec] : read_preset_file(path)) presets[name] = spec;
  return presets;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detectors and error analysis for molecular timing channels", "moltiming"};
  app.require_subcommand(1);
  Options o;

  const auto channel_flags = [&](CLI::App* sub) {
    auto* c = sub->add_option("--c", o.c, "Levy scale c in seconds");
    auto* preset = sub->add_option("--channel-preset", o.preset, "named channel preset");
    c->excludes(preset);
  };
  const auto output_flags = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  const auto mc_flags = [&](CLI::App* sub) {
    sub->add_option("--trials", o.trials, "Monte Carlo trials per point");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
  };

  auto* threshold = app.add_subcommand("threshold", "first-arrival thresholds theta_M");
  channel_flags(threshold);
  threshold->add_option("--delta", o.delta, "symbol spacing in seconds");
  threshold->add_option("--m", o.m, "particle counts, e.g. 1,3,15 or 1:20");
  output_flags(threshold);

  auto* pe = app.add_subcommand("pe", "error probability, closed form or Monte Carlo");
  channel_flags(pe);
  pe->add_option("--delta", o.delta, "symbol spacing, or total span for gray-fa");
  pe->add_option("--m", o.m, "particle counts");
  pe->add_option("--bits", o.bits, "bits per symbol for gray-fa");
  pe->add_option("--detector", o.detector, "ml-single, ml, fa, linear, gray-fa, ig-ml, ig-fa, ig-linear");
  pe->add_flag("--mc", o.mc, "estimate by Monte Carlo");
  mc_flags(pe);
  output_flags(pe);

  auto* exponent = app.add_subcommand("exponent", "error exponents E_FA and E_ML");
  channel_flags(exponent);
  exponent->add_option("--delta", o.delta, "symbol spacing");
  exponent->add_option("--tol-x", o.tol_x, "search tolerance on s");
  exponent->add_option("--tol-f", o.tol_f, "relative quadrature tolerance");
  output_flags(exponent);

  auto* mismatch = app.add_subcommand("mismatch", "bound on ML/FA disagreement");
  channel_flags(mismatch);
  mismatch->add_option("--delta", o.delta, "symbol spacing");
  mismatch->add_option("--m", o.m, "particle counts");
  output_flags(mismatch);

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweeps and figure recipes");
  channel_flags(sweep);
  sweep->add_option("--fig", o.fig, "figure recipe 4..8")->check(CLI::Range(4, 8));
  sweep->add_option("--detector", o.detector, "comma-separated detectors");
  sweep->add_option("--vary", o.vary, "delta, m, c, velocity or bits");
  sweep->add_option("--grid", o.grid, "grid values, e.g. 0.5:4:0.5");
  sweep->add_option("--delta", o.delta, "fixed symbol spacing");
  sweep->add_option("--m", o.m, "fixed particle counts, one series each");
  sweep->add_option("--bits", o.bits, "bits per symbol for gray-fa");
  mc_flags(sweep);
  output_flags(sweep);

  auto* required = app.add_subcommand("required-m", "particles needed for a target error");
  channel_flags(required);
  required->add_option("--delta", o.delta, "symbol spacing");
  required->add_option("--target", o.target, "target error probability");
  required->add_flag("--mc", o.mc, "search with Monte Carlo estimates");
  mc_flags(required);
  output_flags(required);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (threshold->parsed()) return cmd_threshold(o, out);
    if (pe->parsed()) return cmd_pe(o, out, err);
    if (exponent->parsed()) return cmd_exponent(o, out);
    if (mismatch->parsed()) return cmd_mismatch(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (required->parsed()) return cmd_required_m(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return io;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return usage;
}

}  // namespace moltiming::cli
