#include "gaugelab/reports.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

#include "gaugelab/curvature.hpp"
#include "gaugelab/errors.hpp"
#include "gaugelab/gauge_fixing.hpp"
#include "gaugelab/lattice.hpp"
#include "gaugelab/quadrature.hpp"
#include "gaugelab/weyl.hpp"

namespace gaugelab {

namespace {

const std::vector<KeySpec> field_keys{
    {"field", "hedgehog", "connection: hedgehog, fast-decay, pure-tail or flat"},
    {"kappa", "1", "tail coefficient of the profile"},
    {"extra_decay", "0.5", "extra power of (1 + r)^-1 for fast-decay"},
    {"seed", "1", "seed for every random choice of the run"},
};

std::vector<KeySpec> with_field_keys(std::vector<KeySpec> own) {
  own.insert(own.begin(), field_keys.begin(), field_keys.end());
  return own;
}

const std::map<std::string, std::vector<KeySpec>>& key_tables() {
  static const std::map<std::string, std::vector<KeySpec>> tables{
      {"curvature-scan", with_field_keys({
                             {"r_min", "10", "smallest radius of the fit"},
                             {"r_max", "1000", "largest radius of the fit"},
                             {"samples", "16", "log-spaced radii"},
                             {"quantities", "A,F,gradA,AwedgeA", "fitted quantities"},
                             {"expect_slope_A", "", "asserted slope of |A|"},
                             {"expect_slope_F", "", "asserted slope of |F|"},
                             {"expect_slope_gradA", "", "asserted slope of |grad A|"},
                             {"expect_slope_AwedgeA", "", "asserted slope of |A wedge A|"},
                             {"slope_tolerance", "0.1", "allowed deviation from an asserted slope"},
                         })},
      {"weyl-scan", with_field_keys({
                        {"radii", "16,32,64,128,256,512,1024", "packet radii, at least four, increasing"},
                        {"width_rule", "sqrt", "sqrt (w = R^1/2) or const"},
                        {"width", "8", "packet width for the const rule"},
                        {"slope_max", "-0.9", "asserted upper bound on the fitted slope"},
                        {"rayleigh", "true", "also check <Delta psi, psi> = ||d_A psi||^2"},
                    })},
      {"spectrum", with_field_keys({
                       {"half_widths", "8,16,32", "box half-widths L"},
                       {"spacing", "1", "lattice spacing h, shared by all boxes"},
                       {"k", "1", "number of eigenvalues"},
                       {"tol", "1e-8", "residual tolerance"},
                       {"max_iter", "2000", "block Lanczos steps"},
                       {"amplitude", "1", "link noise for field = random"},
                       {"flat_control", "false", "also solve flat links and list the closed form"},
                       {"gauge_check", "false", "repeat on a randomly gauge-transformed lattice"},
                       {"expect_decreasing", "true", "assert that the lowest eigenvalue falls with L"},
                       {"dump_dir", "", "write ground states as raw arrays with JSON sidecars"},
                   })},
      {"tail-scan", with_field_keys({
                        {"radii", "4,8,16,32,64,128,256", "cutoff radii, at least four, increasing"},
                        {"terms", "I,II,III", "I = |A|, II = |grad A|, III = |A|^2, all in L^3"},
                        {"expect_slope_I", "", "asserted slope of term I"},
                        {"expect_slope_II", "", "asserted slope of term II"},
                        {"expect_slope_III", "", "asserted slope of term III"},
                        {"slope_tolerance", "0.15", "allowed deviation from an asserted slope"},
                        {"expect_monotone", "true", "assert that every term decreases in R"},
                    })},
      {"gauge-fix", with_field_keys({
                        {"half_width", "4", "box half-width L"},
                        {"points", "17", "lattice points per axis"},
                        {"pure_gauge", "false", "start from flat links instead of the field"},
                        {"gauge_amplitude", "1", "amplitude of the smooth random gauge"},
                        {"gauge_wavenumber", "0.5", "wavenumber of the smooth random gauge"},
                        {"tol", "1e-6", "Coulomb residual target"},
                        {"max_sweeps", "2000", "relaxation sweeps"},
                        {"omega", "1.7", "overrelaxation parameter in [1, 2)"},
                    })},
      {"kato-check", with_field_keys({
                         {"psi", "random", "random (smooth non-radial) or radial-packet"},
                         {"count", "20", "number of random spinor fields"},
                         {"samples", "400", "sample points per field"},
                         {"radius", "10", "sample ball radius"},
                         {"packet_R", "6", "radial packet radius"},
                         {"packet_w", "2.5", "radial packet width"},
                         {"expect_zero", "false", "assert min_C = 0 for every field"},
                     })},
  };
  return tables;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::string cell(double v) { return format_number(v); }
std::string cell(long long v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ScanReport start_report(const Settings& s, std::vector<std::string> columns) {
  ScanReport r;
  r.experiment = s.experiment();
  r.field = s.text("field");
  r.columns = std::move(columns);
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(s.hash()));
  nlohmann::json settings = nlohmann::json::object();
  std::stringstream lines(s.canonical());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    settings[line.substr(0, eq)] = line.substr(eq + 1);
  }
  r.provenance = {{"experiment", r.experiment}, {"field", r.field},       {"version", kVersion},
                  {"config_hash", hash},        {"seed", s.seed()},       {"timestamp", utc_timestamp()},
                  {"settings", settings}};
  return r;
}

RadialProfile make_profile(const Settings& s) {
  const std::string name = s.text("field");
  const double kappa = s.number("kappa");
  if (name == "hedgehog") return RadialProfile::smoothed(kappa);
  if (name == "fast-decay") return RadialProfile::fast_decay(kappa, s.number("extra_decay"));
  if (name == "pure-tail") return RadialProfile::pure_tail(kappa);
  if (name == "flat") return RadialProfile::trivial();
  throw ConfigError("unknown field '" + name + "'");
}

ConnectionField make_field(const Settings& s) {
  if (s.text("field") == "flat") return flat_connection();
  if (s.text("field") == "fast-decay") return fast_decay_family(s.number("kappa"), s.number("extra_decay"));
  return hedgehog(make_profile(s));
}

void require_lattice_field(const Settings& s, bool allow_random) {
  const std::string f = s.text("field");
  if (f == "pure-tail") throw ConfigError("pure-tail is singular at the origin and cannot be put on a lattice");
  if (f == "random" && !allow_random) throw ConfigError("field = random is only available for spectrum");
}

std::vector<double> increasing_radii(const Settings& s, const std::string& key) {
  const auto radii = s.numbers(key);
  if (radii.size() < 4) throw ConfigError(key + " needs at least four entries");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ConfigError(key + " must be increasing");
  if (!(radii.front() > 0.0)) throw ConfigError(key + " must be positive");
  return radii;
}

// rounding-level increases near the minimum are not counted
bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] + 1e-12 * std::abs(v[i - 1])) return false;
  return true;
}

}  // namespace

Config Config::parse(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) c.set(section, key, value.get_value<std::string>());
  }
  return c;
}

Config Config::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse(in);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = trim(value);
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"curvature-scan", "weyl-scan",  "spectrum",
                                              "tail-scan",      "gauge-fix", "kato-check"};
  return names;
}

const std::vector<KeySpec>& experiment_keys(const std::string& experiment) {
  const auto it = key_tables().find(experiment);
  if (it == key_tables().end()) throw ConfigError("unknown experiment '" + experiment + "'");
  return it->second;
}

void validate(const Config& config) {
  for (const auto& [section, values] : config.sections()) {
    const auto& keys = experiment_keys(section);
    for (const auto& [key, value] : values)
      if (std::none_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.key == key; }))
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

Settings::Settings(const Config& config, const std::string& experiment) : experiment_(experiment) {
  for (const auto& k : experiment_keys(experiment)) values_[k.key] = k.default_value;
  const auto it = config.sections().find(experiment);
  if (it == config.sections().end()) return;
  for (const auto& [key, value] : it->second) {
    if (!values_.count(key)) throw ConfigError("unknown key '" + key + "' in [" + experiment + "]");
    values_[key] = value;
  }
}

std::string Settings::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("no key '" + key + "' for " + experiment_);
  return it->second;
}

double Settings::number(const std::string& key) const {
  const std::string t = text(key);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(key + " = '" + t + "' is not a number");
  return v;
}

long long Settings::integer(const std::string& key) const {
  const std::string t = text(key);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size()) throw ConfigError(key + " = '" + t + "' is not an integer");
  return v;
}

std::uint64_t Settings::seed() const {
  const std::string t = text("seed");
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size()) throw ConfigError("seed = '" + t + "' is not a u64");
  return v;
}

bool Settings::flag(const std::string& key) const {
  const std::string t = text(key);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + " = '" + t + "' is not a boolean");
}

std::vector<double> Settings::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(text(key))) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size() || !std::isfinite(v))
      throw ConfigError(key + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Settings::words(const std::string& key) const { return split(text(key)); }

std::string Settings::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

std::uint64_t Settings::hash() const { return fnv1a(experiment_ + "\n" + canonical()); }

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void ScanReport::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw InputError("report row width does not match the columns");
  rows.push_back(std::move(row));
}

void ScanReport::check(const std::string& name, bool passed, const std::string& detail) {
  checks.push_back({name, passed, detail});
}

std::string ScanReport::header_line() const {
  nlohmann::json head = provenance;
  head["checks"] = nlohmann::json::array();
  for (const auto& c : checks) head["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  head["errors"] = errors;
  return "# " + head.dump();
}

std::string ScanReport::body() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_escape(columns[i]);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(row[i]);
    out += '\n';
  }
  return out;
}

void ScanReport::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write report " + path.string());
  out << header_line() << '\n' << body();
}

bool ScanReport::checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

int ScanReport::exit_code(bool assert_mode) const {
  if (!errors.empty()) return 1;
  return assert_mode && !checks_passed() ? 1 : 0;
}

ScanReport run_curvature_scan(const Config& config) {
  const Settings s(config, "curvature-scan");
  require_lattice_field(s, false);
  const auto field = make_field(s);
  const double r_min = s.number("r_min"), r_max = s.number("r_max");
  const long long samples = s.integer("samples");
  if (!(r_min > 0.0 && r_max > r_min) || samples < 2) throw ConfigError("need 0 < r_min < r_max and samples >= 2");

  auto report = start_report(s, {"kind", "field", "kappa", "extra_decay", "r_min", "r_max", "samples", "quantity",
                                 "slope", "intercept", "fit_residual", "power_law", "value", "flag"});
  const auto base = [&](const std::string& kind) {
    return std::vector<std::string>{kind,          s.text("field"), s.text("kappa"), s.text("extra_decay"),
                                    cell(r_min), cell(r_max),     cell(samples)};
  };
  const double tolerance = s.number("slope_tolerance");
  for (const auto& name : s.words("quantities")) {
    DecayQuantity q;
    if (name == "A") q = DecayQuantity::A;
    else if (name == "F") q = DecayQuantity::F;
    else if (name == "gradA") q = DecayQuantity::GradA;
    else if (name == "AwedgeA") q = DecayQuantity::AwedgeA;
    else throw ConfigError("unknown quantity '" + name + "'");
    auto row = base("fit");
    row.push_back(name);
    try {
      const auto fit = decay_exponent_fit(field, q, r_min, r_max, int(samples));
      row.insert(row.end(), {cell(fit.slope), cell(fit.intercept), cell(fit.residual), cell(fit.power_law()), "",
                             fit.power_law() ? "" : "not-power-law"});
      if (s.is_set("expect_slope_" + name)) {
        const double expected = s.number("expect_slope_" + name);
        report.check("slope " + name, std::abs(fit.slope - expected) <= tolerance,
                     "fitted " + cell(fit.slope) + ", expected " + cell(expected) + " +- " + cell(tolerance));
      }
    } catch (const DegenerateFitError& e) {
      row.insert(row.end(), {"nan", "nan", "nan", "false", "", "degenerate"});
      report.errors.push_back(name + ": " + e.what());
    }
    report.add_row(row);
  }

  if (s.text("field") != "flat") {
    // closed-form terms at (r_min, 0, 0) next to the brute-force curvature
    const auto profile = make_profile(s);
    const Vec3 x{r_min, 0.0, 0.0};
    const auto terms = hedgehog_curvature_terms(profile, x);
    const auto numeric = curvature_numeric(field, x, 1e-3 * std::max(1.0, r_min), Stencil::Central4);
    const auto printed = curvature_analytic_hedgehog(profile, x, HedgehogFormula::AsPrinted);
    const auto corrected = curvature_analytic_hedgehog(profile, x, HedgehogFormula::Corrected);
    const std::pair<std::string, double> diagnostics[] = {
        {"term_radial_derivative", norm(terms.radial_derivative)},
        {"term_linear", norm(terms.linear)},
        {"term_commutator", norm(terms.commutator)},
        {"F_numeric", norm(numeric)},
        {"F_closed_form_rel_error", norm(corrected - numeric) / norm(numeric)},
        {"F_as_printed_rel_error", norm(printed - numeric) / norm(numeric)},
    };
    for (const auto& [name, value] : diagnostics) {
      auto row = base("point");
      row.insert(row.end(), {name, "", "", "", "", cell(value), ""});
      report.add_row(row);
    }
  }
  return report;
}

ScanReport run_weyl_scan(const Config& config) {
  const Settings s(config, "weyl-scan");
  const auto field = make_field(s);
  const auto radii = increasing_radii(s, "radii");
  const std::string rule = s.text("width_rule");
  std::function<double(double)> width;
  if (rule == "sqrt") width = [](double R) { return std::sqrt(R); };
  else if (rule == "const") width = [w = s.number("width")](double) { return w; };
  else throw ConfigError("width_rule must be sqrt or const");
  const bool rayleigh = s.flag("rayleigh");
  const double slope_max = s.number("slope_max");

  auto report = start_report(s, {"kind",     "field",         "kappa", "width_rule", "R",    "w",   "c_R",
                                 "normalization", "lap",      "cross", "div",        "asq",  "total",
                                 "quadratic_form", "energy",  "rayleigh_rel_diff", "slope", "intercept",
                                 "fit_residual", "flag"});
  const auto bump = BumpProfile::standard();
  WeylScan scan;
  try {
    scan = weyl_scaling_scan(bump, field, radii, width);
  } catch (const AccuracyError& e) {
    report.errors.push_back(std::string("quadrature floor reached: ") + e.what());
    auto row = std::vector<std::string>(report.columns.size());
    row[0] = "packet";
    row[1] = s.text("field");
    row.back() = "quadrature-floor";
    report.add_row(row);
    return report;
  }
  bool normalized = true, identity = true;
  for (const auto& r : scan.rows) {
    std::string qf, en, rel;
    if (rayleigh) {
      const auto c = rayleigh_identity(build_packet(bump, r.R, r.w), field);
      const double d = std::abs(c.quadratic_form - c.energy) / std::abs(c.energy);
      qf = cell(c.quadratic_form);
      en = cell(c.energy);
      rel = cell(d);
      identity = identity && d <= 1e-8;
    }
    normalized = normalized && std::abs(r.normalization - 1.0) <= 1e-10;
    report.add_row({"packet", s.text("field"), s.text("kappa"), rule, cell(r.R), cell(r.w), cell(r.c_R),
                    cell(r.normalization), cell(r.norms.lap), cell(r.norms.cross), cell(r.norms.div),
                    cell(r.norms.asq), cell(r.norms.total), qf, en, rel, "", "", "", ""});
  }
  report.add_row({"fit", s.text("field"), s.text("kappa"), rule, "", "", "", "", "", "", "", "", "", "", "", "",
                  cell(scan.fit.slope), cell(scan.fit.intercept), cell(scan.fit.residual), ""});
  report.check("slope", scan.fit.slope <= slope_max, "fitted " + cell(scan.fit.slope) + " <= " + cell(slope_max));
  report.check("normalization", normalized, "|  ||psi_R|| - 1 | <= 1e-10 for every packet");
  if (rayleigh) report.check("rayleigh identity", identity, "relative difference <= 1e-8 for every packet");
  return report;
}

ScanReport run_spectrum(const Config& config) {
  const Settings s(config, "spectrum");
  require_lattice_field(s, true);
  const std::string name = s.text("field");
  const long long k = s.integer("k");
  if (k < 1) throw ConfigError("spectrum needs k >= 1");
  const double tol = s.number("tol"), h = s.number("spacing");
  if (!(tol > 0.0)) throw ConfigError("spectrum needs tol > 0");
  if (!(h > 0.0)) throw ConfigError("spectrum needs spacing > 0");
  const long long max_iter = s.integer("max_iter");
  const auto half_widths = s.numbers("half_widths");
  if (half_widths.empty()) throw ConfigError("spectrum needs at least one half-width");
  const bool control = s.flag("flat_control"), gauge_check = s.flag("gauge_check");
  const std::string dump_dir = s.text("dump_dir");
  EigenOptions opts;
  opts.seed = s.seed();

  auto report = start_report(s, {"field", "kappa", "L", "n", "h", "k", "index", "eigenvalue", "residual",
                                 "flat_eigenvalue", "flat_closed_form", "gauge_eigenvalue", "flag"});
  std::vector<double> lowest;
  bool nonnegative = true, control_ok = true, gauge_ok = true, hermitian = true;
  for (double L : half_widths) {
    const double points = 2.0 * L / h + 1.0;
    if (std::abs(points - std::round(points)) > 1e-9) throw ConfigError("2 L / spacing must be an integer");
    const auto spec = LatticeSpec::make(L, int(std::lround(points)));
    const LinkField links = name == "random"
                                ? random_links(spec, s.seed(), s.number("amplitude"))
                                : make_links(make_field(s), spec);
    hermitian = hermitian && hermiticity_residual(links, 2, s.seed()) < 1e-12;
    const auto prefix = std::vector<std::string>{name, s.text("kappa"), cell(L), cell(spec.n), cell(spec.h()), cell(k)};
    std::vector<Eigenpair> ev;
    std::vector<GridField> vectors;
    try {
      ev = lowest_eigenvalues(links, int(k), tol, int(max_iter), opts, dump_dir.empty() ? nullptr : &vectors);
    } catch (const ConvergenceError& e) {
      report.errors.push_back("L = " + cell(L) + ": " + e.what());
      for (std::size_t i = 0; i < e.best().size(); ++i) {
        auto row = prefix;
        row.insert(row.end(), {cell(int(i)), cell(e.best()[i]), "", "", "", "", "not-converged"});
        report.add_row(row);
      }
      continue;
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    std::vector<Eigenpair> flat, moved;
    std::vector<double> closed;
    if (control) {
      flat = lowest_eigenvalues(LinkField(spec), int(k), tol, int(max_iter), opts);
      for (int a = 1; a <= std::min(spec.n, 8); ++a)
        for (int b = 1; b <= std::min(spec.n, 8); ++b)
          for (int c = 1; c <= std::min(spec.n, 8); ++c) closed.insert(closed.end(), 2, flat_eigenvalue(spec, a, b, c));
      std::sort(closed.begin(), closed.end());
    }
    if (gauge_check)
      moved = lowest_eigenvalues(gauge_transform(links, random_lattice_gauge(spec, s.seed() + 1)), int(k), tol,
                                 int(max_iter), opts);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      nonnegative = nonnegative && ev[i].value >= -tol;
      auto row = prefix;
      row.insert(row.end(), {cell(int(i)), cell(ev[i].value), cell(ev[i].residual)});
      if (control) {
        const double err = std::abs(flat[i].value - closed[i]) / closed[i];
        control_ok = control_ok && err <= 1e-10;
        row.insert(row.end(), {cell(flat[i].value), cell(closed[i])});
      } else {
        row.insert(row.end(), {"", ""});
      }
      if (gauge_check) {
        gauge_ok = gauge_ok && std::abs(moved[i].value - ev[i].value) <= 10 * tol * std::max(1.0, std::abs(ev[i].value));
        row.push_back(cell(moved[i].value));
      } else {
        row.push_back("");
      }
      row.push_back("");
      report.add_row(row);
    }
    lowest.push_back(ev.front().value);
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      write_field_dump(vectors.front(), std::filesystem::path(dump_dir) / ("ground_L" + cell(L) + ".bin"),
                       "ground state, " + name + ", L = " + cell(L));
    }
  }
  report.check("hermiticity", hermitian, "residual < 1e-12 on every box");
  report.check("nonnegative", nonnegative, "every eigenvalue >= -tol");
  if (control) report.check("flat control", control_ok, "solver matches the closed form to 1e-10");
  if (gauge_check) report.check("gauge invariance", gauge_ok, "eigenvalues unchanged to 10 tol");
  if (s.flag("expect_decreasing") && half_widths.size() > 1) {
    bool decreasing = lowest.size() == half_widths.size();
    for (std::size_t i = 1; decreasing && i < lowest.size(); ++i) decreasing = lowest[i] < lowest[i - 1];
    report.check("lowest eigenvalue decreasing", decreasing, "strictly across the listed half-widths");
  }
  return report;
}

ScanReport run_tail_scan(const Config& config) {
  const Settings s(config, "tail-scan");
  const auto field = make_field(s);
  const auto radii = increasing_radii(s, "radii");
  const double tolerance = s.number("slope_tolerance");
  auto report = start_report(s, {"kind", "field", "kappa", "term", "R", "value", "error", "tail", "slope",
                                 "intercept", "fit_residual", "flag"});
  for (const auto& name : s.words("terms")) {
    TailTerm term;
    if (name == "I") term = TailTerm::I;
    else if (name == "II") term = TailTerm::II;
    else if (name == "III") term = TailTerm::III;
    else throw ConfigError("unknown tail term '" + name + "'");
    std::vector<TailPoint> points;
    try {
      points = tail_norm_scan(field, term, radii);
    } catch (const AccuracyError& e) {
      report.errors.push_back("term " + name + ": " + e.what());
      report.add_row({"point", s.text("field"), s.text("kappa"), name, "", "", "", "", "", "", "", "quadrature-floor"});
      continue;
    }
    std::vector<double> R, values;
    for (const auto& p : points) {
      R.push_back(p.R);
      values.push_back(p.value);
      report.add_row({"point", s.text("field"), s.text("kappa"), name, cell(p.R), cell(p.value), cell(p.error),
                      cell(p.tail), "", "", "", ""});
    }
    if (s.flag("expect_monotone")) {
      bool falling = true;
      for (std::size_t i = 1; i < values.size(); ++i) falling = falling && values[i] < values[i - 1];
      report.check("term " + name + " decreasing", falling, "strictly in R");
    }
    try {
      const auto fit = fit_power_law(R, values);
      report.add_row({"fit", s.text("field"), s.text("kappa"), name, "", "", "", "", cell(fit.slope),
                      cell(fit.intercept), cell(fit.residual), fit.power_law() ? "" : "not-power-law"});
      if (s.is_set("expect_slope_" + name)) {
        const double expected = s.number("expect_slope_" + name);
        report.check("slope " + name, std::abs(fit.slope - expected) <= tolerance,
                     "fitted " + cell(fit.slope) + ", expected " + cell(expected) + " +- " + cell(tolerance));
      }
    } catch (const DegenerateFitError& e) {
      report.add_row({"fit", s.text("field"), s.text("kappa"), name, "", "", "", "", "nan", "nan", "nan", "degenerate"});
      report.errors.push_back("term " + name + ": " + e.what());
    }
  }
  return report;
}

ScanReport run_gauge_fix(const Config& config) {
  const Settings s(config, "gauge-fix");
  require_lattice_field(s, false);
  const auto spec = [&] {
    try {
      return LatticeSpec::make(s.number("half_width"), int(s.integer("points")));
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  }();
  const double tol = s.number("tol");
  GaugeFixOptions opts;
  opts.omega = s.number("omega");
  const LinkField original = s.flag("pure_gauge") ? LinkField(spec) : make_links(make_field(s), spec);
  const auto smooth = random_smooth_gauge(s.seed(), s.number("gauge_amplitude"), s.number("gauge_wavenumber"));
  const LinkField links = gauge_transform(original, sample_gauge(spec, [&](const Vec3& x) { return smooth(x).g; }));

  auto report = start_report(s, {"kind", "field", "kappa", "pure_gauge", "L", "n", "omega", "tol", "sweep",
                                 "coulomb_residual", "functional", "connection_norm", "max_curvature_change",
                                 "residual_increases"});
  const auto prefix = [&](const std::string& kind) {
    return std::vector<std::string>{kind,           s.text("field"), s.text("kappa"), s.text("pure_gauge"),
                                    cell(spec.L), cell(spec.n),    cell(opts.omega), cell(tol)};
  };
  std::optional<GaugeFixResult> fixed;
  try {
    fixed = fix_coulomb(links, tol, int(s.integer("max_sweeps")), opts);
  } catch (const ConvergenceError& e) {
    report.errors.push_back(e.what());
    for (std::size_t i = 0; i < e.best().size(); ++i) {
      auto row = prefix("sweep");
      row.insert(row.end(), {cell(int(i)), cell(e.best()[i]), "", "", "", ""});
      report.add_row(row);
    }
    return report;
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  const GaugeFixResult& result = *fixed;
  int increases = 0;
  for (std::size_t i = 0; i < result.residual_history.size(); ++i) {
    if (i > 0 && result.residual_history[i] > result.residual_history[i - 1]) ++increases;
    auto row = prefix("sweep");
    row.insert(row.end(),
               {cell(int(i)), cell(result.residual_history[i]), cell(result.functional_history[i]), "", "", ""});
    report.add_row(row);
  }
  double change = 0.0;
  for (int i = 0; i + 1 < spec.n; ++i)
    for (int j = 0; j + 1 < spec.n; ++j)
      for (int k = 0; k + 1 < spec.n; ++k)
        change = std::max(change, std::abs(norm(plaquette_curvature(result.fixed, i, j, k)) -
                                           norm(plaquette_curvature(original, i, j, k))));
  const double before = lattice_connection_norm(links), after = lattice_connection_norm(result.fixed);
  auto row = prefix("summary");
  row.insert(row.end(), {cell(int(result.residual_history.size()) - 1), cell(result.residual_history.back()),
                         cell(result.functional_history.back()), cell(after), cell(change), cell(increases)});
  report.add_row(row);
  auto input = prefix("input");
  input.insert(input.end(), {"0", cell(result.residual_history.front()), cell(result.functional_history.front()),
                             cell(before), "", ""});
  report.add_row(input);
  report.check("residual", result.residual_history.back() <= tol, "final <= tol");
  report.check("functional descent", non_increasing(result.functional_history), "non-increasing across sweeps up to 1e-12 relative");
  report.check("curvature preserved", change <= 1e-8, "max pointwise | |F| change | = " + cell(change));
  report.check("norm reduction", after <= before, "fixed norm " + cell(after) + " <= input norm " + cell(before));
  return report;
}

ScanReport run_kato_check(const Config& config) {
  const Settings s(config, "kato-check");
  const auto field = make_field(s);
  const std::string kind = s.text("psi");
  const long long count = kind == "radial-packet" ? 1 : s.integer("count");
  if (kind != "random" && kind != "radial-packet") throw ConfigError("psi must be random or radial-packet");
  if (count < 1) throw ConfigError("count must be >= 1");
  const long long samples = s.integer("samples");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  const auto points = sample_points(s.seed(), int(samples), s.number("radius"));

  auto report = start_report(s, {"field", "kappa", "psi", "psi_seed", "samples", "radius", "min_C", "worst_x",
                                 "worst_y", "worst_z", "evaluated", "repeat_equal", "flag"});
  bool finite = true, stable = true, zero = true;
  for (long long i = 0; i < count; ++i) {
    const std::uint64_t seed = s.seed() + std::uint64_t(i);
    const SpinorField psi = kind == "random" ? random_smooth_spinor(seed)
                                             : build_packet(BumpProfile::standard(), s.number("packet_R"),
                                                            s.number("packet_w"))
                                                   .as_field();
    std::vector<std::string> row{s.text("field"), s.text("kappa"), kind,         cell((long long)seed),
                                 cell(samples),   s.text("radius")};
    try {
      const auto a = kato_deficit(field, psi, points);
      const auto b = kato_deficit(field, psi, points);
      const bool same = a.min_C == b.min_C;
      finite = finite && std::isfinite(a.min_C);
      stable = stable && same;
      zero = zero && a.min_C == 0.0;
      row.insert(row.end(), {cell(a.min_C), cell(a.worst_point[0]), cell(a.worst_point[1]), cell(a.worst_point[2]),
                             cell(a.evaluated), cell(same), ""});
    } catch (const InputError& e) {
      report.errors.push_back(e.what());
      row.insert(row.end(), {"nan", "", "", "", "0", "", "psi-vanishes"});
    }
    report.add_row(row);
  }
  report.check("finite", finite, "min_C finite for every field");
  report.check("seed stable", stable, "repeat evaluation identical");
  if (s.flag("expect_zero")) report.check("zero", zero, "min_C = 0 for every field");
  return report;
}

ScanReport run_experiment(const std::string& name, const Config& config) {
  validate(config);
  try {
    if (name == "curvature-scan") return run_curvature_scan(config);
    if (name == "weyl-scan") return run_weyl_scan(config);
    if (name == "spectrum") return run_spectrum(config);
    if (name == "tail-scan") return run_tail_scan(config);
    if (name == "gauge-fix") return run_gauge_fix(config);
    if (name == "kato-check") return run_kato_check(config);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace gaugelab
