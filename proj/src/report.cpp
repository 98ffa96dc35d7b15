#include "grasscap/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "grasscap/bounds.hpp"

namespace grasscap {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::map<std::string, std::string> parse_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open config file");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line;
    const auto first = trimmed.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    trimmed = trimmed.substr(first);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected key=value");
    std::string key = trimmed.substr(0, eq);
    std::string value = trimmed.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t' ||
                              value.back() == '\r'))
      value.pop_back();
    const auto vfirst = value.find_first_not_of(" \t");
    value = vfirst == std::string::npos ? "" : value.substr(vfirst);
    if (key.empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": empty key");
    out[key] = value;
  }
  return out;
}

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) continue;
    parts.push_back(item.substr(first, last - first + 1));
  }
  return parts;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(part, &pos);
      if (pos != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("not a number: '" + part + "'");
    }
  }
  return out;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  for (const auto& part : split_commas(text)) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(part, &pos);
      if (pos != part.size()) throw std::invalid_argument(part);
      out.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw ParseError("not an integer: '" + part + "'");
    }
  }
  return out;
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i]);
  }
  return out;
}

std::string join_indices(const std::vector<Index>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

void write_sweep_rows(std::ostream& out, const std::vector<SweepRow>& rows,
                      const char* gain_name) {
  out << gain_name
      << ",sigma2,l,m,n,k,errors,trials,p_hat,ci_low,ci_high,l_clamped,"
         "skipped\n";
  for (const auto& row : rows) {
    const auto& e = row.estimate;
    out << format_double(row.gain) << "," << format_double(row.sigma2) << ","
        << row.l << "," << row.m << "," << row.n << "," << row.k << ","
        << e.errors << "," << e.trials << "," << format_double(e.p_hat) << ","
        << format_double(e.ci_low) << "," << format_double(e.ci_high) << ","
        << (row.l_clamped ? 1 : 0) << "," << (row.skipped ? 1 : 0) << "\n";
  }
}

}  // namespace

void write_bounds_csv(std::ostream& out, const BoundsReport& report) {
  out << "# grasscap bounds\n";
  out << "# kappa=" << format_double(report.kappa) << "\n";
  out << "# sigma2_grid=" << join_doubles(report.sigma2_grid) << "\n";
  out << "# m=" << report.m << "\n";
  out << "# k=" << report.k << "\n";
  out << "# r_grid=" << join_doubles(report.r_grid) << "\n";
  out << "# table=capacity\n";
  out << "sigma2,c_lin_lower,c_lin_upper,c_aff_lower,c_aff_upper\n";
  for (double sigma2 : report.sigma2_grid) {
    const CapacityBounds lin = c_linear_bounds(report.kappa, sigma2);
    const CapacityBounds aff = c_affine_bounds(report.kappa, sigma2);
    out << format_double(sigma2) << "," << format_double(lin.lower) << ","
        << format_double(lin.upper) << "," << format_double(aff.lower) << ","
        << format_double(aff.upper) << "\n";
  }
  out << "# table=ddt\n";
  out << "r,d_lin_lower,d_lin_conjecture,d_lin_upper,d_affine\n";
  for (double r : report.r_grid) {
    out << format_double(r) << ","
        << format_double(
               ddt_eval({DdtKind::linear_lower, report.m, report.k}, r))
        << ","
        << format_double(
               ddt_eval({DdtKind::linear_conjecture, report.m, report.k}, r))
        << ","
        << format_double(
               ddt_eval({DdtKind::linear_upper, report.m, report.k}, r))
        << ","
        << format_double(ddt_eval({DdtKind::affine, report.m, report.k}, r))
        << "\n";
  }
}

void write_ddt_csv(std::ostream& out, const SweepConfig& config,
                   const std::vector<SweepRow>& rows) {
  out << "# grasscap ddt\n";
  out << "# mode="
      << (config.mode == SweepMode::ddt_affine ? "affine" : "linear") << "\n";
  out << "# n=" << config.n << "\n";
  out << "# m=" << config.m << "\n";
  out << "# k=" << config.k << "\n";
  out << "# sigma2_grid=" << join_doubles(config.sigma2_grid) << "\n";
  out << "# r_list=" << join_doubles(config.r_list) << "\n";
  out << "# ensembles=" << config.ensembles_per_point << "\n";
  out << "# signals=" << config.signals_per_ensemble << "\n";
  out << "# l_cap=" << config.l_cap << "\n";
  out << "# seed=" << config.master_seed << "\n";
  write_sweep_rows(out, rows, "r");

  out << "# table=slopes\n";
  out << "r,d_hat,std_err,rows_used,d_conjecture,d_affine\n";
  for (double r : config.r_list) {
    std::vector<SweepRow> group;
    for (const auto& row : rows)
      if (row.gain == r) group.push_back(row);
    std::string d_hat = "nan", std_err = "nan", used = "0";
    try {
      const SlopeFit fit = fit_slope(group);
      d_hat = format_double(fit.d_hat);
      std_err = format_double(fit.std_err);
      used = std::to_string(fit.rows_used);
    } catch (const InsufficientDataError&) {
      // Leave the slope columns as nan; rows stay in the file.
    }
    out << format_double(r) << "," << d_hat << "," << std_err << "," << used
        << ","
        << format_double(
               ddt_eval({DdtKind::linear_conjecture, config.m, config.k}, r))
        << ","
        << format_double(ddt_eval({DdtKind::affine, config.m, config.k}, r))
        << "\n";
  }
}

void write_capacity_csv(std::ostream& out, const SweepConfig& config,
                        const std::vector<SweepRow>& rows) {
  out << "# grasscap capacity\n";
  out << "# nu=" << format_double(config.nu) << "\n";
  out << "# kappa=" << format_double(config.kappa) << "\n";
  out << "# rho_list=" << join_doubles(config.rho_list) << "\n";
  out << "# m_grid=" << join_indices(config.m_grid) << "\n";
  out << "# sigma2=" << format_double(config.sigma2) << "\n";
  out << "# ensembles=" << config.ensembles_per_point << "\n";
  out << "# signals=" << config.signals_per_ensemble << "\n";
  out << "# l_cap=" << config.l_cap << "\n";
  out << "# seed=" << config.master_seed << "\n";
  const CapacityBounds lin = c_linear_bounds(config.kappa, config.sigma2);
  out << "# c_linear_lower=" << format_double(lin.lower) << "\n";
  out << "# c_linear_upper=" << format_double(lin.upper) << "\n";
  write_sweep_rows(out, rows, "rho");
}

void write_faces_csv(std::ostream& out, const FaceExperimentConfig& config,
                     const FaceExperimentResult& result,
                     const std::string& source) {
  out << "# grasscap faces\n";
  out << "# source=" << source << "\n";
  out << "# m_grid=" << join_indices(config.m_grid) << "\n";
  out << "# l_grid=" << join_indices(config.l_grid) << "\n";
  out << "# k_model=" << config.k_model << "\n";
  out << "# tau=" << format_double(config.tau) << "\n";
  out << "# affine_means=" << (config.affine_means ? 1 : 0) << "\n";
  out << "# seed=" << config.seed << "\n";
  out << "# table=errors\n";
  out << "m,l,errors,trials,p_hat\n";
  for (Index mi = 0; mi < static_cast<Index>(result.m_grid.size()); ++mi)
    for (Index li = 0; li < static_cast<Index>(result.l_grid.size()); ++li)
      out << result.m_grid[static_cast<std::size_t>(mi)] << ","
          << result.l_grid[static_cast<std::size_t>(li)] << ","
          << result.errors(mi, li) << "," << result.trials(mi, li) << ","
          << format_double(result.error_rate(mi, li)) << "\n";
  out << "# table=classes\n";
  out << "m,sigma2_hat,max_l_empirical,predicted_classes\n";
  for (std::size_t mi = 0; mi < result.m_grid.size(); ++mi)
    out << result.m_grid[mi] << "," << format_double(result.sigma2_hat[mi])
        << "," << result.max_l_empirical[mi] << "," << result.predicted[mi]
        << "\n";
}

}  // namespace grasscap
