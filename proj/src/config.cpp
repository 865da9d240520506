#include "ising/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ising {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& source, int line, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    fail(source, line, "expected a number, got '" + value + "'");
  }
  if (pos != value.size()) fail(source, line, "trailing characters in number '" + value + "'");
  return v;
}

long long parse_int(const std::string& source, int line, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    fail(source, line, "expected an integer, got '" + value + "'");
  }
  if (pos != value.size()) fail(source, line, "trailing characters in integer '" + value + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

std::vector<double> temperature_grid(double t_min, double t_max, double t_step) {
  if (!(t_step > 0.0) || !(t_min > 0.0) || t_max < t_min) {
    throw std::runtime_error("config: need temp_min > 0, temp_step > 0 and temp_max >= temp_min");
  }
  std::vector<double> temps;
  const int count = static_cast<int>(std::floor((t_max - t_min) / t_step + 0.5)) + 1;
  for (int i = 0; i < count; ++i) {
    const double t = t_min + i * t_step;
    if (t > t_max + 1e-9) break;
    temps.push_back(t);
  }
  return temps;
}

}  // namespace

CliConfig default_config() {
  CliConfig config;
  config.plan.sizes = {8, 16, 32, 64};
  config.plan.temperatures = temperature_grid(2.21, 2.33, 0.005);
  config.plan.measurements = 200000;
  config.plan.coupling = 1.0;
  config.plan.thermalization_fraction = 0.10;
  config.plan.base_seed = 1;
  config.plan.threads = std::max(1u, std::thread::hardware_concurrency());
  return config;
}

CliConfig parse_config(std::istream& in, const std::string& source_name) {
  CliConfig config = default_config();

  bool explicit_temps = false;
  bool have_grid_key = false;
  double t_min = 2.21, t_max = 2.33, t_step = 0.005;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(source_name, line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(source_name, line_no, "empty key");
    if (value.empty()) fail(source_name, line_no, "empty value for key '" + key + "'");

    if (key == "sizes") {
      config.plan.sizes.clear();
      for (const std::string& item : split_list(value)) {
        config.plan.sizes.push_back(static_cast<int>(parse_int(source_name, line_no, item)));
      }
    } else if (key == "temps") {
      config.plan.temperatures.clear();
      for (const std::string& item : split_list(value)) {
        config.plan.temperatures.push_back(parse_double(source_name, line_no, item));
      }
      explicit_temps = true;
    } else if (key == "temp_min") {
      t_min = parse_double(source_name, line_no, value);
      have_grid_key = true;
    } else if (key == "temp_max") {
      t_max = parse_double(source_name, line_no, value);
      have_grid_key = true;
    } else if (key == "temp_step") {
      t_step = parse_double(source_name, line_no, value);
      have_grid_key = true;
    } else if (key == "measurements") {
      const long long n = parse_int(source_name, line_no, value);
      if (n < 1) fail(source_name, line_no, "measurements must be >= 1");
      config.plan.measurements = static_cast<std::size_t>(n);
    } else if (key == "base_seed") {
      config.plan.base_seed = static_cast<std::uint64_t>(parse_int(source_name, line_no, value));
    } else if (key == "threads") {
      const long long n = parse_int(source_name, line_no, value);
      if (n < 1) fail(source_name, line_no, "threads must be >= 1");
      config.plan.threads = static_cast<int>(n);
    } else if (key == "thermalization_fraction") {
      config.plan.thermalization_fraction = parse_double(source_name, line_no, value);
    } else if (key == "coupling") {
      config.plan.coupling = parse_double(source_name, line_no, value);
    } else if (key == "data_dir") {
      config.data_dir = value;
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "binder_crossing_fit_kind") {
      try {
        config.analysis.binder_crossing_fit_kind = fit_kind_from_string(value);
      } catch (const std::exception& e) {
        fail(source_name, line_no, e.what());
      }
    } else if (key == "finite_size_min_L") {
      config.analysis.finite_size_min_l =
          static_cast<int>(parse_int(source_name, line_no, value));
    } else if (key == "finite_size_max_L") {
      config.analysis.finite_size_max_l =
          static_cast<int>(parse_int(source_name, line_no, value));
    } else if (key == "jackknife_bins") {
      config.analysis.jackknife_bins = static_cast<int>(parse_int(source_name, line_no, value));
    } else if (key == "Tc") {
      config.analysis.tc = parse_double(source_name, line_no, value);
    } else if (key == "nu") {
      config.analysis.nu = parse_double(source_name, line_no, value);
    } else {
      fail(source_name, line_no, "unknown key '" + key + "'");
    }
  }

  if (explicit_temps && have_grid_key) {
    throw std::runtime_error(source_name +
                             ": 'temps' and 'temp_min/temp_max/temp_step' are mutually exclusive");
  }
  if (!explicit_temps) {
    try {
      config.plan.temperatures = temperature_grid(t_min, t_max, t_step);
    } catch (const std::exception& e) {
      throw std::runtime_error(source_name + ": " + e.what());
    }
  }

  try {
    validate_plan(config.plan);
    validate_config(config.analysis);
  } catch (const std::exception& e) {
    throw std::runtime_error(source_name + ": " + e.what());
  }
  return config;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

}  // namespace ising
