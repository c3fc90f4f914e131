#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pkgprof/scorer.hpp"
#include "text_util.hpp"

namespace pkgprof {

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string where(std::size_t line_no) {
  return "config line " + std::to_string(line_no) + ": ";
}

double parse_weight(std::string_view key, std::string_view value,
                    std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size() ||
      !std::isfinite(v)) {
    throw ConfigError(where(line_no) + "'" + std::string(value) +
                      "' is not a number for " + std::string(key));
  }
  if (v < 0.0) {
    throw ConfigError(where(line_no) + std::string(key) + " must be >= 0");
  }
  return v;
}

bool parse_bool(std::string_view value, std::size_t line_no) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(where(line_no) + "'" + std::string(value) +
                    "' is not a boolean");
}

}  // namespace

ScoreConfig load_score_config(std::istream& in) {
  ScoreConfig cfg;
  const std::pair<std::string_view, double ScoreConfig::*> weights[] = {
      {"open_bonus", &ScoreConfig::open_bonus},
      {"w_open", &ScoreConfig::w_open},
      {"w_read", &ScoreConfig::w_read},
      {"w_close", &ScoreConfig::w_close},
      {"w_elapsed", &ScoreConfig::w_elapsed},
      {"w_cpu", &ScoreConfig::w_cpu},
      {"w_f", &ScoreConfig::w_f},
      {"w_r", &ScoreConfig::w_r},
  };

  std::string raw;
  std::size_t line_no = 0;
  while (detail::read_line(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where(line_no) + "expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));

    if (key == "clamp_net_open") {
      cfg.clamp_net_open = parse_bool(value, line_no);
      continue;
    }
    bool known = false;
    for (const auto& [name, member] : weights) {
      if (key == name) {
        cfg.*member = parse_weight(key, value, line_no);
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(where(line_no) + "unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

ScoreConfig load_score_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  return load_score_config(in);
}

void write_score_config(const ScoreConfig& cfg, std::ostream& out) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "open_bonus=" << cfg.open_bonus << '\n'
      << "w_open=" << cfg.w_open << '\n'
      << "w_read=" << cfg.w_read << '\n'
      << "w_close=" << cfg.w_close << '\n'
      << "w_elapsed=" << cfg.w_elapsed << '\n'
      << "w_cpu=" << cfg.w_cpu << '\n'
      << "w_f=" << cfg.w_f << '\n'
      << "w_r=" << cfg.w_r << '\n'
      << "clamp_net_open=" << (cfg.clamp_net_open ? "true" : "false") << '\n';
  out << buf.str();
}

}  // namespace pkgprof
