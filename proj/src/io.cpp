#include "rootdoa/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rootdoa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::string_view whole) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("cannot parse complex number '" + std::string(whole) + "'");
  }
  return value;
}

template <typename T>
void put_le(std::ostream& os, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ConfigError("truncated binary snapshot file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  return std::bit_cast<T>(bytes);
}

}  // namespace

std::string format_complex(Complex c, int digits) {
  char buf[96];
  const double re = c.real() + 0.0;
  const double im = c.imag() + 0.0;
  std::snprintf(buf, sizeof buf, "%.*g%c%.*gj", digits, re, std::signbit(im) ? '-' : '+',
                digits, std::abs(im));
  return buf;
}

Complex parse_complex(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.back() != 'j' && s.back() != 'i') return {parse_real(s, text), 0.0};

  const std::string_view body = s.substr(0, s.size() - 1);
  // The split point is the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    const char ch = body[k];
    if ((ch == '+' || ch == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) {
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    return {0.0, parse_real(body, text)};
  }
  const double re = parse_real(body.substr(0, split), text);
  std::string_view im_part = body.substr(split);
  double im = 0.0;
  if (im_part == "+") {
    im = 1.0;
  } else if (im_part == "-") {
    im = -1.0;
  } else {
    im = parse_real(im_part, text);
  }
  return {re, im};
}

std::vector<Complex> parse_complex_list(std::string_view text) {
  std::vector<Complex> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_complex(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  return nlohmann::json{{"n_sensors", s.num_sensors},
                        {"doas_deg", s.doas_deg},
                        {"snapshots", s.snapshots},
                        {"snr_db", s.snr_db},
                        {"seed", s.seed}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.num_sensors = j.at("n_sensors").get<int>();
    s.doas_deg = j.at("doas_deg").get<std::vector<double>>();
    s.snapshots = j.at("snapshots").get<int>();
    s.snr_db = j.at("snr_db").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario JSON: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

void write_snapshots_csv(std::ostream& os, const CMatrix& x) {
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
      if (t > 0) os << ',';
      os << format_complex(x(n, t));
    }
    os << '\n';
  }
}

void write_snapshots_binary(std::ostream& os, const CMatrix& x) {
  os.write("SNAP", 4);
  put_le(os, static_cast<std::uint32_t>(x.rows()));
  put_le(os, static_cast<std::uint32_t>(x.cols()));
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
      put_le(os, x(n, t).real());
      put_le(os, x(n, t).imag());
    }
  }
}

CMatrix read_snapshots_csv(std::istream& is) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(parse_complex_list(line));
  }
  if (rows.empty()) throw ConfigError("snapshot CSV is empty");
  const std::size_t cols = rows.front().size();
  CMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (rows[n].size() != cols) throw ConfigError("snapshot CSV rows have unequal length");
    for (std::size_t t = 0; t < cols; ++t) {
      x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t)) = rows[n][t];
    }
  }
  return x;
}

CMatrix read_snapshots_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SNAP", 4) != 0) {
    throw ConfigError("binary snapshot file lacks SNAP magic");
  }
  const auto n = get_le<std::uint32_t>(is);
  const auto t_count = get_le<std::uint32_t>(is);
  CMatrix x(n, t_count);
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t t = 0; t < t_count; ++t) {
      const double re = get_le<double>(is);
      const double im = get_le<double>(is);
      x(r, t) = {re, im};
    }
  }
  return x;
}

CMatrix load_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot file " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, "SNAP", 4) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_snapshots_binary(in) : read_snapshots_csv(in);
}

}  // namespace rootdoa
