#include "knapbid/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "knapbid/rng.hpp"

namespace knapbid {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double transform_marginal(const Distribution& dist, double z) {
  switch (dist.kind) {
  case Distribution::Kind::uniform:
    return dist.a + (dist.b - dist.a) * normal_cdf(z);
  case Distribution::Kind::lognormal:
    return std::exp(dist.a + dist.b * z);
  }
  return 0.0;
}

void validate_distribution(const Distribution& dist, const char* what) {
  if (dist.kind == Distribution::Kind::uniform) {
    if (dist.b < dist.a) {
      throw ConfigError(std::string(what) + ": uniform needs hi >= lo");
    }
    if (dist.a < 0.0) {
      throw ConfigError(std::string(what) + ": uniform lo must be >= 0");
    }
  } else {
    if (!(dist.b > 0.0)) {
      throw ConfigError(std::string(what) + ": lognormal needs sigma > 0");
    }
  }
}

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool parse_nonneg_double(const std::string& field, double& out) {
  const std::string s = strip(field);
  if (s.empty()) return false;
  try {
    std::size_t consumed = 0;
    out = std::stod(s, &consumed);
    if (consumed != s.size()) return false;
  } catch (const std::exception&) {
    return false;
  }
  return std::isfinite(out) && out >= 0.0;
}

Distribution parse_distribution(const std::string& text) {
  const std::string s = strip(text);
  const auto open = s.find('(');
  const auto close = s.rfind(')');
  if (open == std::string::npos || close == std::string::npos ||
      close < open) {
    throw ConfigError("bad distribution syntax: " + text);
  }
  const std::string name = strip(s.substr(0, open));
  const auto args = split(s.substr(open + 1, close - open - 1), ',');
  if (args.size() != 2) {
    throw ConfigError("distribution needs two parameters: " + text);
  }
  Distribution dist;
  if (name == "uniform") {
    dist.kind = Distribution::Kind::uniform;
  } else if (name == "lognormal") {
    dist.kind = Distribution::Kind::lognormal;
  } else {
    throw ConfigError("unknown distribution: " + name);
  }
  try {
    dist.a = std::stod(strip(args[0]));
    dist.b = std::stod(strip(args[1]));
  } catch (const std::exception&) {
    throw ConfigError("bad distribution parameters: " + text);
  }
  return dist;
}

} // namespace

double ClickModel::probability(double value) const {
  return 1.0 / (1.0 + std::exp(-(intercept + slope * value)));
}

std::vector<Impression> generate_synthetic(const SyntheticSpec& spec) {
  validate_distribution(spec.value_dist, "value_dist");
  validate_distribution(spec.price_dist, "price_dist");
  if (spec.correlation < -1.0 || spec.correlation > 1.0) {
    throw ConfigError("correlation must lie in [-1, 1]");
  }
  // Gaussian copula: translate the target Spearman correlation into the
  // latent Gaussian correlation.
  const double rho = 2.0 * std::sin(M_PI * spec.correlation / 6.0);
  const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));

  Rng rng(spec.seed);
  std::vector<Impression> out;
  out.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rho * z1 + mix * rng.normal();
    Impression imp;
    imp.id = std::to_string(i);
    imp.value = transform_marginal(spec.value_dist, z1);
    imp.paying_price = transform_marginal(spec.price_dist, z2);
    imp.clicked = rng.uniform() < spec.click_model.probability(imp.value);
    out.push_back(std::move(imp));
  }
  return out;
}

SyntheticSpec parse_synthetic_spec(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open synthetic spec: " + path);
  SyntheticSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected key=value");
    }
    const std::string key = strip(s.substr(0, eq));
    const std::string value = strip(s.substr(eq + 1));
    try {
      if (key == "n") {
        spec.n = static_cast<std::size_t>(std::stoull(value));
      } else if (key == "value_dist") {
        spec.value_dist = parse_distribution(value);
      } else if (key == "price_dist") {
        spec.price_dist = parse_distribution(value);
      } else if (key == "correlation") {
        spec.correlation = std::stod(value);
      } else if (key == "click_intercept") {
        spec.click_model.intercept = std::stod(value);
      } else if (key == "click_slope") {
        spec.click_model.slope = std::stod(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else {
        throw ConfigError("unknown key: " + key);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": bad value for " + key);
    }
  }
  return spec;
}

ParseResult parse_impressions(const std::string& path, LogFormat format,
                              const RawLogOptions& raw_options) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open impression log: " + path);

  ParseResult result;
  std::size_t rows = 0;
  std::string line;

  if (format == LogFormat::processed) {
    if (!std::getline(file, line) ||
        strip(line) != "id,value,paying_price,clicked") {
      throw ParseError(path + ": malformed header, expected "
                              "id,value,paying_price,clicked");
    }
    while (std::getline(file, line)) {
      if (strip(line).empty()) continue;
      ++rows;
      const auto fields = split(line, ',');
      Impression imp;
      double value = 0.0;
      double price = 0.0;
      if (fields.size() != 4 || strip(fields[0]).empty() ||
          !parse_nonneg_double(fields[1], value) ||
          !parse_nonneg_double(fields[2], price)) {
        ++result.dropped;
        continue;
      }
      const std::string clicked = strip(fields[3]);
      if (clicked == "0") {
        imp.clicked = false;
      } else if (clicked == "1") {
        imp.clicked = true;
      } else if (!clicked.empty()) {
        ++result.dropped;
        continue;
      }
      imp.id = strip(fields[0]);
      imp.value = value;
      imp.paying_price = price;
      result.impressions.push_back(std::move(imp));
    }
  } else {
    std::ifstream sidecar(raw_options.value_sidecar);
    if (!sidecar) {
      throw ParseError("raw log requires a value sidecar file (got '" +
                       raw_options.value_sidecar + "')");
    }
    std::string value_line;
    while (std::getline(file, line)) {
      if (strip(line).empty()) continue;
      ++rows;
      const bool have_value = static_cast<bool>(std::getline(sidecar,
                                                             value_line));
      const auto fields = split(line, '\t');
      double value = 0.0;
      double price = 0.0;
      if (fields.size() != 24 || !have_value ||
          !parse_nonneg_double(value_line, value) ||
          !parse_nonneg_double(fields[20], price) ||
          strip(fields[0]).empty() || strip(fields[22]).empty()) {
        ++result.dropped;
        continue;
      }
      if (!raw_options.advertiser_filter.empty() &&
          strip(fields[22]) != raw_options.advertiser_filter) {
        ++result.filtered;
        continue;
      }
      Impression imp;
      imp.id = strip(fields[0]);
      imp.value = value;
      imp.paying_price = price;
      result.impressions.push_back(std::move(imp));
    }
  }

  if (rows > 0 &&
      static_cast<double>(result.dropped) > 0.10 * static_cast<double>(rows)) {
    throw ParseError(path + ": " + std::to_string(result.dropped) + " of " +
                     std::to_string(rows) + " rows failed to parse");
  }
  return result;
}

void write_processed_csv(const std::vector<Impression>& ads,
                         const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error("cannot open output file: " + path);
  file << "id,value,paying_price,clicked\n";
  char buf[160];
  for (const auto& ad : ads) {
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", ad.value,
                  ad.paying_price);
    file << ad.id << buf
         << (ad.clicked.has_value() ? (*ad.clicked ? "1" : "0") : "") << "\n";
  }
}

Budget budget_fraction(const std::vector<Impression>& ads, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("budget fraction must lie in (0, 1]");
  }
  double total = 0.0;
  for (const auto& ad : ads) total += ad.paying_price;
  return Budget(fraction * total);
}

DatasetSummary summarize(const std::vector<Impression>& ads) {
  DatasetSummary out;
  out.impressions = ads.size();
  for (const auto& ad : ads) {
    out.total_cost += ad.paying_price;
    if (ad.clicked.value_or(false)) ++out.clicks;
  }
  if (out.impressions > 0) {
    out.ctr = static_cast<double>(out.clicks) /
              static_cast<double>(out.impressions);
  }
  if (out.clicks > 0) {
    out.ecpc = out.total_cost / static_cast<double>(out.clicks);
  }
  return out;
}

} // namespace knapbid
