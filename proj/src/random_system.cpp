#include "hinf/random_system.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <regex>
#include <sstream>
#include <limits>
#include <cmath>

#include "hinf/error.hpp"
#include "linalg.hpp"

namespace hinf {

namespace {

Matrix randn(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = cd(normal(rng), 0.0);
  }
  return m;
}

}  // namespace

StateSpaceSystem random_stable_system(const RandomSpec& spec, int index) {
  if (spec.n < 1 || spec.m < 1 || spec.p < 1) {
    throw Error(ErrorCode::InvalidArgument, "random system dimensions must be positive");
  }
  std::seed_seq seq{static_cast<std::uint64_t>(spec.seed), static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Matrix a = randn(rng, spec.n, spec.n);
  if (spec.density < 1.0) {
    for (int j = 0; j < spec.n; ++j) {
      for (int i = 0; i < spec.n; ++i) {
        if (i != j && uniform(rng) >= spec.density) a(i, j) = 0.0;
      }
    }
  }
  const Matrix b = randn(rng, spec.n, spec.m);
  const Matrix c = randn(rng, spec.p, spec.n);
  const Matrix d = spec.d_scale * randn(rng, spec.p, spec.m);

  std::optional<Matrix> e;
  if (spec.descriptor) {
    Matrix em = randn(rng, spec.n, spec.n) / std::sqrt(static_cast<double>(spec.n));
    em.diagonal().array() += 2.0;
    e = em;
  }

  const detail::EigenDecomposition eig = e ? detail::generalized_eigen(a, *e, false, false)
                                           : detail::standard_eigen(a, false, false);
  if (spec.domain == Domain::Continuous) {
    double alpha_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < eig.alpha.size(); ++k) {
      if (std::abs(eig.beta(k)) > 1e-12 * std::max(1.0, std::abs(eig.alpha(k)))) {
        alpha_max = std::max(alpha_max, (eig.alpha(k) / eig.beta(k)).real());
      }
    }
    const Matrix shift_by = e ? *e : Matrix::Identity(spec.n, spec.n);
    a -= (alpha_max + 0.5) * shift_by;
  } else {
    double rho = 0.0;
    for (Eigen::Index k = 0; k < eig.alpha.size(); ++k) {
      if (std::abs(eig.beta(k)) > 1e-12 * std::max(1.0, std::abs(eig.alpha(k)))) {
        rho = std::max(rho, std::abs(eig.alpha(k) / eig.beta(k)));
      }
    }
    if (rho > 0.0) a *= 0.9 / rho;
  }
  return make_system(a, b, c, d, e, spec.domain);
}

RandomSpec parse_random_spec(const std::string& text) {
  RandomSpec spec;
  std::string body = text;
  static const std::regex count_form(R"(^\s*(\d+)\s*x\s*\((.*)\)\s*$)");
  std::smatch match;
  if (std::regex_match(text, match, count_form)) {
    spec.count = std::stoi(match[1]);
    body = match[2];
  }
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream ss(body);
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "random spec token '" + token + "' is not key=value");
    }
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    try {
      if (key == "count") {
        spec.count = std::stoi(val);
      } else if (key == "n") {
        spec.n = std::stoi(val);
      } else if (key == "m") {
        spec.m = std::stoi(val);
      } else if (key == "p") {
        spec.p = std::stoi(val);
      } else if (key == "density") {
        spec.density = std::stod(val);
      } else if (key == "seed") {
        spec.seed = std::stoull(val);
      } else if (key == "d_scale") {
        spec.d_scale = std::stod(val);
      } else if (key == "descriptor") {
        spec.descriptor = val == "1" || val == "true";
      } else if (key == "domain") {
        if (val == "continuous") {
          spec.domain = Domain::Continuous;
        } else if (val == "discrete") {
          spec.domain = Domain::Discrete;
        } else {
          throw Error(ErrorCode::ParseError, "unknown domain '" + val + "'");
        }
      } else {
        throw Error(ErrorCode::ParseError, "unknown random spec key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "bad value for '" + key + "': " + val);
    }
  }
  if (spec.count < 1 || spec.n < 1 || spec.m < 1 || spec.p < 1 || !(spec.density > 0.0) ||
      spec.density > 1.0) {
    throw Error(ErrorCode::ParseError, "random spec out of range: " + text);
  }
  return spec;
}

}  // namespace hinf
