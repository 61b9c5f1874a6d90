#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace survival {

/// Default upper cutoff of a Breit-Wigner density, in units of its width above
/// the center mass.
inline constexpr double kDefaultTailSigmas = 1.0e4;

/// Lorentzian mass density |c(mu)|^2 = norm * (width/2pi) / ((mu-m)^2 + width^2/4),
/// truncated to [0, cutoff_hi] and renormalized to unit mass there.
class BreitWignerDensity {
 public:
  double mass() const noexcept { return mass_; }
  double width() const noexcept { return width_; }
  double tail_sigmas() const noexcept { return tail_sigmas_; }
  double cutoff_hi() const noexcept { return cutoff_hi_; }
  double norm() const noexcept { return norm_; }

  /// Density value at mu; zero above the cutoff. Throws std::domain_error for mu < 0.
  double operator()(double mu) const {
    if (!(mu >= 0.0)) throw std::domain_error("Breit-Wigner density evaluated at negative mass");
    if (mu > cutoff_hi_) return 0.0;
    return unnormalized(mu) * norm_;
  }

  /// Raw Lorentzian without truncation or renormalization.
  double unnormalized(double mu) const noexcept {
    const double x = mu - mass_;
    const double h = 0.5 * width_;
    return (h / std::numbers::pi) / (x * x + h * h);
  }

  /// Mass of the raw Lorentzian on [lo, hi], via the arctan antiderivative.
  double unnormalized_mass(double lo, double hi) const noexcept {
    const double h = 0.5 * width_;
    return (std::atan((hi - mass_) / h) - std::atan((lo - mass_) / h)) / std::numbers::pi;
  }

  friend bool operator==(const BreitWignerDensity&, const BreitWignerDensity&) = default;

  friend BreitWignerDensity make_breit_wigner(double, double, double);

 private:
  double mass_ = 1.0;
  double width_ = 0.0;
  double tail_sigmas_ = kDefaultTailSigmas;
  double cutoff_hi_ = 0.0;
  double norm_ = 1.0;
};

/// Builds a Breit-Wigner density centered at `mass` with full width `width`,
/// cut off at mass + tail_sigmas * width and renormalized on [0, cutoff].
inline BreitWignerDensity make_breit_wigner(double mass, double width,
                                            double tail_sigmas = kDefaultTailSigmas) {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::invalid_argument("Breit-Wigner center mass must be positive and finite");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("Breit-Wigner width must be positive and finite");
  if (!(tail_sigmas > 0.0) || !std::isfinite(tail_sigmas))
    throw std::invalid_argument("Breit-Wigner tail_sigmas must be positive and finite");

  BreitWignerDensity d;
  d.mass_ = mass;
  d.width_ = width;
  d.tail_sigmas_ = tail_sigmas;
  d.cutoff_hi_ = mass + tail_sigmas * width;
  d.norm_ = 1.0 / d.unnormalized_mass(0.0, d.cutoff_hi_);
  return d;
}

struct SpectralLine {
  double mass = 0.0;
  double weight = 0.0;

  friend bool operator==(const SpectralLine&, const SpectralLine&) = default;
};

/// Finite set of mass eigenvalues with positive weights summing to one.
class DiscreteDensity {
 public:
  /// Validates the lines and rescales the weights by their sum, so the stored
  /// weights add up to one to rounding. A sum further than 1e-12 from one is
  /// rejected rather than silently renormalized.
  explicit DiscreteDensity(std::vector<SpectralLine> lines) : lines_(std::move(lines)) {
    if (lines_.empty()) throw std::invalid_argument("discrete density needs at least one line");
    double total = 0.0;
    for (const auto& line : lines_) {
      if (!(line.mass >= 0.0) || !std::isfinite(line.mass))
        throw std::invalid_argument("discrete density line mass must be non-negative and finite");
      if (!(line.weight > 0.0) || !std::isfinite(line.weight))
        throw std::invalid_argument("discrete density line weight must be positive");
      total += line.weight;
    }
    for (std::size_t i = 0; i < lines_.size(); ++i)
      for (std::size_t j = i + 1; j < lines_.size(); ++j)
        if (lines_[i].mass == lines_[j].mass)
          throw std::invalid_argument("discrete density line masses must be distinct");
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("discrete density weights must sum to 1");
    for (auto& line : lines_) line.weight /= total;
  }

  const std::vector<SpectralLine>& lines() const noexcept { return lines_; }

  friend bool operator==(const DiscreteDensity&, const DiscreteDensity&) = default;

 private:
  std::vector<SpectralLine> lines_;
};

using MassDensity = std::variant<BreitWignerDensity, DiscreteDensity>;

inline bool is_continuous(const MassDensity& d) noexcept {
  return std::holds_alternative<BreitWignerDensity>(d);
}

/// k-th raw moment, k in {0, 1, 2}. Breit-Wigner moments use closed-form
/// antiderivatives on the truncated support.
inline double moment(const BreitWignerDensity& d, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("only moments 0, 1, 2 are supported");
  const double m = d.mass();
  const double h = 0.5 * d.width();
  const double lo = -m;
  const double hi = d.cutoff_hi() - m;

  // Integrals of x^j L(x) over [lo, hi], x = mu - m.
  const double i0 = d.unnormalized_mass(0.0, d.cutoff_hi());
  const double i1 = (h / (2.0 * std::numbers::pi)) *
                    std::log((hi * hi + h * h) / (lo * lo + h * h));
  const double i2 = (h / std::numbers::pi) * (hi - lo) - h * h * i0;

  switch (k) {
    case 0: return d.norm() * i0;
    case 1: return d.norm() * (i1 + m * i0);
    default: return d.norm() * (i2 + 2.0 * m * i1 + m * m * i0);
  }
}

inline double moment(const DiscreteDensity& d, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("only moments 0, 1, 2 are supported");
  double acc = 0.0;
  for (const auto& line : d.lines()) acc += line.weight * std::pow(line.mass, k);
  return acc;
}

inline double moment(const MassDensity& d, int k) {
  return std::visit([k](const auto& density) { return moment(density, k); }, d);
}

inline std::string describe(const BreitWignerDensity& d) {
  return "breit-wigner(m=" + std::to_string(d.mass()) + ", gamma=" + std::to_string(d.width()) +
         ", tail_sigmas=" + std::to_string(d.tail_sigmas()) + ")";
}

inline std::string describe(const DiscreteDensity& d) {
  return "discrete(" + std::to_string(d.lines().size()) + " lines)";
}

inline std::string describe(const MassDensity& d) {
  return std::visit([](const auto& density) { return describe(density); }, d);
}

}  // namespace survival
