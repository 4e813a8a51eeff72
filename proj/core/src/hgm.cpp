#include "wishratio/hgm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wishratio/dist.hpp"
#include "wishratio/errors.hpp"
#include "wishratio/pfaffian.hpp"

namespace wishratio::hgm {

mhg::HyperParams gauss_params(const ProblemSpec& spec) {
  return {{0.5 * (spec.m + 1), 0.5 * (spec.n1 + spec.n2)},
          {0.5 * (spec.n1 + spec.m + 1)}};
}

std::vector<double> curve_point(const ProblemSpec& spec, double x) {
  std::vector<double> y;
  y.reserve(spec.beta.size());
  for (double b : spec.beta) y.push_back(x / (b + x));
  return y;
}

double log_prefactor(const ProblemSpec& spec, double x) {
  if (!(x > 0.0)) throw parameter_error("log_prefactor requires x > 0");
  const int m = spec.m;
  const double half_sum = 0.5 * (spec.n1 + spec.n2);
  double lp = dist::log_multigamma(m, half_sum) +
              dist::log_multigamma(m, 0.5 * (m + 1)) -
              dist::log_multigamma(m, 0.5 * spec.n2) -
              dist::log_multigamma(m, 0.5 * (spec.n1 + m + 1));
  lp += 0.5 * spec.n1 * m * std::log(x);
  for (double b : spec.beta) {
    lp += 0.5 * spec.n2 * std::log(b);
    lp -= half_sum * std::log(b + x);
  }
  return lp;
}

InitResult initial_vector(const ProblemSpec& spec, const IntegratorConfig& cfg) {
  spec.validate();
  if (!(cfg.q0 > 0.0)) throw parameter_error("q0 must be positive");

  double x0 = cfg.q0;
  int doublings = 0, halvings = 0;
  InitResult out;

  // Degree at which the term ratio of the positive-form series drops below 1:
  // roughly (ymax b - c) / (1 - ymax). If even that exceeds the degree cap,
  // the evaluation cannot converge and is skipped outright.
  const double b_par = 0.5 * (spec.n1 + spec.n2);
  const double c_par = 0.5 * (spec.n1 + spec.m + 1);

  for (;;) {
    const auto y = curve_point(spec, x0);
    const double ymax = *std::max_element(y.begin(), y.end());

    bool too_slow = ymax > cfg.y_guard ||
                    (ymax * b_par - c_par) / (1.0 - ymax) > cfg.max_degree;
    mhg::PfqDerivatives d;
    if (!too_slow) {
      d = mhg::pfq_with_derivs(gauss_params(spec), y, cfg.max_degree, cfg.series_error);
      too_slow = !d.series.converged;
      if (too_slow)
        out.notes.push_back("series did not converge within the degree cap at x0=" +
                            std::to_string(x0));
    }
    if (too_slow) {
      if (doublings > 0)
        throw initialization_error(
            "cannot choose x0: the starting probability needs a larger x0 but the "
            "series needs a smaller one");
      if (++halvings > cfg.max_retries)
        throw initialization_error("x0 halving retries exhausted");
      out.notes.push_back("halving x0 (slow series convergence)");
      x0 *= 0.5;
      continue;
    }

    const double lp = log_prefactor(spec, x0);
    const double f0 = d.partials[0];
    const double prob0 = std::exp(lp + std::log(f0));
    if (!(prob0 >= cfg.x0value_min)) {
      if (halvings > 0)
        throw initialization_error(
            "cannot choose x0: the starting probability needs a larger x0 but the "
            "series needs a smaller one");
      if (++doublings > cfg.max_retries)
        throw initialization_error(
            "the initial value is zero: the starting probability stays below "
            "x0value_min after repeated doublings of x0");
      out.notes.push_back("doubling x0 (starting probability below x0value_min)");
      x0 *= 2.0;
      continue;
    }

    out.state.x = x0;
    out.state.y = y;
    out.state.F = std::move(d.partials);
    out.log_pref = lp;
    out.prob0 = prob0;
    out.truncation_degree = d.series.truncation_degree;
    const auto& fs = d.series.partial_sums_by_degree;
    if (fs.size() >= 2) {
      const double fk = fs.back(), fk1 = fs[fs.size() - 2];
      out.series_gap_rel = std::abs(fk - fk1) / std::max(std::abs(fk), 1e-300);
    } else {
      out.series_gap_rel = cfg.series_error;
    }
    return out;
  }
}

namespace {

// d/dx of log_prefactor: (n1 m / 2) / x - ((n1+n2)/2) sum_i 1/(beta_i + x).
double log_prefactor_deriv(const ProblemSpec& spec, double x) {
  double d = 0.5 * spec.n1 * spec.m / x;
  const double half_sum = 0.5 * (spec.n1 + spec.n2);
  for (double b : spec.beta) d -= half_sum / (b + x);
  return d;
}

struct Rhs {
  const ProblemSpec& spec;
  const IntegratorConfig& cfg;
  pfaffian::GaussParams prm;

  void operator()(double x, std::span<const double> g, std::span<double> out) const {
    const auto y = curve_point(spec, x);
    pfaffian::PfaffianBuilder builder(y, prm, cfg.min_coord_gap);
    const double lpd = log_prefactor_deriv(spec, x);
    for (size_t r = 0; r < g.size(); ++r) out[r] = lpd * g[r];
    for (int i = 0; i < spec.m; ++i) {
      const double bi = spec.beta[static_cast<size_t>(i)];
      const double w = bi / ((bi + x) * (bi + x));
      builder.build(i).accumulate(w, g, out);
    }
  }
};

double max_norm(std::span<const double> v) {
  double n = 0.0;
  for (double t : v) n = std::max(n, std::abs(t));
  return n;
}

// Dormand-Prince 5(4) embedded pair with FSAL.
class Dopri45 {
 public:
  Dopri45(const Rhs& rhs, std::span<double> state, double x, double abs_err,
          double rel_err)
      : rhs_(rhs), y_(state), x_(x), abs_(abs_err), rel_(rel_err),
        n_(state.size()) {
    for (auto& k : k_) k.resize(n_);
    tmp_.resize(n_);
    err_.resize(n_);
    rhs_(x_, y_, k_[0]);
    have_k1_ = true;
  }

  double x() const { return x_; }

  /// Advances to exactly x_end.
  void advance_to(double x_end) {
    if (h_ == 0.0) h_ = initial_step(x_end);
    while (x_ < x_end) {
      double h = std::min(h_, x_end - x_);
      if (!(h > std::abs(x_) * 1e-14))
        throw integration_error(
            "step size underflow in the adaptive Runge-Kutta method; "
            "decrease abserr or increase q0");
      if (!step(h)) continue;  // rejected; h_ already reduced
    }
  }

 private:
  double initial_step(double x_end) const {
    double h = 0.01 * (1.0 + std::abs(x_));
    if (rhs_cfg_h_init() > 0.0) h = rhs_cfg_h_init();
    return std::min(h, x_end - x_);
  }
  double rhs_cfg_h_init() const { return rhs_.cfg.h_init; }

  bool step(double h) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    if (!have_k1_) {
      rhs_(x_, y_, k_[0]);
      have_k1_ = true;
    }
    auto stage = [&](double ci, std::initializer_list<std::pair<int, double>> terms,
                     std::vector<double>& kout) {
      for (size_t i = 0; i < n_; ++i) {
        double s = y_[i];
        for (const auto& [j, a] : terms) s += h * a * k_[static_cast<size_t>(j)][i];
        tmp_[i] = s;
      }
      rhs_(x_ + ci * h, tmp_, kout);
    };
    stage(c2, {{0, a21}}, k_[1]);
    stage(c3, {{0, a31}, {1, a32}}, k_[2]);
    stage(c4, {{0, a41}, {1, a42}, {2, a43}}, k_[3]);
    stage(c5, {{0, a51}, {1, a52}, {2, a53}, {3, a54}}, k_[4]);
    stage(1.0, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}}, k_[5]);

    // 5th-order solution (also the last stage point for FSAL).
    for (size_t i = 0; i < n_; ++i) {
      tmp_[i] = y_[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] +
                             b5 * k_[4][i] + b6 * k_[5][i]);
    }
    rhs_(x_ + h, tmp_, k_[6]);
    for (size_t i = 0; i < n_; ++i) {
      err_[i] = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                     e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
    }

    const double errn = max_norm(err_);
    const double tol = abs_ + rel_ * std::max(max_norm(y_), max_norm(tmp_));
    if (!std::isfinite(errn))
      throw integration_error("non-finite state in the Runge-Kutta integration");
    const bool accept = errn <= tol;
    const double ratio = errn > 0.0 ? tol / errn : 1e4;
    double factor = 0.9 * std::pow(ratio, 0.2);
    factor = std::clamp(factor, 0.2, 5.0);
    double h_next = h * factor;
    if (rhs_.cfg.h_max > 0.0) h_next = std::min(h_next, rhs_.cfg.h_max);

    if (accept) {
      x_ += h;
      std::copy(tmp_.begin(), tmp_.end(), y_.begin());
      std::copy(k_[6].begin(), k_[6].end(), k_[0].begin());  // FSAL
      h_ = h_next;
      return true;
    }
    h_ = h_next;
    return false;
  }

  const Rhs& rhs_;
  std::span<double> y_;
  double x_;
  double abs_, rel_;
  size_t n_;
  double h_ = 0.0;
  bool have_k1_ = false;
  std::vector<double> k_[7];
  std::vector<double> tmp_, err_;
};

}  // namespace

CdfCurve integrate_cdf(const ProblemSpec& spec, const IntegratorConfig& cfg,
                       std::span<const double> targets) {
  spec.validate();
  if (spec.m > 1 && spec.min_beta_gap() < cfg.min_coord_gap)
    throw singularity_error(
        "tied beta eigenvalues: the Pfaffian system is singular on the diagonal; "
        "use the null-case closed forms or the series method");

  const auto init = initial_vector(spec, cfg);
  CdfCurve curve;
  curve.warnings = init.notes;

  if (!targets.empty()) {
    for (size_t i = 0; i + 1 < targets.size(); ++i)
      if (!(targets[i] < targets[i + 1]))
        throw parameter_error("targets must be strictly ascending");
    if (!(targets.front() > init.state.x))
      throw parameter_error("targets must lie above the accepted x0 = " +
                            std::to_string(init.state.x));
  }

  double abs_err = cfg.abs_err;
  if (cfg.abs_err_auto) {
    abs_err = std::clamp(init.series_gap_rel * init.prob0, 1e-300, cfg.abs_err);
  }
  if (init.prob0 < abs_err) {
    std::ostringstream os;
    os << "abserr seems not to be small enough: the starting value Pr(x0) = "
       << init.prob0 << " lies below abserr = " << abs_err
       << "; decrease abserr (recommended <= " << std::max(init.series_gap_rel * init.prob0, 1e-300)
       << ") or increase q0";
    curve.warnings.push_back(os.str());
  }

  // Prefactor-scaled vector G = exp(log_pref) * F, assembled in log space;
  // G[0] is the probability itself.
  std::vector<double> g(init.state.F.size());
  for (size_t j = 0; j < g.size(); ++j) {
    const double fj = init.state.F[j];
    g[j] = fj > 0.0 ? std::exp(init.log_pref + std::log(fj))
                    : fj * std::exp(init.log_pref);
  }

  Rhs rhs{spec, cfg, {0.5 * (spec.m + 1), 0.5 * (spec.n1 + spec.n2),
                      0.5 * (spec.n1 + spec.m + 1)}};
  Dopri45 stepper(rhs, g, init.state.x, abs_err, cfg.rel_err);

  curve.x.reserve(targets.size());
  curve.prob.reserve(targets.size());
  double clamp_excess = 0.0;
  for (double t : targets) {
    stepper.advance_to(t);
    const double raw = g[0];
    const double clamped = std::clamp(raw, 0.0, 1.0);
    clamp_excess = std::max(clamp_excess, std::abs(raw - clamped));
    curve.x.push_back(t);
    curve.prob.push_back(clamped);
  }

  if (clamp_excess > cfg.rel_err) {
    curve.clamped_beyond_tol = true;
    std::ostringstream os;
    os << "output probabilities clamped to [0,1] by " << clamp_excess
       << ", which exceeds relerr";
    curve.warnings.push_back(os.str());
  }
  for (size_t i = 0; i + 1 < curve.prob.size(); ++i) {
    const double slack = 10.0 * cfg.rel_err * std::max(1.0, curve.prob[i]);
    if (curve.prob[i + 1] < curve.prob[i] - slack) {
      curve.warnings.push_back(
          "abserr seems not to be small enough: the output curve is not "
          "monotone; decrease abserr or increase q0");
      break;
    }
  }
  return curve;
}

}  // namespace wishratio::hgm
