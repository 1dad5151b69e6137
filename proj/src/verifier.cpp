#include "stochmatch/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stochmatch/lp_hierarchy.hpp"
#include "stochmatch/parallel.hpp"

namespace stochmatch {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kE = std::numbers::e;

int grid_count(double step, const char* name) {
  if (!(step > 0.0) || step > 1.0) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
  }
  const double inverse = 1.0 / step;
  const double rounded = std::round(inverse);
  if (std::abs(inverse - rounded) > 1e-6 * rounded) {
    throw std::invalid_argument(std::string("1/") + name + " must be an integer");
  }
  return static_cast<int>(rounded);
}

}  // namespace

void GridConfig::validate() const {
  grid_count(dt, "dt");
  grid_count(dx, "dx");
  if (!(dlambda > 0.0)) throw std::invalid_argument("dlambda must be positive");
  if (dlambda > dt * (1.0 + 1e-12)) throw std::invalid_argument("dlambda must be <= dt");
  if (!(lambda_cap > 0.0)) throw std::invalid_argument("lambda_cap must be positive");
}

int GridConfig::t_steps() const { return grid_count(dt, "dt"); }
int GridConfig::x_steps() const { return grid_count(dx, "dx"); }

std::string report_to_json(const VerifierReport& report) {
  nlohmann::ordered_json doc;
  doc["name"] = report.name;
  doc["pass"] = report.pass;
  doc["target"] = report.target;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.values) values[key] = value;
  doc["values"] = std::move(values);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  doc["params"] = std::move(params);
  doc["notes"] = report.notes;
  if (!report.curve.empty()) {
    nlohmann::ordered_json curve = nlohmann::ordered_json::array();
    for (const auto& [x, ratio] : report.curve) curve.push_back({{"x", x}, {"ratio", ratio}});
    doc["curve"] = std::move(curve);
  }
  return doc.dump(2);
}

std::string curve_to_csv(const VerifierReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "x,ratio\n";
  for (const auto& [x, ratio] : report.curve) out << x << ',' << ratio << '\n';
  return out.str();
}

double top_half_gamma() {
  return 1.0 - (1.0 / (1.0 - kLn2)) * (1.0 / (2.0 * kE) - kLn2 / (kE * kE));
}

double top_half_b(double t) {
  return (std::exp(-t * std::log(2.0 * kE)) - kLn2 * std::exp(-2.0 * t)) / (1.0 - kLn2);
}

OdeCheck top_half_ode_check(double dt) {
  const int steps = grid_count(dt, "dt");
  OdeCheck check;
  for (int k = 1; k < steps; ++k) {
    const double t = k * dt;
    const double prev = top_half_b(t - dt);
    const double here = top_half_b(t);
    const double next = top_half_b(t + dt);
    const double d1 = (next - prev) / (2.0 * dt);
    const double d2 = (next - 2.0 * here + prev) / (dt * dt);
    const double residual = (2.0 + 2.0 * kLn2) * here + (3.0 + kLn2) * d1 + d2;
    check.max_residual = std::max(check.max_residual, std::abs(residual));
  }
  check.b0 = top_half_b(0.0);
  check.b1 = top_half_b(1.0);
  check.slope0 = (-3.0 * top_half_b(0.0) + 4.0 * top_half_b(dt) - top_half_b(2.0 * dt)) /
                 (2.0 * dt);
  return check;
}

namespace {

constexpr double kSingular = 1e-9;
constexpr double kSandwichSlack = 1e-9;

// log(1 - x + x q) / (1 - q), with its limit -x at q = 1.
double log_rate(double x, double q) {
  const double gap = 1.0 - q;
  if (std::abs(gap) < kSingular) return -x;
  return std::log1p(-x * gap) / gap;
}

double first_level_slope(double x, double t, double p) {
  return p * log_rate(x, std::exp(-2.0 * x * t) / p);
}

}  // namespace

double first_level_p(double x, double dt) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in [0, 1]");
  const int steps = grid_count(dt, "dt");
  double p = 1.0;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double k1 = first_level_slope(x, t, p);
    const double k2 = first_level_slope(x, t + dt / 2, p + dt / 2 * k1);
    const double k3 = first_level_slope(x, t + dt / 2, p + dt / 2 * k2);
    const double k4 = first_level_slope(x, t + dt, p + dt * k3);
    p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double next_t = (k + 1) * dt;
    if (p < std::exp(-2.0 * x * next_t) - kSandwichSlack ||
        p > std::exp(-x * next_t) + kSandwichSlack) {
      std::ostringstream msg;
      msg << "first-level trajectory left its sandwich at x=" << x << " t=" << next_t;
      throw std::runtime_error(msg.str());
    }
  }
  return p;
}

FirstLevelCurve first_level_curve(double dt, const std::vector<double>& x_grid) {
  FirstLevelCurve curve;
  curve.points.resize(x_grid.size());
  parallel_for(static_cast<int>(x_grid.size()), [&](int k) {
    const double x = x_grid[k];
    if (!(x > 0.0)) throw std::invalid_argument("first_level_curve: x must be positive");
    const double one_minus_p = 1.0 - first_level_p(x, dt);
    curve.points[k] = {x, one_minus_p, one_minus_p / x};
  });
  curve.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& point : curve.points) {
    if (point.ratio < curve.min_ratio) {
      curve.min_ratio = point.ratio;
      curve.argmin_x = point.x;
    }
  }
  return curve;
}

namespace {

struct ProfileArrays {
  std::vector<double> y, w, weight;
};

ProfileArrays profile_for(double x1, double x2, const GridConfig& grid) {
  LambdaStar star = lambda_star_solve(x1, x2);
  star.first = std::min(star.first, grid.lambda_cap);
  star.second = std::min(star.second, grid.lambda_cap);
  ProfileArrays arrays;
  for (const auto& node : second_level_profile(star, grid.dlambda)) {
    arrays.y.push_back(node.y);
    arrays.w.push_back(node.w);
    arrays.weight.push_back(node.weight);
  }
  return arrays;
}

// -int f_hat_{D,t} over the profile, with A = e^{t(2x1+x2)} D, B = e^{t(x1+2x2)} D.
double d_hat_log_slope(const ProfileArrays& profile, double a, double b) {
  const double ca = std::max(0.0, a - 1.0);
  const double cb = std::max(0.0, b - 1.0);
  const std::size_t n = profile.y.size();
  const double* y = profile.y.data();
  const double* w = profile.w.data();
  const double* weight = profile.weight.data();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += weight[k] * (a * y[k] + b * w[k]) / (ca * y[k] + cb * w[k] + 1.0);
  }
  return -total;
}

void fill_d_hat(double x1, double x2, const GridConfig& grid, std::vector<double>& out) {
  const int steps = grid.t_steps();
  const ProfileArrays profile = profile_for(x1, x2, grid);
  out.assign(steps + 1, 0.0);
  double d = 1.0;
  out[0] = d;
  for (int k = 0; k < steps; ++k) {
    const double t = k * grid.dt;
    const double ea = std::exp(t * (2.0 * x1 + x2));
    const double eb = std::exp(t * (x1 + 2.0 * x2));
    const double trial = d * std::exp(grid.dt * d_hat_log_slope(profile, ea * d, eb * d));
    d *= std::exp(grid.dt * d_hat_log_slope(profile, ea * trial, eb * trial));
    out[k + 1] = d;
  }
}

}  // namespace

std::vector<double> d_hat_trajectory(double x1, double x2, const GridConfig& grid) {
  grid.validate();
  if (!(x1 <= 1.0 && x2 >= 0.0 && x2 <= x1)) {
    throw std::invalid_argument("d_hat_trajectory: need 1 >= x1 >= x2 >= 0");
  }
  std::vector<double> out;
  fill_d_hat(x1, x2, grid, out);
  return out;
}

SecondLevelResult second_level_ratio(double x, const GridConfig& grid) {
  grid.validate();
  if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in (0, 1]");
  const int t_steps = grid.t_steps();
  const int x_steps = grid.x_steps();

  // Step 1-2: q_hat(t) = min{e^{-tx}, max_{x'} e^{t(x'+dx)} d_hat(t)}. Max is
  // exact, so per-block maxima combine independently of scheduling.
  constexpr int kBlock = 16;
  const int blocks = (x_steps + 1 + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> block_max(
      blocks, std::vector<double>(t_steps + 1, -std::numeric_limits<double>::infinity()));
  parallel_for(blocks, [&](int b) {
    std::vector<double> d;
    auto& best = block_max[b];
    for (int k = b * kBlock; k < std::min(x_steps + 1, (b + 1) * kBlock); ++k) {
      const double xp = k * grid.dx;
      fill_d_hat(std::max(x, xp), std::min(x, xp), grid, d);
      for (int s = 0; s <= t_steps; ++s) {
        if (s > 0 && d[s] > d[s - 1]) {
          throw std::runtime_error("d_hat increased along its trajectory");
        }
        const double t = s * grid.dt;
        best[s] = std::max(best[s], std::exp(t * (xp + grid.dx)) * d[s]);
      }
    }
  });
  std::vector<double> q(t_steps + 1);
  for (int s = 0; s <= t_steps; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& block : block_max) best = std::max(best, block[s]);
    q[s] = std::min(std::exp(-s * grid.dt * x), best);
  }

  // Step 3: s_hat with the two-stage exponential update.
  SecondLevelResult result;
  result.min_s_gap = std::numeric_limits<double>::infinity();
  double s = 1.0;
  for (int k = 0; k <= t_steps; ++k) {
    const double t = k * grid.dt;
    const double floor = std::exp(-t * x) * q[k];
    result.min_s_gap = std::min(result.min_s_gap, s - floor);
    if (s < floor - 1e-9 || !(s > 0.0) || s > 1.0) {
      std::ostringstream msg;
      msg << "s_hat left its bounds at x=" << x << " t=" << t;
      throw std::runtime_error(msg.str());
    }
    if (k == t_steps) break;
    const double trial = s * std::exp(grid.dt * log_rate(x, floor / s));
    s *= std::exp(grid.dt * log_rate(x, floor / trial));
  }
  result.s_hat_end = s;
  result.ratio = (1.0 - s) / x;
  return result;
}

std::vector<double> hardness_sequence(long n, double m_frac) {
  if (n < 3) throw std::invalid_argument("hardness needs n >= 3");
  const double nd = static_cast<double>(n);
  const double m_over_n = m_frac;  // m / n
  const double pairs = nd * (nd - 1.0) / 2.0;
  const double triples = nd * (nd - 1.0) * (nd - 2.0) / 6.0;
  std::vector<double> f(n + 1, 0.0);
  for (long s = 0; s < n; ++s) {
    const double a = f[s];
    const double c2 = a * (a - 1.0) / 2.0;
    const double c3 = a * (a - 1.0) * (a - 2.0) / 6.0;
    f[s + 1] = a + 1.0 - m_over_n * c2 / pairs - m_over_n * c3 / triples;
  }
  return f;
}

HardnessResult hardness_bound(long n, double x, double m_frac) {
  if (!(x >= 0.0)) throw std::invalid_argument("x must be nonnegative");
  const std::vector<double> f = hardness_sequence(n, m_frac);
  const double nd = static_cast<double>(n);

  // prefix[r] = sum_{s < r} F(s), Neumaier-compensated.
  std::vector<double> prefix(n + 1, 0.0);
  double sum = 0.0;
  double carry = 0.0;
  for (long r = 0; r < n; ++r) {
    const double value = f[r];
    const double next = sum + value;
    carry += std::abs(sum) >= std::abs(value) ? (sum - next) + value : (value - next) + sum;
    sum = next;
    prefix[r + 1] = sum + carry;
  }

  HardnessResult result;
  result.f_end = f[n];
  result.ratio_bound = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= n; ++k) {
    const long r = n - k;
    const double eb = x * (nd - prefix[r] / nd);
    const double bound = (f[r] + eb + 1.0) / ((1.0 + x) * nd);
    if (bound > result.ratio_bound) {
      result.ratio_bound = bound;
      result.k_star = k;
    }
  }
  return result;
}

JailletLuClosedForm jaillet_lu_closed_form() {
  JailletLuClosedForm form;
  form.pr_t_unmatched = std::exp(-(1.0 + kLn2));
  form.single_middle_term =
      form.pr_t_unmatched * (2.0 * kLn2 / (1.0 - kLn2)) * (1.0 - 2.0 / kE);
  form.alg = 2.0 - 2.0 * form.pr_t_unmatched - form.single_middle_term;
  form.ratio = form.alg / 2.0;
  return form;
}

VerifierReport top_half_report() {
  VerifierReport report;
  report.name = "top-half";
  const double gamma = top_half_gamma();
  report.values = {{"gamma", gamma}, {"one_minus_gamma", 1.0 - gamma}};
  report.target = "gamma > 0.7062";
  report.pass = gamma > 0.7062;
  return report;
}

VerifierReport ode_report(double dt) {
  VerifierReport report;
  report.name = "top-half-ode";
  const OdeCheck check = top_half_ode_check(dt);
  report.values = {{"max_residual", check.max_residual},
                   {"b0", check.b0},
                   {"b1", check.b1},
                   {"slope0", check.slope0}};
  report.params = {{"dt", dt}};
  report.target = "residual <= 1e-5, B(0) = 1, B(1) = 1 - gamma, B'(0) = -1";
  report.pass = check.max_residual <= 1e-5 && std::abs(check.b0 - 1.0) <= 1e-10 &&
                std::abs(check.b1 - (1.0 - top_half_gamma())) <= 1e-10 &&
                std::abs(check.slope0 + 1.0) <= 1e-6;
  return report;
}

VerifierReport first_level_report(double dt, double dx) {
  VerifierReport report;
  report.name = "first-level";
  const int count = grid_count(dx, "dx");
  std::vector<double> xs;
  for (int k = 1; k <= count; ++k) xs.push_back(k * dx);
  const FirstLevelCurve curve = first_level_curve(dt, xs);
  const double at_one = curve.points.back().one_minus_p;
  report.values = {{"one_minus_p_at_1", at_one},
                   {"min_ratio", curve.min_ratio},
                   {"argmin_x", curve.argmin_x}};
  report.params = {{"dt", dt}, {"dx", dx}};
  report.target = "1 - p_1(1) in [0.7070, 0.7080] and min ratio >= 0.707 - 1e-4";
  report.pass = at_one >= 0.7070 && at_one <= 0.7080 && curve.min_ratio >= 0.707 - 1e-4;
  for (const auto& point : curve.points) report.curve.emplace_back(point.x, point.ratio);
  return report;
}

VerifierReport second_level_report(const std::vector<double>& xs, const GridConfig& grid,
                                   double target) {
  VerifierReport report;
  report.name = "second-level";
  double worst = std::numeric_limits<double>::infinity();
  for (double x : xs) {
    const SecondLevelResult result = second_level_ratio(x, grid);
    report.curve.emplace_back(x, result.ratio);
    worst = std::min(worst, result.ratio);
  }
  report.values = {{"min_ratio", worst}};
  report.params = {{"dt", grid.dt},
                   {"dx", grid.dx},
                   {"dlambda", grid.dlambda},
                   {"lambda_cap", grid.lambda_cap}};
  std::ostringstream target_text;
  target_text << "ratio >= " << target << " at every sampled x";
  report.target = target_text.str();
  report.pass = worst >= target;
  return report;
}

VerifierReport hardness_report(long n, double x, double m_frac) {
  VerifierReport report;
  report.name = "hardness";
  const HardnessResult result = hardness_bound(n, x, m_frac);
  report.values = {{"ratio_bound", result.ratio_bound},
                   {"k_star", static_cast<double>(result.k_star)},
                   {"f_n", result.f_end}};
  report.params = {{"n", static_cast<double>(n)}, {"x", x}, {"m_frac", m_frac}};
  report.target = "ratio_bound < 0.703";
  report.pass = result.ratio_bound < 0.703;
  return report;
}

VerifierReport jaillet_lu_report() {
  VerifierReport report;
  report.name = "jl";
  const JailletLuClosedForm form = jaillet_lu_closed_form();
  report.values = {{"alg", form.alg},
                   {"ratio", form.ratio},
                   {"pr_t_unmatched", form.pr_t_unmatched},
                   {"single_middle_term", form.single_middle_term}};
  report.target = "ratio equals gamma to 1e-14";
  report.pass = std::abs(form.ratio - top_half_gamma()) <= 1e-14;
  return report;
}

}  // namespace stochmatch
