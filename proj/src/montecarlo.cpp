#include "twobsde/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include "twobsde/errors.hpp"
#include "twobsde/random.hpp"

namespace twobsde {

namespace {

struct BatchSums {
  std::vector<double> sum_r;
  std::vector<double> sum_r2;
  std::vector<double> sum_sup;
  double sum_residual2 = 0.0;
};

/// Runs body(batch) for every batch on up to n_threads workers.
template <class Body>
void for_each_batch(int n_batches, int n_threads, Body&& body) {
  n_threads = std::max(1, std::min(n_threads, n_batches));
  if (n_threads == 1) {
    for (int b = 0; b < n_batches; ++b) body(b);
    return;
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      for (int b = w; b < n_batches; b += n_threads) body(b);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("TWOBSDE_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CounterexampleReport simulate_counterexample(const CounterexampleConfig& cfg,
                                             const std::vector<double>& checkpoints,
                                             int n_threads) {
  if (!(std::abs(cfg.c - 1.0) >= 1e-6)) throw DomainError("counterexample requires c != 1");
  if (!(cfg.t_stop > 0.0 && cfg.t_stop < 1.0)) throw DomainError("t_stop must lie in (0, 1)");
  if (cfg.n_paths < 2 || cfg.n_steps < 2 || cfg.n_batches < 1)
    throw DomainError("counterexample needs n_paths >= 2, n_steps >= 2, n_batches >= 1");
  for (double t : checkpoints)
    if (!(t >= 0.0 && t <= cfg.t_stop)) throw DomainError("checkpoints must lie in [0, t_stop]");

  const double c = cfg.c;
  const double dt = cfg.t_stop / cfg.n_steps;
  const double drift_y = 3.0;
  const double drift_x = 3.0 * (1.0 + c * c) / (2.0 * c * c);
  const double stiffness = std::max(drift_y, drift_x) / (1.0 - cfg.t_stop) * dt;
  if (stiffness >= 0.5) {
    const double admissible = 0.5 * (1.0 - cfg.t_stop) / std::max(drift_y, drift_x);
    std::ostringstream os;
    os << "Euler step " << dt << " is unstable near t_stop = " << cfg.t_stop
       << " (drift * dt = " << stiffness << "); admissible dt < " << admissible;
    throw StabilityError(os.str(), admissible);
  }

  const std::size_t n_ck = checkpoints.size();
  std::vector<int> ck_step(n_ck);
  for (std::size_t i = 0; i < n_ck; ++i)
    ck_step[i] = static_cast<int>(std::lround(checkpoints[i] / dt));

  const Philox4x32 gen(cfg.seed);
  const int n_batches = static_cast<int>(std::min<long>(cfg.n_batches, cfg.n_paths));
  std::vector<BatchSums> sums(n_batches);
  const double sqrt_dt = std::sqrt(dt);
  const int n_steps = cfg.n_steps;

  for_each_batch(n_batches, n_threads > 0 ? n_threads : default_thread_count(), [&](int b) {
    BatchSums& acc = sums[b];
    acc.sum_r.assign(n_ck, 0.0);
    acc.sum_r2.assign(n_ck, 0.0);
    acc.sum_sup.assign(n_ck, 0.0);
    const long first = cfg.n_paths * b / n_batches;
    const long last = cfg.n_paths * (b + 1) / n_batches;
    std::vector<double> sup(n_ck);
    std::array<double, 2> draws{};
    for (long p = first; p < last; ++p) {
      double y = 0.0;
      double x = 1.0;
      std::fill(sup.begin(), sup.end(), 0.0);
      double y_anchor = 0.0, x_anchor = 0.0, db_anchor = 0.0, t_anchor = 0.0;
      double residual2 = 0.0;
      auto observe = [&](int step) {
        const double y2 = y * y;
        for (std::size_t i = 0; i < n_ck; ++i) {
          if (step == ck_step[i]) {
            const double r = 3.0 * y2 / (c * c) + x * x;
            acc.sum_r[i] += r;
            acc.sum_r2[i] += r * r;
          }
          if (step >= ck_step[i]) sup[i] = std::max(sup[i], y2);
        }
      };
      observe(0);
      for (int k = 0; k < n_steps; ++k) {
        if (k % 2 == 0) draws = normal_pair(gen, static_cast<std::uint64_t>(p), static_cast<std::uint32_t>(k / 2));
        const double db = sqrt_dt * draws[k % 2];
        const double t = k * dt;
        const double s = 1.0 - t;
        const double root = std::sqrt(s);
        if (k % 2 == 0) {
          y_anchor = y;
          x_anchor = x;
          db_anchor = db;
          t_anchor = t;
        }
        const double y_next = y - drift_y * y / s * dt + x / root * db;
        const double x_next = x - drift_x * x / s * dt + 3.0 * y / (c * root) * db;
        y = y_next;
        x = x_next;
        if (k % 2 == 1) {
          const double s0 = 1.0 - t_anchor;
          const double r = y - y_anchor -
                           (-drift_y * y_anchor / s0 * (2.0 * dt) +
                            x_anchor / std::sqrt(s0) * (db_anchor + db));
          residual2 += r * r;
        }
        observe(k + 1);
      }
      for (std::size_t i = 0; i < n_ck; ++i) acc.sum_sup[i] += sup[i];
      acc.sum_residual2 += residual2;
    }
  });

  CounterexampleReport rep;
  rep.config = cfg;
  rep.dt = dt;
  rep.bias_budget = 10.0 * dt;
  std::vector<double> sum_r(n_ck, 0.0), sum_r2(n_ck, 0.0), sum_sup(n_ck, 0.0);
  double sum_res = 0.0;
  for (const BatchSums& s : sums) {
    for (std::size_t i = 0; i < n_ck; ++i) {
      sum_r[i] += s.sum_r[i];
      sum_r2[i] += s.sum_r2[i];
      sum_sup[i] += s.sum_sup[i];
    }
    sum_res += s.sum_residual2;
  }

  const auto n = static_cast<double>(cfg.n_paths);
  rep.all_within_tolerance = true;
  std::vector<double> fit_x, fit_y;
  for (std::size_t i = 0; i < n_ck; ++i) {
    CheckpointStat st;
    st.t = checkpoints[i];
    st.t_grid = ck_step[i] * dt;
    st.mean_R = sum_r[i] / n;
    const double var = std::max(0.0, (sum_r2[i] - n * st.mean_R * st.mean_R) / (n - 1.0));
    st.stderr_R = std::sqrt(var / n);
    st.target = std::pow(1.0 - st.t_grid, 3);
    const double err = st.mean_R - st.target;
    st.z_score = st.stderr_R > 0.0 ? err / st.stderr_R : 0.0;
    st.mean_sup_y2 = sum_sup[i] / n;
    st.within_tolerance = std::abs(err) <= 3.0 * st.stderr_R + rep.bias_budget;
    rep.all_within_tolerance = rep.all_within_tolerance && st.within_tolerance;
    if (st.t_grid > 0.0 && st.mean_sup_y2 > 0.0) {
      fit_x.push_back(std::log(1.0 - st.t_grid));
      fit_y.push_back(std::log(st.mean_sup_y2));
    }
    rep.checkpoints.push_back(st);
  }

  if (fit_x.size() >= 2) {
    const double m = static_cast<double>(fit_x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < fit_x.size(); ++i) {
      mx += fit_x[i] / m;
      my += fit_y[i] / m;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < fit_x.size(); ++i) {
      sxy += (fit_x[i] - mx) * (fit_y[i] - my);
      sxx += (fit_x[i] - mx) * (fit_x[i] - mx);
    }
    rep.decay_exponent = sxy / sxx;
    rep.decay_prefactor = std::exp(my - rep.decay_exponent * mx);
  }
  rep.dynamics_residual = std::sqrt(sum_res / n);
  return rep;
}

MCEstimate mc_terminal_value(const Payoff& g, double a, long n_paths, std::uint64_t seed,
                             double x0) {
  if (!(a > 0.0)) throw DomainError("mc_terminal_value requires a > 0");
  if (n_paths < 2) throw DomainError("mc_terminal_value needs at least two paths");
  const Philox4x32 gen(seed);
  const long pairs = (n_paths + 1) / 2;
  const double sigma = std::sqrt(a);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < pairs; i += 2) {
    const auto xi = normal_pair(gen, static_cast<std::uint64_t>(i / 2), 0u);
    for (int m = 0; m < 2 && i + m < pairs; ++m) {
      const double v = 0.5 * (g(x0 + sigma * xi[m]) + g(x0 - sigma * xi[m]));
      sum += v;
      sum2 += v * v;
    }
  }
  const auto n = static_cast<double>(pairs);
  MCEstimate est;
  est.mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * est.mean * est.mean) / std::max(1.0, n - 1.0));
  est.std_error = std::sqrt(var / n);
  return est;
}

void write_csv(std::ostream& os, const CounterexampleReport& report) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "t,mean_R,stderr_R,target,(mean-target)/stderr\n";
  for (const auto& c : report.checkpoints)
    buf << c.t << ',' << c.mean_R << ',' << c.stderr_R << ',' << c.target << ',' << c.z_score
        << '\n';
  os << buf.str();
}

}  // namespace twobsde
