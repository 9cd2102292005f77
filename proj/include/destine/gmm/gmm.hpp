#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace destine::gmm {

struct GmmComponent {
  double weight = 0;
  double mean = 0;
  double variance = 0;
};

struct GmmFit {
  int k = 0;
  std::vector<GmmComponent> components;  // sorted by mean ascending
  double log_likelihood = 0;
  double bic = 0;
  std::size_t n = 0;
  int param_count = 0;  // 3K - 1: K means, K variances, K-1 free weights
  bool degenerate = false;
  // Largest single-iteration likelihood decrease seen while fitting; EM
  // guarantees this stays at numerical noise level.
  double max_ll_drop = 0;
  int iterations = 0;
};

// Bayesian Information Criterion with k free parameters: -2 ln L + k ln n.
inline double bic(double log_likelihood, int k, std::size_t n) {
  if (n < 1) throw std::invalid_argument("bic needs n >= 1");
  int param_count = 3 * k - 1;
  return -2.0 * log_likelihood + param_count * std::log(static_cast<double>(n));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d4b971f5af327ull;
  return x ^ (x >> 31);
}

// Branch-light e^x for the E-step hot loop (Cephes-style rational
// approximation, ~2 ulp over the density range). The responsibilities for a
// thousand samples times hundreds of EM iterations make libm exp the
// dominant cost; this form inlines and auto-vectorizes.
inline double fast_exp(double x) {
  if (x < -708.0) return 0.0;
  if (x > 709.0) return std::numeric_limits<double>::infinity();
  constexpr double log2e = 1.4426950408889634;
  constexpr double ln2_hi = 6.93145751953125e-1;
  constexpr double ln2_lo = 1.42860682030941723212e-6;
  double k = std::nearbyint(x * log2e);
  double r = x - k * ln2_hi - k * ln2_lo;
  double xx = r * r;
  double p = r * ((1.26177193074810590878e-4 * xx + 3.02994407707441961300e-2) * xx +
                  9.99999999999999999910e-1);
  double q = ((3.00198505138664455042e-6 * xx + 2.52448340349684104192e-3) * xx +
              2.27265548208155028766e-1) *
                 xx +
             2.00000000000000000005e0;
  double er = 1.0 + 2.0 * p / (q - p);
  auto ki = static_cast<std::int64_t>(k);
  double two_k = std::bit_cast<double>((ki + 1023) << 52);
  return er * two_k;
}

struct Params {
  std::vector<double> weight, mean, variance;
};

// k-means++-style seeding, then a few Lloyd refinement sweeps so EM starts
// near a local optimum; weights stay uniform and variances pooled.
inline Params init_params(std::span<const double> x, int k, double pooled_var,
                          std::mt19937_64& rng) {
  Params p;
  p.weight.assign(k, 1.0 / k);
  p.variance.assign(k, pooled_var);
  p.mean.reserve(k);

  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  p.mean.push_back(x[pick(rng)]);
  std::vector<double> dist2(x.size());
  for (int j = 1; j < k; ++j) {
    double total = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double m : p.mean) best = std::min(best, (x[i] - m) * (x[i] - m));
      dist2[i] = best;
      total += best;
    }
    if (total <= 0) {
      p.mean.push_back(x[pick(rng)]);
      continue;
    }
    double target = std::uniform_real_distribution<double>(0, total)(rng);
    std::size_t chosen = x.size() - 1;
    double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += dist2[i];
      if (acc >= target) {
        chosen = i;
        break;
      }
    }
    p.mean.push_back(x[chosen]);
  }

  if (k > 1) {
    std::vector<double> sum(k);
    std::vector<std::size_t> count(k);
    for (int sweep = 0; sweep < 10; ++sweep) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(count.begin(), count.end(), 0u);
      for (double v : x) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          double d = (v - p.mean[j]) * (v - p.mean[j]);
          if (d < best_d) {
            best_d = d;
            best = j;
          }
        }
        sum[best] += v;
        ++count[best];
      }
      bool moved = false;
      for (int j = 0; j < k; ++j) {
        if (count[j] == 0) continue;
        double next = sum[j] / count[j];
        if (next != p.mean[j]) moved = true;
        p.mean[j] = next;
      }
      if (!moved) break;
    }
  }
  return p;
}

struct EmResult {
  Params params;
  double ll = -std::numeric_limits<double>::infinity();
  double max_drop = 0;
  int iterations = 0;
};

inline EmResult run_em(std::span<const double> x, int k, double var_floor,
                       double pooled_var, std::mt19937_64& rng) {
  constexpr int kMaxIters = 500;
  constexpr double kRelTol = 1e-8;
  const std::size_t n = x.size();

  Params p = init_params(x, k, pooled_var, rng);
  // Column-major responsibilities: resp[j*n + i]. Keeps both E and M step
  // inner loops contiguous.
  std::vector<double> resp(n * k);

  EmResult result;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (;;) {
    // E-step, pass 1: weighted densities per component.
    for (int j = 0; j < k; ++j) {
      double coef = p.weight[j] / std::sqrt(2.0 * M_PI * p.variance[j]);
      double neg_inv_2var = -0.5 / p.variance[j];
      double mean = p.mean[j];
      double* dens = &resp[j * n];
      for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - mean;
        dens[i] = coef * fast_exp(neg_inv_2var * d * d);
      }
    }
    // Pass 2: normalize into responsibilities and accumulate likelihood.
    double ll = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0;
      for (int j = 0; j < k; ++j) sum += resp[j * n + i];
      if (sum > 0 && std::isfinite(sum)) {
        ll += std::log(sum);
        for (int j = 0; j < k; ++j) resp[j * n + i] /= sum;
      } else {
        // All densities underflowed: recover in log space for this sample.
        double max_lp = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          double d = x[i] - p.mean[j];
          double lp = std::log(p.weight[j]) -
                      0.5 * std::log(2.0 * M_PI * p.variance[j]) -
                      d * d / (2.0 * p.variance[j]);
          resp[j * n + i] = lp;
          max_lp = std::max(max_lp, lp);
        }
        double es = 0;
        for (int j = 0; j < k; ++j) {
          resp[j * n + i] = std::exp(resp[j * n + i] - max_lp);
          es += resp[j * n + i];
        }
        for (int j = 0; j < k; ++j) resp[j * n + i] /= es;
        ll += max_lp + std::log(es);
      }
    }

    ++result.iterations;
    if (result.iterations > 1) {
      result.max_drop = std::max(result.max_drop, prev_ll - ll);
      if (ll - prev_ll < kRelTol * std::abs(ll)) {
        result.ll = ll;
        break;
      }
    }
    if (result.iterations >= kMaxIters) {
      result.ll = ll;
      break;
    }
    prev_ll = ll;

    // M-step.
    for (int j = 0; j < k; ++j) {
      const double* r = &resp[j * n];
      double nk = 0, sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += r[i];
        sum += r[i] * x[i];
      }
      if (nk < 1e-12) {
        // Collapsed component: reseed it rather than dividing by zero.
        p.mean[j] = x[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
        p.variance[j] = pooled_var;
        p.weight[j] = 1.0 / n;
        continue;
      }
      double mean = sum / nk;
      double var = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - mean;
        var += r[i] * d * d;
      }
      p.weight[j] = nk / n;
      p.mean[j] = mean;
      p.variance[j] = std::max(var / nk, var_floor);
    }
    double wsum = 0;
    for (double w : p.weight) wsum += w;
    for (double& w : p.weight) w /= wsum;
  }
  result.params = std::move(p);
  return result;
}

}  // namespace detail

// EM fit of a K-component univariate mixture: best of 10 seeded restarts,
// each run to convergence (relative likelihood improvement below 1e-8) or
// 500 iterations.
inline GmmFit fit_em(std::span<const double> samples, int k, std::uint64_t seed) {
  const std::size_t n = samples.size();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n < static_cast<std::size_t>(10 * k))
    throw std::invalid_argument("need at least 10*K samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("samples must be finite");
  }

  double mean = 0;
  for (double v : samples) mean += v;
  mean /= n;
  double pooled_var = 0;
  for (double v : samples) pooled_var += (v - mean) * (v - mean);
  pooled_var /= n;

  double var_floor = pooled_var > 0 ? 1e-6 * pooled_var : 1e-12;

  GmmFit fit;
  fit.n = n;

  if (pooled_var == 0) {
    // All samples equal: any K collapses to a single spike.
    fit.k = 1;
    fit.param_count = 2;
    fit.degenerate = true;
    fit.components = {{1.0, mean, var_floor}};
    double log_norm = -0.5 * std::log(2.0 * M_PI * var_floor);
    fit.log_likelihood = static_cast<double>(n) * log_norm;
    fit.bic = bic(fit.log_likelihood, 1, n);
    return fit;
  }

  detail::EmResult best;
  constexpr int kRestarts = 10;
  for (int restart = 0; restart < kRestarts; ++restart) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ (0xD1B54A32D192ED03ull * (restart + 1))));
    detail::EmResult r = detail::run_em(samples, k, var_floor, pooled_var, rng);
    if (r.ll > best.ll) best = std::move(r);
  }

  fit.k = k;
  fit.param_count = 3 * k - 1;
  fit.log_likelihood = best.ll;
  fit.bic = bic(best.ll, k, n);
  fit.max_ll_drop = best.max_drop;
  fit.iterations = best.iterations;
  fit.components.resize(k);
  for (int j = 0; j < k; ++j)
    fit.components[j] = {best.params.weight[j], best.params.mean[j], best.params.variance[j]};
  std::sort(fit.components.begin(), fit.components.end(),
            [](const GmmComponent& a, const GmmComponent& b) { return a.mean < b.mean; });
  return fit;
}

// Fits K = 1..k_max and returns the minimum-BIC fit, ties toward smaller K.
inline GmmFit select_model(std::span<const double> samples, int k_max = 4,
                           std::uint64_t seed = 0) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (samples.size() < static_cast<std::size_t>(10 * k_max))
    throw std::invalid_argument("need at least 10*k_max samples");

  GmmFit best;
  bool have = false;
  for (int k = 1; k <= k_max; ++k) {
    GmmFit fit = fit_em(samples, k, seed);
    if (!have || fit.bic < best.bic) {
      best = std::move(fit);
      have = true;
    }
    if (best.degenerate) break;  // constant data: higher K is meaningless
  }
  return best;
}

// Mixture probability density at x.
inline double density(const GmmFit& fit, double x) {
  double p = 0;
  for (const auto& c : fit.components) {
    double d = x - c.mean;
    p += c.weight * std::exp(-d * d / (2.0 * c.variance)) /
         std::sqrt(2.0 * M_PI * c.variance);
  }
  return p;
}

}  // namespace destine::gmm
