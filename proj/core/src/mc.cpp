#include "wishratio/mc.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

#include "wishratio/errors.hpp"

namespace wishratio::mc {

namespace {

constexpr long kBatchSize = 8192;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Eigen::MatrixXd bartlett_factor(int m, double n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    // chi_{n-i} with real degrees of freedom via the gamma distribution.
    std::gamma_distribution<double> gamma(0.5 * (n - i), 2.0);
    a(i, i) = std::sqrt(gamma(rng));
    for (int j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  return a;
}

// Largest eigenvalues for one batch; deterministic given the derived seed.
std::vector<double> batch_max_roots(const ProblemSpec& spec, long count,
                                    std::uint64_t derived_seed) {
  std::mt19937_64 rng(derived_seed);
  const int m = spec.m;
  const Eigen::VectorXd sqrt_beta =
      Eigen::Map<const Eigen::VectorXd>(spec.beta.data(), m).array().sqrt();

  std::vector<double> roots;
  roots.reserve(static_cast<size_t>(count));
  for (long s = 0; s < count; ++s) {
    Eigen::MatrixXd a1 = bartlett_factor(m, spec.n1, rng);
    a1 = sqrt_beta.asDiagonal() * a1;           // W1 = A1 A1'
    const Eigen::MatrixXd a2 = bartlett_factor(m, spec.n2, rng);  // W2 = A2 A2'

    // l1(W1 W2^{-1}) from the pencil via the Cholesky factor of W2:
    // eig(A2^{-1} W1 A2^{-T}); W2 is never inverted explicitly.
    const Eigen::MatrixXd t =
        a2.triangularView<Eigen::Lower>().solve(a1);  // A2^{-1} A1
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t * t.transpose(),
                                                      Eigen::EigenvaluesOnly);
    roots.push_back(es.eigenvalues().maxCoeff());
  }
  return roots;
}

}  // namespace

dist::SpdMatrix sample_wishart(double n, std::span<const double> scale_eigs,
                               std::mt19937_64& rng) {
  const int m = static_cast<int>(scale_eigs.size());
  if (m < 1) throw parameter_error("sample_wishart: need at least one eigenvalue");
  if (!(n >= m)) throw parameter_error("sample_wishart requires n >= m");
  for (double e : scale_eigs)
    if (!(e > 0.0)) throw parameter_error("scale eigenvalues must be positive");

  Eigen::MatrixXd a = bartlett_factor(m, n, rng);
  Eigen::VectorXd d(m);
  for (int i = 0; i < m; ++i) d(i) = std::sqrt(scale_eigs[static_cast<size_t>(i)]);
  a = d.asDiagonal() * a;
  const Eigen::MatrixXd w = a * a.transpose();

  dist::SpdMatrix out(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, w(i, j));
  return out;
}

std::vector<double> sample_max_roots(const ProblemSpec& spec, long n_samples,
                                     std::uint64_t seed) {
  spec.validate();
  if (n_samples < 1) throw parameter_error("n_samples must be positive");

  const long n_batches = (n_samples + kBatchSize - 1) / kBatchSize;
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(n_batches)));

  std::vector<std::vector<double>> per_batch(static_cast<size_t>(n_batches));
  std::vector<std::future<void>> futs;
  std::atomic<long> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        const long b = next.fetch_add(1);
        if (b >= n_batches) return;
        const long count = std::min<long>(kBatchSize, n_samples - b * kBatchSize);
        per_batch[static_cast<size_t>(b)] =
            batch_max_roots(spec, count, splitmix64(seed ^ (0x51ed2701ull + static_cast<std::uint64_t>(b))));
      }
    }));
  }
  for (auto& f : futs) f.get();

  std::vector<double> roots;
  roots.reserve(static_cast<size_t>(n_samples));
  for (auto& b : per_batch) roots.insert(roots.end(), b.begin(), b.end());
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<McEstimate> empirical_max_root_cdf(const ProblemSpec& spec,
                                               std::span<const double> xs,
                                               long n_samples, std::uint64_t seed) {
  if (n_samples < 1000)
    throw parameter_error("empirical_max_root_cdf needs n_samples >= 1000");
  const auto roots = sample_max_roots(spec, n_samples, seed);

  std::vector<McEstimate> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const auto it = std::upper_bound(roots.begin(), roots.end(), x);
    const double p = static_cast<double>(it - roots.begin()) /
                     static_cast<double>(n_samples);
    McEstimate e;
    e.probability = p;
    e.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    e.n_samples = n_samples;
    e.seed = seed;
    out.push_back(e);
  }
  return out;
}

}  // namespace wishratio::mc
