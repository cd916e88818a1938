#include "kf/theta.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kf/errors.hpp"
#include "kf/random.hpp"

namespace kf::theta {
namespace {

constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};

cplx e(cplx w) { return std::exp(2.0 * pi * I * w); }

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double tail_estimate(const RiemannThetaSpec& spec, std::span<const cplx> z, int radius) {
  const int g = spec.genus();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.tau.imag());
  const double lambda = eig.eigenvalues().minCoeff();
  double im_z = 0.0;
  for (const auto& zk : z) im_z += zk.imag() * zk.imag();
  im_z = std::sqrt(im_z);
  double amax = 0.0;
  for (double a : spec.alpha) amax = std::max(amax, std::abs(a));

  double bound = 0.0;
  for (int k = radius + 1; k <= radius + 200; ++k) {
    const double r = k - amax;
    if (r <= im_z / lambda) return std::numeric_limits<double>::infinity();
    const double shell = std::pow(2.0 * k + 1.0, g) - std::pow(2.0 * k - 1.0, g);
    const double term = shell * std::exp(-pi * lambda * r * r + 2.0 * pi * r * im_z);
    bound += term;
    if (term < 1e-300) break;
  }
  return bound;
}

std::vector<cplx> shifted(std::span<const cplx> z, std::span<const cplx> l, double sign = 1.0) {
  std::vector<cplx> out(z.begin(), z.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += sign * l[k];
  return out;
}

void check_generator(const ThetaType& t, int generator) {
  if (generator < 0 || generator >= static_cast<int>(t.J.size()))
    throw InputError("lattice generator index " + std::to_string(generator) + " out of range");
}

}  // namespace

void validate(const RiemannThetaSpec& spec) {
  const auto g = spec.tau.rows();
  if (g < 1 || spec.tau.cols() != g) throw InputError("tau must be a non-empty square matrix");
  if ((spec.tau - spec.tau.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InputError("tau must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.tau.imag());
  if (eig.eigenvalues().minCoeff() <= 0.0) throw InputError("tau not in Siegel upper half space");
  if (static_cast<Eigen::Index>(spec.alpha.size()) != g || static_cast<Eigen::Index>(spec.beta.size()) != g)
    throw InputError("characteristics must have one entry per genus dimension");
  if (spec.level < 1) throw InputError("level must be a positive integer");
}

RiemannThetaSpec make_spec(CMatrix tau, std::vector<double> alpha, std::vector<double> beta, int level) {
  const auto g = static_cast<std::size_t>(tau.rows());
  if (alpha.empty()) alpha.assign(g, 0.0);
  if (beta.empty()) beta.assign(g, 0.0);
  RiemannThetaSpec s{std::move(tau), std::move(alpha), std::move(beta), level};
  validate(s);
  return s;
}

ThetaValue eval_riemann_theta(const RiemannThetaSpec& spec, std::span<const cplx> z, int radius) {
  const int g = spec.genus();
  if (static_cast<int>(z.size()) != g) throw InputError("theta argument has the wrong dimension");
  if (radius < 1) throw InputError("theta truncation radius must be positive");

  std::vector<int> n(g, -radius);
  std::vector<double> v(g);
  ThetaValue out;
  out.value = 0.0;
  for (;;) {
    for (int k = 0; k < g; ++k) v[k] = n[k] + spec.alpha[k];
    cplx quad = 0.0, lin = 0.0;
    for (int a = 0; a < g; ++a) {
      cplx row = 0.0;
      for (int b = 0; b < g; ++b) row += spec.tau(a, b) * v[b];
      quad += v[a] * row;
      lin += v[a] * (z[a] + spec.beta[a]);
    }
    const cplx term = std::exp(pi * I * quad + 2.0 * pi * I * lin);
    out.value += term;
    out.abs_sum += std::abs(term);

    int k = 0;
    while (k < g && ++n[k] > radius) n[k++] = -radius;
    if (k == g) break;
  }
  out.tail_bound = tail_estimate(spec, z, radius);
  return out;
}

ThetaType riemann_type_of(const RiemannThetaSpec& spec) {
  validate(spec);
  const int g = spec.genus();
  ThetaType t;
  t.genus = g;
  t.lattice.dim = g;
  for (int k = 0; k < g; ++k) {
    std::vector<cplx> ek(g, 0.0);
    ek[k] = 1.0;
    t.lattice.generators.push_back(ek);
    t.L.emplace_back(g, 0.0);
    t.J.push_back(spec.alpha[k]);
  }
  for (int k = 0; k < g; ++k) {
    std::vector<cplx> col(g);
    for (int a = 0; a < g; ++a) col[a] = spec.tau(a, k);
    t.lattice.generators.push_back(col);
    std::vector<cplx> row(g, 0.0);
    row[k] = -1.0;
    t.L.push_back(row);
    t.J.push_back(-spec.tau(k, k) / 2.0 - spec.beta[k]);
  }
  return t;
}

ThetaType multiply_types(const ThetaType& a, const ThetaType& b) {
  if (a.genus != b.genus || a.lattice.generators.size() != b.lattice.generators.size())
    throw InputError("theta types live on different lattices");
  for (std::size_t k = 0; k < a.lattice.generators.size(); ++k)
    for (int j = 0; j < a.genus; ++j)
      if (std::abs(a.lattice.generators[k][j] - b.lattice.generators[k][j]) > 1e-12)
        throw InputError("theta types live on different lattices");
  ThetaType out = a;
  for (std::size_t k = 0; k < out.J.size(); ++k) {
    out.J[k] += b.J[k];
    for (int j = 0; j < out.genus; ++j) out.L[k][j] += b.L[k][j];
  }
  return out;
}

ThetaType trivial_type(const catalog::Lattice& lattice) {
  ThetaType t;
  t.genus = lattice.dim;
  t.lattice = lattice;
  t.L.assign(lattice.generators.size(), std::vector<cplx>(lattice.dim, 0.0));
  t.J.assign(lattice.generators.size(), 0.0);
  return t;
}

cplx factor_exponent(const ThetaType& type, std::span<const int> steps, std::span<const cplx> x) {
  if (steps.size() != type.J.size()) throw InputError("one step count per lattice generator is required");
  std::vector<cplx> y(x.begin(), x.end());
  cplx w = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& l = type.lattice.generators[k];
    for (int s = 0; s < std::abs(steps[k]); ++s) {
      if (steps[k] > 0) {
        w += dot(type.L[k], y) + type.J[k];
        for (int j = 0; j < type.genus; ++j) y[j] += l[j];
      } else {
        for (int j = 0; j < type.genus; ++j) y[j] -= l[j];
        w -= dot(type.L[k], y) + type.J[k];
      }
    }
  }
  return w;
}

double quasi_periodicity_residual(const RiemannThetaSpec& spec, std::span<const cplx> z, int generator, int radius) {
  const ThetaType t = riemann_type_of(spec);
  check_generator(t, generator);
  const auto h = eval_riemann_theta(spec, z, radius);
  const auto zl = shifted(z, t.lattice.generators[generator]);
  const auto hl = eval_riemann_theta(spec, zl, radius);
  const cplx f = e(dot(t.L[generator], z) + t.J[generator]);
  const double scale = std::max(std::abs(h.value), quasi_floor * h.abs_sum);
  return std::abs(hl.value - f * h.value) / (std::abs(f) * scale);
}

double multiplicativity_residual(const RiemannThetaSpec& a, const RiemannThetaSpec& b, std::span<const cplx> z,
                                 int generator, int radius) {
  const ThetaType t = multiply_types(riemann_type_of(a), riemann_type_of(b));
  check_generator(t, generator);
  const auto ha = eval_riemann_theta(a, z, radius);
  const auto hb = eval_riemann_theta(b, z, radius);
  const auto zl = shifted(z, t.lattice.generators[generator]);
  const cplx hl = eval_riemann_theta(a, zl, radius).value * eval_riemann_theta(b, zl, radius).value;
  const cplx h = ha.value * hb.value;
  const cplx f = e(dot(t.L[generator], z) + t.J[generator]);
  const double scale = std::max(std::abs(h), quasi_floor * ha.abs_sum * hb.abs_sum);
  return std::abs(hl - f * h) / (std::abs(f) * scale);
}

std::vector<cplx> fundamental_point(const CMatrix& tau, std::span<const double> u, std::span<const double> v) {
  const auto g = tau.rows();
  std::vector<cplx> z(g);
  for (Eigen::Index a = 0; a < g; ++a) {
    z[a] = u[a];
    for (Eigen::Index b = 0; b < g; ++b) z[a] += tau(a, b) * v[b];
  }
  return z;
}

LevelSpaceResult level_space_dimension(const CMatrix& tau, int level, int samples, std::uint64_t seed) {
  const int g = static_cast<int>(tau.rows());
  if (g < 1 || g > 2) throw InputError("level-space check supports genus 1 or 2");
  if (level < 1 || level > 4) throw InputError("level must be between 1 and 4");
  int count = 1;
  for (int k = 0; k < g; ++k) count *= level;
  if (samples < 4 * count) throw InputError("level-space check needs at least 4 s^g samples");
  const auto base = make_spec(tau);
  const auto scaled = make_spec(static_cast<double>(level) * tau);
  constexpr int radius = 16;

  // Shifts a_1..a_s with sum zero, one set per product column.
  Rng rng(seed);
  std::vector<std::vector<std::vector<cplx>>> shifts(count);
  for (auto& set : shifts) {
    std::vector<cplx> total(g, 0.0);
    for (int j = 0; j + 1 < level; ++j) {
      std::vector<double> u(g), v(g);
      for (int k = 0; k < g; ++k) {
        u[k] = rng.uniform(-0.5, 0.5);
        v[k] = rng.uniform(-0.5, 0.5);
      }
      auto a = fundamental_point(tau, u, v);
      for (int k = 0; k < g; ++k) total[k] += a[k];
      set.push_back(std::move(a));
    }
    for (auto& t : total) t = -t;
    set.push_back(std::move(total));
  }

  LevelSpaceResult out;
  for (int round = 0; round < 3; ++round) {
    KroneckerSequence seq(2 * g, seed + 1 + static_cast<std::uint64_t>(round));
    CMatrix m(samples, 2 * count);
    for (int i = 0; i < samples; ++i) {
      const auto p = seq.point(static_cast<std::uint64_t>(i));
      const auto z = fundamental_point(tau, std::span(p).first(g), std::span(p).subspan(g));
      std::vector<cplx> sz(g);
      for (int k = 0; k < g; ++k) sz[k] = static_cast<double>(level) * z[k];
      for (int c = 0; c < count; ++c) {
        auto spec = scaled;
        int rem = c;
        for (int k = 0; k < g; ++k) {
          spec.alpha[k] = static_cast<double>(rem % level) / level;
          rem /= level;
        }
        m(i, c) = eval_riemann_theta(spec, sz, radius).value;
        cplx prod = 1.0;
        for (const auto& a : shifts[c]) prod *= eval_riemann_theta(base, shifted(z, a), radius).value;
        m(i, count + c) = prod;
      }
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double nrm = m.col(c).norm();
      if (nrm > 0.0) m.col(c) /= nrm;
    }
    Eigen::BDCSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > rank_threshold * top) ++rank;
    out.ranks.push_back(rank);
    if (round == 0)
      for (Eigen::Index k = 0; k < sv.size(); ++k) out.singular_values.push_back(top > 0 ? sv(k) / top : 0.0);
  }
  if (out.ranks[0] != out.ranks[1] || out.ranks[1] != out.ranks[2])
    throw InputError("numerical rank is unstable across samplings; increase the sample count");
  out.dimension = out.ranks[0];
  return out;
}

}  // namespace kf::theta
