// Copyright 2026 the cqi-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cqi/qpa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cqi/distances.hpp"
#include "cqi/schur.hpp"

namespace cqi::qpa {

SpectrumParams::SpectrumParams(std::vector<double> probs, int target)
    : p(std::move(probs)), k(target) {
  if (p.empty()) throw NumericalError("SpectrumParams: empty spectrum");
  if (k < 1 || k > d()) throw NumericalError("SpectrumParams: k out of range");
  double tot = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12) throw NumericalError("SpectrumParams: negative probability");
    if (i + 1 < p.size() && p[i + 1] > p[i] + 1e-12)
      throw NumericalError("SpectrumParams: probabilities must be sorted descending");
    tot += p[i];
  }
  if (std::abs(tot - 1.0) > 1e-9) throw NumericalError("SpectrumParams: sum != 1");
  if (min_gap() <= 0)
    throw NumericalError("SpectrumParams: target eigenvalue is degenerate");
}

double SpectrumParams::gap(int i, int j) const {
  if (i < 1 || i > d() || j < 1 || j > d())
    throw NumericalError("SpectrumParams::gap: index out of range");
  return p[static_cast<std::size_t>(i - 1)] - p[static_cast<std::size_t>(j - 1)];
}

double SpectrumParams::min_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= d(); ++i)
    if (i != k) best = std::min(best, std::abs(gap(k, i)));
  return best;
}

double qpa_s0(double c) {
  if (c <= 1) throw NumericalError("qpa_s0: constant must exceed 1");
  // Largest root of S = c ln(c S): g is increasing for S > c, negative at
  // S = c, positive for huge S.
  auto g = [c](double s) { return s - c * std::log(c * s); };
  double lo = c, hi = c;
  while (g(hi) < 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

QpaBoundReport coherent_sample_upper(double m, double eps, double d_min, double c) {
  if (!(d_min > 0 && d_min <= 1)) throw NumericalError("coherent_sample_upper: 0 < D <= 1");
  if (!(m >= 1)) throw NumericalError("coherent_sample_upper: m >= 1");
  if (!(eps > 0 && eps <= 1)) throw NumericalError("coherent_sample_upper: 0 < eps <= 1");
  const double base = m / (eps * d_min * d_min);
  const double s = std::sqrt(m / eps) / (d_min * d_min);
  const double remainder_branch = base + c * s * std::log(c * s);
  const double plain_branch = 135.0 * base;
  QpaBoundReport rep;
  rep.name = "coherent_sample_upper";
  rep.value = std::min(remainder_branch, plain_branch);
  const double s0 = qpa_s0(c);
  rep.valid = s > s0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "S=%.6g S0=%.6g remainder_branch=%.6g plain_branch=%.6g C=%g", s, s0,
                remainder_branch, plain_branch, c);
  rep.note = buf;
  return rep;
}

long long one_gap_upper(double m, double eps, double d12) {
  if (!(d12 > 0)) throw NumericalError("one_gap_upper: gap must be positive");
  if (!(m >= 1) || !(eps > 0)) throw NumericalError("one_gap_upper: bad parameters");
  return static_cast<long long>(std::ceil(98.0 * m / (eps * d12 * d12)));
}

long long adjacent_gap_upper(double m, double eps, double d_min, int k, int d) {
  if (k < 1 || k > d) throw NumericalError("adjacent_gap_upper: k out of range");
  if (!(d_min > 0)) throw NumericalError("adjacent_gap_upper: gap must be positive");
  const double constant = (k == 1 || k == d) ? 98.0 : 135.0;
  return static_cast<long long>(std::ceil(constant * m / (eps * d_min * d_min)));
}

QpaBoundReport relative_gap_loss(double n, double beta,
                                 const std::vector<double>& adjacent_gaps,
                                 const std::vector<double>& cs, double d_min) {
  if (adjacent_gaps.size() != cs.size())
    throw NumericalError("relative_gap_loss: one coefficient per gap");
  if (adjacent_gaps.empty()) throw NumericalError("relative_gap_loss: empty index set");
  if (!(n > 0) || !(d_min > 0)) throw NumericalError("relative_gap_loss: bad parameters");
  double first = 0;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    if (!(adjacent_gaps[j] > 0)) throw NumericalError("relative_gap_loss: gaps must be positive");
    first += cs[j] / adjacent_gaps[j];
  }
  first /= n * (1.0 - beta);
  const double arg = beta * std::sqrt(n) * d_min - 4.0;
  const double second = 2.0 * static_cast<double>(cs.size()) * std::exp(-arg * arg / 32.0);
  QpaBoundReport rep;
  rep.name = "relative_gap_loss";
  rep.value = first + second;
  rep.valid = beta > 0 && beta < 1 && arg > 0;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "first_term=%.6g second_term=%.6g beta*sqrt(n)*D=%.6g",
                first, second, arg + 4.0);
  rep.note = buf;
  return rep;
}

QpaBoundReport eb_one_site_lower(double n, int d, int k, double d_min) {
  if (k < 1 || k > d) throw NumericalError("eb_one_site_lower: k out of range");
  if (!(n > 0) || !(d_min > 0)) throw NumericalError("eb_one_site_lower: bad parameters");
  QpaBoundReport rep;
  rep.name = "eb_one_site_lower";
  const double a = static_cast<double>(d - k);
  rep.value = (1.0 - 8.0 * std::exp(-n * d_min * d_min / 256.0)) * a / (2.0 * (n + a));
  rep.valid = n >= (4.0 / d_min) * (1.0 + 1.0 / d_min);
  rep.note = rep.valid ? "hypothesis n >= (4/D)(1+1/D) holds"
                       : "hypothesis n >= (4/D)(1+1/D) violated";
  return rep;
}

QpaBoundReport eb_asymptotic_fidelity(double n, const SpectrumParams& sp) {
  if (!(n > 0)) throw NumericalError("eb_asymptotic_fidelity: n > 0 required");
  double coef = 0;
  for (int i = 1; i <= sp.d(); ++i) {
    if (i == sp.k) continue;
    const double gap = sp.gap(sp.k, i);
    coef += sp.p[static_cast<std::size_t>(i - 1)] / (gap * gap);
  }
  for (int i = sp.k + 1; i <= sp.d(); ++i) coef += 1.0 / sp.gap(sp.k, i);
  QpaBoundReport rep;
  rep.name = "eb_asymptotic_fidelity";
  rep.value = 1.0 - coef / n;
  rep.asymptotic = true;
  char buf[80];
  std::snprintf(buf, sizeof(buf), "infidelity_coefficient=%.12g", coef);
  rep.note = buf;
  return rep;
}

QpaBoundReport eb_sample_lower(double eps, int d, int k) {
  if (!(eps > 0)) throw NumericalError("eb_sample_lower: eps > 0 required");
  if (k < 1 || k > d) throw NumericalError("eb_sample_lower: k out of range");
  QpaBoundReport rep;
  rep.name = "eb_sample_lower";
  const double a = static_cast<double>(d - k);
  rep.value = a / (2.0 * eps) - a;
  rep.asymptotic = true;
  rep.note = "first-order lower bound";
  return rep;
}

namespace {

// Streaming accumulator for self-normalized importance sampling.
struct SnisAccum {
  double sw = 0, swf = 0, sw2 = 0, sw2f = 0, sw2f2 = 0;
  long long raw = 0;

  void add(double w, double f) {
    sw += w;
    swf += w * f;
    sw2 += w * w;
    sw2f += w * w * f;
    sw2f2 += w * w * f * f;
    ++raw;
  }
  double fidelity() const { return sw > 0 ? swf / sw : 0.0; }
  double ess() const { return sw2 > 0 ? sw * sw / sw2 : 0.0; }
  double se() const {
    if (sw <= 0) return 1.0;
    const double f = fidelity();
    const double num = sw2f2 - 2.0 * f * sw2f + f * f * sw2;
    return std::sqrt(std::max(0.0, num)) / sw;
  }
};

double one_minus_pow(double r, double e) {
  // 1 - r^e without cancellation for r near 1.
  if (r <= 0) return 1.0;
  return -std::expm1(e * std::log(r));
}

double qubit_sn_dim(int a, int b) {
  // Two-row hook product: binom(a+b, b) * (a-b+1)/(a+1).
  const double n = a + b;
  double ln = std::lgamma(n + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a + 1.0) +
              std::log(a - b + 1.0) - std::log(a + 1.0);
  return std::exp(ln);
}

struct QubitSector {
  int a = 0, b = 0;
  double prob = 0;
  double q0 = 0;     // weight normalizer
  double r = 0, c = 0;
};

ProtocolEstimate::Sector finish_sector(const QubitSector& qs, const SnisAccum& acc) {
  ProtocolEstimate::Sector sec;
  sec.shape = qs.b > 0 ? std::vector<int>{qs.a, qs.b} : std::vector<int>{qs.a};
  sec.prob = qs.prob;
  sec.fidelity = acc.fidelity();
  sec.stderr_ = acc.se();
  sec.ess = acc.ess();
  return sec;
}

ProtocolEstimate combine_sectors(const std::vector<ProtocolEstimate::Sector>& secs,
                                 long long raw_total) {
  ProtocolEstimate est;
  double f = 0, var = 0, eff = 0;
  for (const auto& s : secs) {
    f += s.prob * s.fidelity;
    var += s.prob * s.prob * s.stderr_ * s.stderr_;
    eff += s.prob * s.ess;
    if (s.prob >= 0.01 && s.ess < 100) est.ess_ok = false;
  }
  est.fidelity = f;
  est.stderr_ = std::sqrt(var);
  est.effective_samples = eff;
  est.raw_samples = raw_total;
  est.sectors = secs;
  return est;
}

ProtocolEstimate qubit_protocol(const DensityOperator& rho, int n, int k,
                                long long samples, std::uint64_t seed,
                                double min_effective,
                                const std::function<bool()>& should_stop) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
  const double p1 = std::max(0.0, es.eigenvalues()(1));
  const double p2 = std::max(0.0, es.eigenvalues()(0));
  const double r = p2 / p1;
  const double c = 1.0 - r;

  std::vector<QubitSector> sectors;
  for (int b = 0; b <= n / 2; ++b) {
    QubitSector qs;
    qs.a = n - b;
    qs.b = b;
    qs.r = r;
    qs.c = c;
    qs.prob = qubit_sector_prob(qs.a, b, p1, p2);
    const int nn = qs.a - b + 1;
    qs.q0 = c < 1e-12 ? 1.0 / nn : c / one_minus_pow(r, nn);
    if (qs.prob > 1e-15) sectors.push_back(qs);
  }
  if (sectors.empty()) throw NumericalError("eb_covariant_protocol: all sector weights vanish");

  Rng base(seed);
  std::vector<SnisAccum> accums(sectors.size());
  long long raw_total = 0;
  bool stopped = false;
  const int max_batches = 400;
  for (int batch = 0; batch < max_batches; ++batch) {
    if (should_stop && should_stop() && batch > 0) {
      stopped = true;
      break;
    }
    for (std::size_t s = 0; s < sectors.size(); ++s) {
      const QubitSector& qs = sectors[s];
      Rng stream = base.split(static_cast<std::uint64_t>(batch) * 1024 + s);
      const int twoj = qs.a - qs.b;
      for (long long i = 0; i < samples; ++i) {
        // For Haar U(2), z = |U_{01}|^2 is uniform on [0,1]; both the weight
        // and the payoff depend on U only through z.
        const double z = stream.uniform();
        const double w = qs.q0 * std::pow(qs.r + qs.c * z, twoj);
        accums[s].add(w, z);
        ++raw_total;
      }
    }
    double eff = 0;
    for (std::size_t s = 0; s < sectors.size(); ++s)
      eff += sectors[s].prob * accums[s].ess();
    if (eff >= min_effective) break;
  }

  std::vector<ProtocolEstimate::Sector> out;
  out.reserve(sectors.size());
  for (std::size_t s = 0; s < sectors.size(); ++s)
    out.push_back(finish_sector(sectors[s], accums[s]));
  (void)k;  // payoff |U_{k-1,d-k}|^2 equals z for both qubit targets
  ProtocolEstimate est = combine_sectors(out, raw_total);
  est.stopped_early = stopped;
  return est;
}

ProtocolEstimate generic_protocol(const DensityOperator& rho, int n, int k,
                                  long long samples, std::uint64_t seed,
                                  double min_effective,
                                  const std::function<bool()>& should_stop) {
  const int d = static_cast<int>(rho.dim());
  if (n > 4 || d > 3)
    throw NumericalError("eb_covariant_protocol: explicit mode needs n <= 4, d <= 3");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
  Matrix v(d, d);  // eigenvectors sorted by descending eigenvalue
  for (int i = 0; i < d; ++i) v.col(i) = es.eigenvectors().col(d - 1 - i);

  Matrix rho_n = kron_pow(rho.mat(), n);
  std::vector<int> dims(static_cast<std::size_t>(n), d);

  struct GenSector {
    schur::Partition lambda;
    double prob = 0;
    Matrix weight_op;  // projected rho^{(x)n} on the copy, normalized
    Vector lw;         // full-space lowest-weight vector
  };
  std::vector<GenSector> sectors;
  for (const auto& lambda : schur::partitions_of(n, d)) {
    schur::IrrepCopy copy = schur::young_copy(lambda, d);
    Matrix reduced = copy.q.adjoint() * rho_n * copy.q;
    const double tr = reduced.trace().real();
    const double prob = tr * static_cast<double>(schur::sn_dim(lambda));
    if (prob <= 1e-15) continue;
    GenSector gs;
    gs.lambda = lambda;
    gs.prob = prob;
    gs.weight_op = (copy.q * reduced * copy.q.adjoint()) / tr;
    gs.lw = copy.q * copy.lw;
    sectors.push_back(std::move(gs));
  }
  if (sectors.empty()) throw NumericalError("eb_covariant_protocol: all sector weights vanish");

  Rng base(seed);
  std::vector<SnisAccum> accums(sectors.size());
  long long raw_total = 0;
  bool stopped = false;
  const int max_batches = 400;
  for (int batch = 0; batch < max_batches; ++batch) {
    if (should_stop && should_stop() && batch > 0) {
      stopped = true;
      break;
    }
    for (std::size_t s = 0; s < sectors.size(); ++s) {
      GenSector& gs = sectors[s];
      Rng stream = base.split(static_cast<std::uint64_t>(batch) * 1024 + s);
      for (long long i = 0; i < samples; ++i) {
        Matrix u = haar_unitary(d, stream);
        Vector vec = gs.lw;
        for (int slot = 0; slot < n; ++slot) vec = apply_factor_op(u, vec, dims, slot);
        const double w = std::max(0.0, (vec.adjoint() * gs.weight_op * vec)(0, 0).real());
        const Cx amp = (v.col(k - 1).adjoint() * u.col(d - k))(0, 0);
        accums[s].add(w, std::norm(amp));
        ++raw_total;
      }
    }
    double eff = 0;
    for (std::size_t s = 0; s < sectors.size(); ++s)
      eff += sectors[s].prob * accums[s].ess();
    if (eff >= min_effective) break;
  }

  std::vector<ProtocolEstimate::Sector> out;
  out.reserve(sectors.size());
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    ProtocolEstimate::Sector sec;
    sec.shape = sectors[s].lambda;
    sec.prob = sectors[s].prob;
    sec.fidelity = accums[s].fidelity();
    sec.stderr_ = accums[s].se();
    sec.ess = accums[s].ess();
    out.push_back(std::move(sec));
  }
  ProtocolEstimate est = combine_sectors(out, raw_total);
  est.stopped_early = stopped;
  return est;
}

}  // namespace

ProtocolEstimate eb_covariant_protocol(const DensityOperator& rho, int n, int k,
                                       long long samples, std::uint64_t seed,
                                       double min_effective,
                                       const std::function<bool()>& should_stop) {
  if (n < 1) throw NumericalError("eb_covariant_protocol: n >= 1 required");
  if (samples < 1) throw NumericalError("eb_covariant_protocol: samples >= 1 required");
  const int d = static_cast<int>(rho.dim());
  if (k < 1 || k > d) throw NumericalError("eb_covariant_protocol: k out of range");
  if (d == 2) return qubit_protocol(rho, n, k, samples, seed, min_effective, should_stop);
  return generic_protocol(rho, n, k, samples, seed, min_effective, should_stop);
}

double qubit_sector_prob(int a, int b, double p1, double p2) {
  if (b > a || b < 0) throw NumericalError("qubit_sector_prob: need a >= b >= 0");
  if (p1 <= 0) return b == 0 && a == 0 ? 1.0 : 0.0;
  const int nn = a - b + 1;
  const double r = p2 / p1;
  double geo;  // sum_{t=0}^{a-b} r^t
  if (std::abs(1.0 - r) < 1e-12)
    geo = nn;
  else
    geo = one_minus_pow(r, nn) / (1.0 - r);
  double ln = a * std::log(p1);
  if (b > 0) {
    if (p2 <= 0) return 0.0;
    ln += b * std::log(p2);
  }
  return qubit_sn_dim(a, b) * std::exp(ln) * geo;
}

double qubit_sector_fidelity(int a, int b, double p1, double p2) {
  if (b > a || b < 0) throw NumericalError("qubit_sector_fidelity: need a >= b >= 0");
  const int nn = a - b + 1;
  if (p1 <= 0) throw NumericalError("qubit_sector_fidelity: p1 > 0 required");
  const double r = p2 / p1;
  const double c = 1.0 - r;
  if (c < 1e-12) return 0.5;
  const double inner = one_minus_pow(r, nn + 1) / (nn + 1.0) -
                       r * one_minus_pow(r, nn) / static_cast<double>(nn);
  return static_cast<double>(nn) / (c * one_minus_pow(r, nn)) * inner;
}

double qubit_exact_fidelity(double p1, double p2, int n) {
  double num = 0, den = 0;
  for (int b = 0; b <= n / 2; ++b) {
    const double prob = qubit_sector_prob(n - b, b, p1, p2);
    if (prob <= 0) continue;
    num += prob * qubit_sector_fidelity(n - b, b, p1, p2);
    den += prob;
  }
  if (den <= 0) throw NumericalError("qubit_exact_fidelity: vanishing sector mass");
  return num / den;
}

NearestState nearest_state_estimator(const Matrix& sigma, const StateFamily& family,
                                     int grid, int refinements) {
  if (family.box.empty()) throw NumericalError("nearest_state_estimator: empty box");
  if (grid < 2) throw NumericalError("nearest_state_estimator: grid >= 2 required");
  const std::size_t np = family.box.size();
  if (np > 3) throw NumericalError("nearest_state_estimator: at most 3 parameters");

  std::vector<std::pair<double, double>> box = family.box;
  std::vector<double> best_params(np, 0);
  double best = std::numeric_limits<double>::infinity();
  double last_improvement = 0;

  for (int round = 0; round <= refinements; ++round) {
    const double before = best;
    std::vector<double> step(np);
    for (std::size_t i = 0; i < np; ++i)
      step[i] = (box[i].second - box[i].first) / (grid - 1);
    long long total = 1;
    for (std::size_t i = 0; i < np; ++i) total *= grid;
    for (long long idx = 0; idx < total; ++idx) {
      long long rest = idx;
      std::vector<double> params(np);
      for (std::size_t i = 0; i < np; ++i) {
        params[i] = box[i].first + step[i] * static_cast<double>(rest % grid);
        rest /= grid;
      }
      DensityOperator cand = family.at(params);
      const double dist = trace_distance_mat(sigma, cand.mat());
      if (dist < best) {  // strict: ties keep the earliest grid point
        best = dist;
        best_params = params;
      }
    }
    last_improvement = before - best;
    // Shrink the box around the best point to one grid cell on each side.
    for (std::size_t i = 0; i < np; ++i) {
      const double lo = std::max(family.box[i].first, best_params[i] - step[i]);
      const double hi = std::min(family.box[i].second, best_params[i] + step[i]);
      box[i] = {lo, hi};
    }
  }
  NearestState res{family.at(best_params), best_params, best,
                   !(last_improvement > 1e-7) || best < 1e-12};
  return res;
}

StateFamily pure_qubit_family() {
  StateFamily fam;
  fam.at = [](const std::vector<double>& params) {
    const double theta = params.at(0), phi = params.at(1);
    Vector psi(2);
    psi << Cx(std::cos(theta / 2), 0),
        Cx(std::cos(phi), std::sin(phi)) * std::sin(theta / 2);
    return DensityOperator::pure(psi, {2});
  };
  fam.box = {{0.0, M_PI}, {0.0, 2.0 * M_PI}};
  return fam;
}

}  // namespace cqi::qpa
