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

#include "cqi/schur.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <map>
#include <numeric>

namespace cqi::schur {

int YoungDiagram::n() const {
  int s = 0;
  for (int r : rows) s += r;
  return s;
}

static void partitions_rec(int n, int max_part, int max_rows, Partition& cur,
                           std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  if (max_rows == 0) return;
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(n - p, p, max_rows - 1, cur, out);
    cur.pop_back();
  }
}

std::vector<Partition> partitions_of(int n, int max_rows) {
  std::vector<Partition> out;
  Partition cur;
  partitions_rec(n, n, max_rows, cur, out);
  return out;
}

Partition conjugate_partition(const Partition& p) {
  if (p.empty()) return {};
  Partition c(p[0], 0);
  for (int part : p)
    for (int j = 0; j < part; ++j) c[j]++;
  return c;
}

long long sn_dim(const Partition& lambda) {
  int n = 0;
  for (int r : lambda) n += r;
  if (n == 0) return 1;
  Partition conj = conjugate_partition(lambda);
  long long num = factorial(n);
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (int j = 0; j < lambda[i]; ++j) {
      long long hook = lambda[i] - j + conj[j] - static_cast<int>(i) - 1;
      num /= hook;  // hook products divide n! exactly for valid partitions
    }
  return num;
}

long long conj_class_size(int n, const Partition& cycle_type) {
  long long denom = 1;
  std::map<int, int> mult;
  for (int part : cycle_type) mult[part]++;
  for (auto [j, m] : mult) {
    for (int t = 0; t < m; ++t) denom *= j;
    denom *= factorial(m);
  }
  return factorial(n) / denom;
}

// Murnaghan-Nakayama via beta sets: removing a border strip of length ell
// corresponds to b -> b-ell inside the beta set, with sign given by the
// number of beta elements jumped over.
static long long mn_char(const Partition& lam, const Partition& mu, std::size_t idx) {
  if (idx == mu.size()) return lam.empty() ? 1 : 0;
  int rows = static_cast<int>(lam.size());
  if (rows == 0) return 0;
  const int ell = mu[idx];
  std::vector<long long> beta(rows);
  for (int i = 0; i < rows; ++i) beta[i] = lam[i] + (rows - 1 - i);
  long long total = 0;
  for (int i = 0; i < rows; ++i) {
    long long target = beta[i] - ell;
    if (target < 0) continue;
    bool occupied = false;
    int jumped = 0;
    for (int j = 0; j < rows; ++j) {
      if (j == i) continue;
      if (beta[j] == target) occupied = true;
      if (beta[j] > target && beta[j] < beta[i]) jumped++;
    }
    if (occupied) continue;
    std::vector<long long> nb = beta;
    nb[i] = target;
    std::sort(nb.begin(), nb.end(), std::greater<long long>());
    Partition next(rows);
    for (int j = 0; j < rows; ++j) next[j] = static_cast<int>(nb[j] - (rows - 1 - j));
    while (!next.empty() && next.back() == 0) next.pop_back();
    long long sign = (jumped % 2 == 0) ? 1 : -1;
    total += sign * mn_char(next, mu, idx + 1);
  }
  return total;
}

long long sn_character(const Partition& lambda, const Partition& cycle_type) {
  int nl = 0, nm = 0;
  for (int r : lambda) nl += r;
  for (int r : cycle_type) nm += r;
  if (nl != nm) throw NumericalError("sn_character: size mismatch");
  Partition mu = cycle_type;
  std::sort(mu.begin(), mu.end(), std::greater<int>());
  return mn_char(lambda, mu, 0);
}

long long multiset_dim(int d, long long n) {
  // binom(n+d-1, d-1) with small d: compute as exact product.
  long long r = 1;
  for (int i = 1; i <= d - 1; ++i) r = r * (n + i) / i;
  return r;
}

long long weyl_dim(const Partition& lambda, int d) {
  if (static_cast<int>(lambda.size()) > d) return 0;
  std::vector<long long> lam(d, 0);
  for (std::size_t i = 0; i < lambda.size(); ++i) lam[i] = lambda[i];
  long long num = 1, den = 1;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      num *= lam[i] - lam[j] + j - i;
      den *= j - i;
      long long g = std::gcd(num, den);
      num /= g;
      den /= g;
    }
  return num / den;
}

Rat dimension_ratio(const Partition& sigma, int k, int d) {
  if (k < 1 || k > d) throw NumericalError("dimension_ratio: k out of range");
  if (static_cast<int>(sigma.size()) > d)
    throw NumericalError("dimension_ratio: partition has more than d rows");
  std::vector<long long> s(d + 1, 0);
  for (std::size_t i = 0; i < sigma.size(); ++i) s[i + 1] = sigma[i];
  auto delta = [&](int i, int j) { return s[i] - s[j]; };
  Rat r(1, factorial(d - 1));
  for (int i = 1; i < k; ++i) r = r * Rat(delta(i, k) + k - i);
  for (int j = k + 1; j <= d; ++j) r = r * Rat(delta(k, j) + j - k);
  for (int i = 1; i < k; ++i)
    for (int j = k + 1; j <= d; ++j)
      r = r * Rat(delta(i, j) + j - i, delta(i, j) + j - i - 1);
  return r;
}

std::vector<Perm> all_perms(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Perm> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Partition perm_cycle_type(const Perm& p) {
  const int n = static_cast<int>(p.size());
  std::vector<bool> seen(n, false);
  Partition type;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0, j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = p[j];
      len++;
    }
    type.push_back(len);
  }
  std::sort(type.begin(), type.end(), std::greater<int>());
  return type;
}

int perm_num_cycles(const Perm& p) {
  return static_cast<int>(perm_cycle_type(p).size());
}

// U_p |x_0..x_{n-1}> = |y> with y_{p[i]} = x_i.
static long long permuted_index(long long x, const Perm& p, int d, int n,
                                std::vector<int>& dig, std::vector<int>& out_dig) {
  long long rem = x;
  for (int i = n - 1; i >= 0; --i) {
    dig[i] = static_cast<int>(rem % d);
    rem /= d;
  }
  for (int i = 0; i < n; ++i) out_dig[p[i]] = dig[i];
  long long y = 0;
  for (int i = 0; i < n; ++i) y = y * d + out_dig[i];
  return y;
}

Matrix permutation_operator(const Perm& p, int d) {
  const int n = static_cast<int>(p.size());
  const long long dn = int_pow(d, n);
  Matrix u = Matrix::Zero(dn, dn);
  std::vector<int> dig(n), out_dig(n);
  for (long long x = 0; x < dn; ++x) u(permuted_index(x, p, d, n, dig, out_dig), x) = 1.0;
  return u;
}

Matrix isotypic_projector(const Partition& lambda, int d) {
  int n = 0;
  for (int r : lambda) n += r;
  const long long dn = int_pow(d, n);
  if (dn > 4096 || n > 8) throw NumericalError("isotypic_projector: size limit exceeded");
  Matrix p = Matrix::Zero(dn, dn);
  if (static_cast<int>(lambda.size()) > d) return p;
  const double scale = static_cast<double>(sn_dim(lambda)) / static_cast<double>(factorial(n));
  std::map<Partition, long long> chi;
  for (const Partition& mu : partitions_of(n, n)) chi[mu] = sn_character(lambda, mu);
  std::vector<int> dig(n), out_dig(n);
  for (const Perm& pi : all_perms(n)) {
    const double c = scale * static_cast<double>(chi[perm_cycle_type(pi)]);
    if (c == 0.0) continue;
    for (long long x = 0; x < dn; ++x)
      p(permuted_index(x, pi, d, n, dig, out_dig), x) += c;
  }
  return p;
}

std::vector<Sector> sector_decomposition(const Matrix& state, int d, int n) {
  std::vector<Sector> out;
  for (const Partition& lam : partitions_of(n, d)) {
    Sector s;
    s.lambda = lam;
    s.projector = isotypic_projector(lam, d);
    s.prob = (s.projector * state).trace().real();
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<YoungDiagram, DensityOperator> schur_sample(const DensityOperator& sigma,
                                                      Rng& rng) {
  const std::vector<int>& dims = sigma.dims();
  const int n = static_cast<int>(dims.size());
  const int d = dims[0];
  for (int dd : dims)
    if (dd != d) throw NumericalError("schur_sample: factors must have equal dimension");
  std::vector<Sector> secs = sector_decomposition(sigma.mat(), d, n);
  double total = 0.0;
  for (const Sector& s : secs) total += std::max(0.0, s.prob);
  if (total < 1e-12) throw NumericalError("schur_sample: all sector probabilities are zero");
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (const Sector& s : secs) {
    acc += std::max(0.0, s.prob);
    if (u < acc || &s == &secs.back()) {
      Matrix post = s.projector * sigma.mat() * s.projector;
      post /= post.trace().real();
      return {YoungDiagram{s.lambda}, DensityOperator(post, dims)};
    }
  }
  throw NumericalError("schur_sample: unreachable");
}

// Letters along rows: 0-based row i carries letter d-1-i, so the occupation
// of the base tensor is the reversed partition.
static std::vector<int> lw_base_digits(const Partition& lambda, int d) {
  std::vector<int> digits;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (int j = 0; j < lambda[i]; ++j) digits.push_back(d - 1 - static_cast<int>(i));
  return digits;
}

// Slots of the canonical tableau in reading order; columns as slot lists.
static std::vector<std::vector<int>> tableau_columns(const Partition& lambda) {
  std::vector<std::vector<int>> cols(lambda.empty() ? 0 : lambda[0]);
  int slot = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (int j = 0; j < lambda[i]; ++j) cols[j].push_back(slot++);
  return cols;
}

static std::vector<std::vector<int>> tableau_rows(const Partition& lambda) {
  std::vector<std::vector<int>> rows(lambda.size());
  int slot = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (int j = 0; j < lambda[i]; ++j) rows[i].push_back(slot++);
  return rows;
}

// Average (with signs for antisymmetric) of slot-subset permutations applied
// to a vector.
static Vector subset_group_average(const Vector& v, const std::vector<int>& slots,
                                   int d, int n, bool antisym) {
  const int k = static_cast<int>(slots.size());
  if (k <= 1) return v;
  const long long dn = v.size();
  Vector out = Vector::Zero(dn);
  std::vector<int> dig(n), nd(n);
  std::vector<Perm> sub = all_perms(k);
  for (const Perm& q : sub) {
    // sign of q
    double sgn = 1.0;
    if (antisym) {
      int inv = 0;
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          if (q[a] > q[b]) inv++;
      sgn = (inv % 2 == 0) ? 1.0 : -1.0;
    }
    for (long long x = 0; x < dn; ++x) {
      if (v(x) == Cx(0.0, 0.0)) continue;
      long long rem = x;
      for (int i = n - 1; i >= 0; --i) {
        dig[i] = static_cast<int>(rem % d);
        rem /= d;
      }
      for (int i = 0; i < n; ++i) nd[i] = dig[i];
      for (int a = 0; a < k; ++a) nd[slots[q[a]]] = dig[slots[a]];
      long long y = 0;
      for (int i = 0; i < n; ++i) y = y * d + nd[i];
      out(y) += sgn * v(x);
    }
  }
  return out / static_cast<double>(factorial(k));
}

Vector lowest_weight_vector(const Partition& lambda, int d) {
  int n = 0;
  for (int r : lambda) n += r;
  if (static_cast<int>(lambda.size()) > d)
    throw NumericalError("lowest_weight_vector: more rows than dimension");
  const long long dn = int_pow(d, n);
  std::vector<int> digits = lw_base_digits(lambda, d);
  Vector v = Vector::Zero(dn);
  long long base = 0;
  for (int i = 0; i < n; ++i) base = base * d + digits[i];
  v(base) = 1.0;
  // The base tensor is constant along rows, so the row symmetrizer fixes it;
  // only the column antisymmetrizer acts.
  for (const std::vector<int>& col : tableau_columns(lambda))
    v = subset_group_average(v, col, d, n, true);
  double norm = v.norm();
  if (norm < 1e-12)
    throw NumericalError("lowest_weight_vector: symmetrizer annihilated the base tensor");
  return v / norm;
}

static Matrix subset_group_average_matrix(const std::vector<int>& slots, int d, int n,
                                          bool antisym) {
  const long long dn = int_pow(d, n);
  Matrix m = Matrix::Zero(dn, dn);
  const int k = static_cast<int>(slots.size());
  std::vector<int> dig(n), nd(n);
  std::vector<Perm> sub = all_perms(k);
  for (const Perm& q : sub) {
    double sgn = 1.0;
    if (antisym) {
      int inv = 0;
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          if (q[a] > q[b]) inv++;
      sgn = (inv % 2 == 0) ? 1.0 : -1.0;
    }
    for (long long x = 0; x < dn; ++x) {
      long long rem = x;
      for (int i = n - 1; i >= 0; --i) {
        dig[i] = static_cast<int>(rem % d);
        rem /= d;
      }
      for (int i = 0; i < n; ++i) nd[i] = dig[i];
      for (int a = 0; a < k; ++a) nd[slots[q[a]]] = dig[slots[a]];
      long long y = 0;
      for (int i = 0; i < n; ++i) y = y * d + nd[i];
      m(y, x) += sgn;
    }
  }
  return m / static_cast<double>(factorial(k));
}

IrrepCopy young_copy(const Partition& lambda, int d) {
  int n = 0;
  for (int r : lambda) n += r;
  if (n > 5) throw NumericalError("young_copy: n too large for the generic path");
  const long long dn = int_pow(d, n);
  Matrix sym = Matrix::Identity(dn, dn);
  for (const std::vector<int>& row : tableau_rows(lambda))
    sym = subset_group_average_matrix(row, d, n, false) * sym;
  Matrix e = sym;
  for (const std::vector<int>& col : tableau_columns(lambda))
    e = subset_group_average_matrix(col, d, n, true) * e;
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinU);
  const long long dim = weyl_dim(lambda, d);
  double smax = svd.singularValues()(0);
  long long rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * smax) rank++;
  if (rank != dim)
    throw NumericalError("young_copy: symmetrizer rank differs from Weyl dimension");
  IrrepCopy copy;
  copy.lambda = lambda;
  copy.d = d;
  copy.n = n;
  copy.q = svd.matrixU().leftCols(dim);
  Vector lw_full = lowest_weight_vector(lambda, d);
  copy.lw = copy.q.adjoint() * lw_full;
  double norm = copy.lw.norm();
  if (norm < 1.0 - 1e-8)
    throw NumericalError("young_copy: lowest-weight vector escapes the copy");
  copy.lw /= norm;
  return copy;
}

Matrix type_permutation_action(const std::vector<int>& sigma, int d, int n) {
  Matrix p = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) p(sigma[i], i) = 1.0;
  return kron_pow(p, n);
}

std::vector<int> weight_of_index(long long x, int d, int n) {
  std::vector<int> w(d, 0);
  for (int i = 0; i < n; ++i) {
    w[static_cast<int>(x % d)]++;
    x /= d;
  }
  return w;
}

Matrix commutant_twirl(const Matrix& x, int r, int n, long long rest_dim) {
  const long long rn = int_pow(r, n);
  if (x.rows() != rn * rest_dim) throw NumericalError("commutant_twirl: size mismatch");
  std::vector<Perm> perms = all_perms(n);
  const int np = static_cast<int>(perms.size());

  Eigen::MatrixXd gram(np, np);
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) {
      // cycles of pi_a^{-1} pi_b
      Perm comp(n);
      std::vector<int> inv_a(n);
      for (int i = 0; i < n; ++i) inv_a[perms[a][i]] = i;
      for (int i = 0; i < n; ++i) comp[i] = inv_a[perms[b][i]];
      gram(a, b) = std::pow(static_cast<double>(r), perm_num_cycles(comp));
    }

  // B_pi(u,v) = sum_x X((pi(x),u),(x,v))
  std::vector<Matrix> bmats(np, Matrix::Zero(rest_dim, rest_dim));
  std::vector<int> dig(n), out_dig(n);
  for (int a = 0; a < np; ++a) {
    Matrix& b = bmats[a];
    for (long long xx = 0; xx < rn; ++xx) {
      long long y = permuted_index(xx, perms[a], r, n, dig, out_dig);
      for (long long u = 0; u < rest_dim; ++u)
        for (long long v = 0; v < rest_dim; ++v)
          b(u, v) += x(y * rest_dim + u, xx * rest_dim + v);
    }
  }

  // Solve G c = b entrywise over the rest indices; pseudo-inverse for r < n.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  Eigen::VectorXd ev = es.eigenvalues();
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(np, np);
  double emax = ev.maxCoeff();
  for (int i = 0; i < np; ++i)
    if (ev(i) > 1e-12 * emax)
      pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev(i);

  std::vector<Matrix> cmats(np, Matrix::Zero(rest_dim, rest_dim));
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b)
      if (pinv(a, b) != 0.0) cmats[a] += pinv(a, b) * bmats[b];

  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (int a = 0; a < np; ++a) {
    for (long long xx = 0; xx < rn; ++xx) {
      long long y = permuted_index(xx, perms[a], r, n, dig, out_dig);
      for (long long u = 0; u < rest_dim; ++u)
        for (long long v = 0; v < rest_dim; ++v)
          out(y * rest_dim + u, xx * rest_dim + v) += cmats[a](u, v);
    }
  }
  return out;
}

Matrix sym_isometry(int d, int m) {
  const long long dm = int_pow(d, m);
  const long long ms = multiset_dim(d, m);
  std::map<std::vector<int>, int> col_of;
  std::vector<std::vector<long long>> members;
  std::vector<int> dig(m);
  for (long long x = 0; x < dm; ++x) {
    long long rem = x;
    for (int i = m - 1; i >= 0; --i) {
      dig[i] = static_cast<int>(rem % d);
      rem /= d;
    }
    std::vector<int> key = dig;
    std::sort(key.begin(), key.end());
    auto it = col_of.find(key);
    if (it == col_of.end()) {
      it = col_of.emplace(key, static_cast<int>(members.size())).first;
      members.emplace_back();
    }
    members[it->second].push_back(x);
  }
  if (static_cast<long long>(members.size()) != ms)
    throw NumericalError("sym_isometry: multiset count mismatch");
  Matrix iso = Matrix::Zero(dm, ms);
  for (std::size_t c = 0; c < members.size(); ++c) {
    double a = 1.0 / std::sqrt(static_cast<double>(members[c].size()));
    for (long long x : members[c]) iso(x, c) = a;
  }
  return iso;
}

Matrix sym_projector(int d, int m) {
  Matrix iso = sym_isometry(d, m);
  return iso * iso.adjoint();
}

}  // namespace cqi::schur
