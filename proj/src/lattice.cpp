#include "gaugelab/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <fstream>
#include <json.hpp>
#include <random>

#include "gaugelab/errors.hpp"
#include "gaugelab/parallel.hpp"

namespace gaugelab {

namespace {

inline Spinor mul(const GroupElement& g, const Spinor& p) {
  return {Complex(g.w, g.v[2]) * p[0] + Complex(g.v[1], g.v[0]) * p[1],
          Complex(-g.v[1], g.v[0]) * p[0] + Complex(g.w, -g.v[2]) * p[1]};
}

inline Spinor mul_adjoint(const GroupElement& g, const Spinor& p) {
  return {Complex(g.w, -g.v[2]) * p[0] + Complex(-g.v[1], -g.v[0]) * p[1],
          Complex(g.v[1], -g.v[0]) * p[0] + Complex(g.w, g.v[2]) * p[1]};
}

void require_same(const LatticeSpec& a, const LatticeSpec& b) {
  if (!(a == b)) throw InputError("lattice spec mismatch");
}

// out = Delta_A in on raw arrays of 2 n^3 complex numbers.
void apply_raw(const LinkField& links, const Complex* in_raw, Complex* out_raw) {
  const auto& spec = links.spec;
  const int n = spec.n;
  const double inv_h2 = 1.0 / (spec.h() * spec.h());
  const auto* in = reinterpret_cast<const Spinor*>(in_raw);
  auto* out = reinterpret_cast<Spinor*>(out_raw);
  const std::ptrdiff_t stride[3] = {std::ptrdiff_t(n) * n, n, 1};
  parallel_for(n, [&](std::ptrdiff_t i) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int idx[3] = {int(i), j, k};
        const std::size_t s = spec.index(int(i), j, k);
        Spinor acc{6.0 * in[s][0], 6.0 * in[s][1]};
        for (int d = 0; d < 3; ++d) {
          if (idx[d] + 1 < n) {
            const Spinor t = mul(links.U[d][s], in[s + stride[d]]);
            acc[0] -= t[0];
            acc[1] -= t[1];
          }
          if (idx[d] > 0) {
            const std::size_t b = s - stride[d];
            const Spinor t = mul_adjoint(links.U[d][b], in[b]);
            acc[0] -= t[0];
            acc[1] -= t[1];
          }
        }
        out[s] = {acc[0] * inv_h2, acc[1] * inv_h2};
      }
  });
}

Complex raw_inner(const Complex* a, const Complex* b, std::size_t count) {
  return deterministic_reduce<Complex>(std::ptrdiff_t(count),
                                       [&](std::ptrdiff_t i) { return std::conj(a[i]) * b[i]; });
}

GroupElement random_element(std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> gauss(0.0, amplitude);
  return exponential(Su2{{gauss(rng), gauss(rng), gauss(rng)}});
}

using Matrix = Eigen::MatrixXcd;

Eigen::Map<const Eigen::VectorXcd> as_vector(const GridField& f) {
  return {reinterpret_cast<const Complex*>(f.psi.data()), Eigen::Index(2 * f.psi.size())};
}

// Block Lanczos with full reorthogonalization, run on T_d((c - Delta)/e) where
// [cut, upper] is mapped onto [-1, 1]. The filter shares eigenvectors with the
// operator and sends the wanted low end far above everything else. Each cycle
// restarts from the best Ritz vectors of the operator itself with a tighter cut.
class BlockLanczos {
 public:
  BlockLanczos(const LinkField& links, int k, double tol, int max_iter, const EigenOptions& opts)
      : links_(links), k_(k), tol_(tol), max_iter_(max_iter), degree_(opts.degree), rng_(opts.seed) {
    N_ = Eigen::Index(2 * links.spec.sites());
    p_ = opts.block > 0 ? opts.block : k + 3;
    p_ = std::max<Eigen::Index>(p_, k);
    cap_ = std::max<Eigen::Index>(opts.max_basis, 2 * p_);
    cap_ = std::min<Eigen::Index>(cap_, N_ - p_);
    if (cap_ < 2 * p_) throw InputError("lattice too small for the requested block size");
    if (degree_ < 1) throw InputError("filter degree must be >= 1");
    const double h = links.spec.h();
    upper_ = 12.0 / (h * h) * (1.0 + 1e-12);
    V_.resize(N_, cap_ + p_);
    H_ = Matrix::Zero(cap_ + p_, cap_ + p_);
  }

  std::vector<Eigenpair> run(std::vector<GridField>* vectors) {
    Matrix X(N_, p_);
    fill_random(X);
    double cut = 0.0;
    int degree = 1;
    std::vector<double> best;
    while (true) {
      const auto pairs = cycle(X, cut, degree);
      best.clear();
      for (int i = 0; i < k_; ++i) best.push_back(pairs[std::size_t(i)].value);
      const bool done = std::all_of(pairs.begin(), pairs.begin() + k_, [&](const Eigenpair& e) {
        return e.residual <= tol_ * std::abs(e.value) + tol_;
      });
      if (done) {
        if (vectors) {
          vectors->clear();
          const double scale = std::pow(links_.spec.h(), -1.5);
          for (Eigen::Index i = 0; i < k_; ++i) {
            GridField f(links_.spec);
            Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<Complex*>(f.psi.data()), N_) = scale * X.col(i);
            vectors->push_back(std::move(f));
          }
        }
        return {pairs.begin(), pairs.begin() + k_};
      }
      if (steps_ >= max_iter_)
        throw ConvergenceError("lowest_eigenvalues: no convergence within max_iter block steps", best);
      const double top = pairs.back().value;
      cut = std::min(top + 1e-3 * (upper_ - top), 0.5 * upper_);
      degree = degree_;
    }
  }

 private:
  void fill_random(Matrix& M) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      for (Eigen::Index r = 0; r < M.rows(); ++r) M(r, c) = Complex(gauss(rng_), gauss(rng_));
  }

  void apply_block(const Matrix& X, Matrix& Y) const {
    Y.resize(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) apply_raw(links_, X.col(c).data(), Y.col(c).data());
  }

  void apply_filter(const Matrix& X, Matrix& Y) const {
    const double centre = 0.5 * (cut_ + upper_), half = 0.5 * (upper_ - cut_);
    Y.resize(X.rows(), X.cols());
    Eigen::VectorXcd prev(N_), cur(N_), next(N_), Ax(N_);
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      prev = X.col(c);
      apply_raw(links_, prev.data(), Ax.data());
      cur = (centre * prev - Ax) / half;
      for (int j = 1; j < degree_now_; ++j) {
        apply_raw(links_, cur.data(), Ax.data());
        next = (2.0 / half) * (centre * cur - Ax) - prev;
        prev.swap(cur);
        cur.swap(next);
      }
      Y.col(c) = cur;
    }
  }

  // Orthonormalizes W against V[:, 0..m) and within itself into V[:, m..m+p).
  // Column coefficients go to B when given; rank loss is filled with random directions.
  void orthonormalize_frontier(Matrix& W, Matrix* B, Eigen::VectorXd scales = {}) {
    if (scales.size() == 0) scales = W.colwise().norm().transpose();
    if (m_ > 0) {
      const Matrix C = V_.leftCols(m_).adjoint() * W;
      W.noalias() -= V_.leftCols(m_) * C;
    }
    if (B) *B = Matrix::Zero(p_, p_);
    for (Eigen::Index c = 0; c < p_; ++c) {
      auto w = W.col(c);
      const double scale = scales(c);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index d = 0; d < c; ++d) {
          const Complex r = V_.col(m_ + d).dot(w);
          w -= r * V_.col(m_ + d);
          if (B) (*B)(d, c) += r;
        }
      double nrm = w.norm();
      if (nrm <= 1e-10 * scale || nrm == 0.0) {
        if (B) (*B)(c, c) = 0.0;
        Matrix fresh(N_, 1);
        fill_random(fresh);
        for (int pass = 0; pass < 2; ++pass) {
          if (m_ > 0) fresh.noalias() -= V_.leftCols(m_) * (V_.leftCols(m_).adjoint() * fresh);
          for (Eigen::Index d = 0; d < c; ++d) fresh.col(0) -= V_.col(m_ + d).dot(fresh.col(0)) * V_.col(m_ + d);
        }
        w = fresh.col(0);
        nrm = w.norm();
      } else if (B) {
        (*B)(c, c) = nrm;
      }
      V_.col(m_ + c) = w / nrm;
    }
  }

  // Absorbs the frontier block into the basis and builds the next one.
  void extend() {
    const Eigen::Index f = m_;
    Matrix W;
    apply_filter(V_.middleCols(f, p_), W);
    const Eigen::VectorXd scales = W.colwise().norm().transpose();
    const Matrix C = V_.leftCols(f + p_).adjoint() * W;
    H_.block(0, f, f + p_, p_) = C;
    H_.block(f, 0, p_, f + p_) = C.adjoint();
    const Matrix D = C.bottomRows(p_);
    H_.block(f, f, p_, p_) = 0.5 * (D + D.adjoint());
    W.noalias() -= V_.leftCols(f + p_) * C;
    m_ = f + p_;
    Matrix B;
    orthonormalize_frontier(W, &B, scales);
    H_.block(m_, f, p_, p_) = B;
    H_.block(f, m_, p_, p_) = B.adjoint();
  }

  // One filtered Lanczos pass from the block X; returns the p Ritz pairs of the
  // operator on the dominant filtered subspace, ascending, and overwrites X with their vectors.
  std::vector<Eigenpair> cycle(Matrix& X, double cut, int degree) {
    cut_ = cut;
    degree_now_ = degree;
    H_.setZero();
    m_ = 0;
    orthonormalize_frontier(X, nullptr);
    while (m_ + p_ <= cap_ && (m_ == 0 || steps_ < max_iter_)) {
      extend();
      ++steps_;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> filtered(H_.topLeftCorner(m_, m_).eval());
    const Matrix Y = V_.leftCols(m_) * filtered.eigenvectors().rightCols(p_);
    Matrix AY;
    apply_block(Y, AY);
    const Matrix G = Y.adjoint() * AY;
    Eigen::SelfAdjointEigenSolver<Matrix> ritz((0.5 * (G + G.adjoint())).eval());
    X = Y * ritz.eigenvectors();
    const Matrix AX = AY * ritz.eigenvectors();
    std::vector<Eigenpair> out;
    for (Eigen::Index i = 0; i < p_; ++i) {
      const double theta = ritz.eigenvalues()(i);
      out.push_back({theta, (AX.col(i) - theta * X.col(i)).norm() / X.col(i).norm()});
    }
    return out;
  }

  const LinkField& links_;
  Eigen::Index k_;
  double tol_;
  int max_iter_;
  int degree_;
  std::mt19937_64 rng_;
  Eigen::Index N_ = 0, p_ = 0, cap_ = 0, m_ = 0;
  int steps_ = 0;
  double upper_ = 0.0, cut_ = 0.0;
  int degree_now_ = 1;
  Matrix V_, H_;
};

}  // namespace

LatticeSpec LatticeSpec::make(double L, int n) {
  if (n < 8) throw InputError("lattice needs n >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw InputError("lattice half-width must be positive");
  return {L, n};
}

LatticeSpec LatticeSpec::with_spacing(double h, int n) {
  if (!(h > 0.0)) throw InputError("lattice spacing must be positive");
  return make(0.5 * h * (n - 1), n);
}

Complex inner(const GridField& a, const GridField& b) {
  require_same(a.spec, b.spec);
  const double h = a.spec.h();
  return h * h * h *
         raw_inner(reinterpret_cast<const Complex*>(a.psi.data()), reinterpret_cast<const Complex*>(b.psi.data()),
                   2 * a.psi.size());
}

double norm_squared(const GridField& a) { return inner(a, a).real(); }

GridField sample(const LatticeSpec& spec, const SpinorField& psi) {
  GridField out(spec);
  parallel_for(spec.n, [&](std::ptrdiff_t i) {
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) out.at(int(i), j, k) = psi.value(spec.position(int(i), j, k));
  });
  return out;
}

LinkField::LinkField(const LatticeSpec& s) : spec(s) {
  for (auto& u : U) u.assign(s.sites(), GroupElement::identity());
}

LinkField make_links(const ConnectionField& field, const LatticeSpec& spec) {
  LinkField links(spec);
  const double h = spec.h();
  parallel_for(spec.n, [&](std::ptrdiff_t i) {
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) {
        const Vec3 x = spec.position(int(i), j, k);
        for (int d = 0; d < 3; ++d) {
          Vec3 mid = x;
          mid[d] += 0.5 * h;
          links.at(d, int(i), j, k) = exponential(h * field(mid)[d]);
        }
      }
  });
  return links;
}

LinkField random_links(const LatticeSpec& spec, std::uint64_t seed, double amplitude) {
  LinkField links(spec);
  std::mt19937_64 rng(seed);
  for (auto& u : links.U)
    for (auto& g : u) g = random_element(rng, amplitude);
  return links;
}

double max_unitarity_residual(const LinkField& links) {
  double worst = 0.0;
  for (const auto& u : links.U)
    for (const auto& g : u) worst = std::max(worst, unitarity_residual(g));
  return worst;
}

GridField apply_operator(const LinkField& links, const GridField& psi) {
  require_same(links.spec, psi.spec);
  GridField out(psi.spec);
  apply_raw(links, reinterpret_cast<const Complex*>(psi.psi.data()), reinterpret_cast<Complex*>(out.psi.data()));
  return out;
}

double hermiticity_residual(const LinkField& links, int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("hermiticity_residual needs trials >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto random_field = [&] {
    GridField f(links.spec);
    for (auto& s : f.psi) s = {Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng))};
    return f;
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const GridField phi = random_field(), psi = random_field();
    const Complex lhs = inner(apply_operator(links, phi), psi);
    const Complex rhs = inner(phi, apply_operator(links, psi));
    worst = std::max(worst, std::abs(lhs - rhs) / std::sqrt(norm_squared(phi) * norm_squared(psi)));
  }
  return worst;
}

std::vector<Eigenpair> lowest_eigenvalues(const LinkField& links, int k, double tol, int max_iter,
                                          const EigenOptions& opts, std::vector<GridField>* vectors) {
  if (k < 1) throw InputError("lowest_eigenvalues needs k >= 1");
  if (std::size_t(k) > links.spec.sites()) throw InputError("lowest_eigenvalues: k exceeds n^3");
  if (!(tol > 0.0)) throw InputError("lowest_eigenvalues needs tol > 0");
  if (max_iter < 1) throw InputError("lowest_eigenvalues needs max_iter >= 1");
  return BlockLanczos(links, k, tol, max_iter, opts).run(vectors);
}

double flat_eigenvalue(const LatticeSpec& spec, int m1, int m2, int m3) {
  double sum = 0.0;
  for (int m : {m1, m2, m3}) {
    if (m < 1 || m > spec.n) throw InputError("flat_eigenvalue: mode index out of range");
    sum += 2.0 - 2.0 * std::cos(M_PI * m / (spec.n + 1));
  }
  return sum / (spec.h() * spec.h());
}

double rayleigh_quotient(const LinkField& links, const GridField& psi) {
  const double den = norm_squared(psi);
  if (!(den > 0.0)) throw InputError("rayleigh_quotient of the zero field");
  return inner(apply_operator(links, psi), psi).real() / den;
}

double covariant_gradient_energy(const LinkField& links, const GridField& psi) {
  require_same(links.spec, psi.spec);
  const auto& spec = links.spec;
  const int n = spec.n;
  const double h = spec.h();
  const double total = deterministic_reduce<double>(std::ptrdiff_t(spec.sites()), [&](std::ptrdiff_t s) {
    const int idx[3] = {int(s / (n * n)), int(s / n % n), int(s % n)};
    const Spinor& here = psi.psi[std::size_t(s)];
    double e = 0.0;
    for (int d = 0; d < 3; ++d) {
      int next[3] = {idx[0], idx[1], idx[2]};
      ++next[d];
      const Spinor there = next[d] < n ? mul(links.U[d][std::size_t(s)], psi.at(next[0], next[1], next[2])) : Spinor{};
      e += std::norm(there[0] - here[0]) + std::norm(there[1] - here[1]);
      // edge entering the box from outside
      if (idx[d] == 0) e += norm_squared(here);
    }
    return e;
  });
  return h * total;
}

LatticeGauge random_lattice_gauge(const LatticeSpec& spec, std::uint64_t seed, double amplitude) {
  LatticeGauge g(spec.sites());
  std::mt19937_64 rng(seed);
  for (auto& e : g) e = random_element(rng, amplitude);
  return g;
}

LinkField gauge_transform(const LinkField& links, const LatticeGauge& g) {
  const auto& spec = links.spec;
  if (g.size() != spec.sites()) throw InputError("gauge field size mismatch");
  LinkField out(spec);
  const int n = spec.n;
  const std::ptrdiff_t stride[3] = {std::ptrdiff_t(n) * n, n, 1};
  parallel_for(std::ptrdiff_t(spec.sites()), [&](std::ptrdiff_t s) {
    const int idx[3] = {int(s / (n * n)), int(s / n % n), int(s % n)};
    for (int d = 0; d < 3; ++d) {
      const GroupElement right = idx[d] + 1 < n ? adjoint(g[std::size_t(s + stride[d])]) : GroupElement::identity();
      out.U[d][std::size_t(s)] = g[std::size_t(s)] * links.U[d][std::size_t(s)] * right;
    }
  });
  return out;
}

GridField gauge_transform(const LatticeGauge& g, const GridField& psi) {
  if (g.size() != psi.spec.sites()) throw InputError("gauge field size mismatch");
  GridField out(psi.spec);
  for (std::size_t s = 0; s < g.size(); ++s) out.psi[s] = mul(g[s], psi.psi[s]);
  return out;
}

CurvatureTensor plaquette_curvature(const LinkField& links, int i, int j, int k) {
  const auto& spec = links.spec;
  const int n = spec.n;
  if (i < 0 || j < 0 || k < 0 || i + 1 >= n || j + 1 >= n || k + 1 >= n)
    throw InputError("plaquette_curvature needs the site and its forward neighbours inside the box");
  const int idx[3] = {i, j, k};
  const auto shifted = [&](int d) {
    int s[3] = {idx[0], idx[1], idx[2]};
    ++s[d];
    return spec.index(s[0], s[1], s[2]);
  };
  const std::size_t here = spec.index(i, j, k);
  const double inv_h2 = 1.0 / (spec.h() * spec.h());
  CurvatureTensor F;
  F.x = spec.position(i, j, k);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const GroupElement P = links.U[a][here] * links.U[b][shifted(a)] * adjoint(links.U[a][shifted(b)]) *
                             adjoint(links.U[b][here]);
      F.upper[CurvatureTensor::slot(a, b)] = inv_h2 * traceless_antihermitian_part(P);
    }
  return F;
}

void write_field_dump(const GridField& psi, const std::filesystem::path& path, const std::string& name) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw InputError("cannot open " + path.string());
  static_assert(sizeof(Spinor) == 4 * sizeof(double));
  const auto flat = as_vector(psi);
  for (Eigen::Index i = 0; i < flat.size(); ++i)
    for (double part : {flat(i).real(), flat(i).imag()}) {
      auto bytes = std::bit_cast<std::array<char, sizeof(double)>>(part);
      if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
      bin.write(bytes.data(), bytes.size());
    }
  if (!bin) throw InputError("write failed for " + path.string());

  const nlohmann::json meta{{"name", name},
                            {"dims", {psi.spec.n, psi.spec.n, psi.spec.n}},
                            {"components", 2},
                            {"dtype", "float64"},
                            {"endianness", "little"},
                            {"layout", "site-major (i, j, k), then component, then (re, im)"},
                            {"spacing", psi.spec.h()},
                            {"half_width", psi.spec.L},
                            {"origin", {-psi.spec.L, -psi.spec.L, -psi.spec.L}}};
  std::ofstream side(path.string() + ".json");
  side << meta.dump(2) << '\n';
}

}  // namespace gaugelab
