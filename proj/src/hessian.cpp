#include <cmath>
#include <stdexcept>

#include "cne/sensitivity.hpp"

namespace cne {

namespace {

Eigen::Map<const Eigen::VectorXd> row_vec(const Embedding& x, std::size_t i) {
  return {x.row(i).data(), static_cast<Eigen::Index>(x.dim())};
}

}  // namespace

HessianBlock hessian_block(NodeId k, const Embedding& x, const LinkProbabilityMatrix& p,
                           const Graph& g, const EmbeddingConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(x.dim());
  const double gamma = cfg.gamma();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  double diag = 0.0;
  const auto xk = row_vec(x, k);
  for (NodeId l = 0; l < x.num_nodes(); ++l) {
    if (l == k) continue;
    const double pkl = p(k, l);
    diag += pkl - g.adjacency(k, l);
    const Eigen::VectorXd dx = xk - row_vec(x, l);
    h.noalias() -= (gamma * pkl * (1.0 - pkl)) * dx * dx.transpose();
  }
  h.diagonal().array() += diag;
  h *= gamma;
  // Rank-one updates are symmetric up to rounding; make it exact.
  h = 0.5 * (h + h.transpose()).eval();
  return {k, std::move(h)};
}

HessianBlockStore::HessianBlockStore(const Graph& g, const EmbedResult& base) {
  const auto n = base.coords.num_nodes();
  const auto d = base.coords.dim();
  blocks_.reserve(n);
  factors_.reserve(n);
  regularized_.assign(n, 0);
  for (NodeId k = 0; k < n; ++k) {
    blocks_.push_back(hessian_block(k, base.coords, base.probs, g, base.config));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(blocks_.back().block);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12)) {
      const auto& h = blocks_.back().block;
      double ridge = 1e-8 * std::abs(h.trace()) / static_cast<double>(d);
      if (!(ridge > 0.0)) ridge = 1e-8;
      // At a maximum H_k is negative definite; shift further that way.
      ldlt.compute(h - ridge * Eigen::MatrixXd::Identity(h.rows(), h.cols()));
      regularized_[k] = 1;
    }
    factors_.push_back(std::move(ldlt));
  }
  coords_t_ = base.coords.transposed();
}

std::size_t HessianBlockStore::regularized_count() const {
  std::size_t c = 0;
  for (char r : regularized_) c += r != 0;
  return c;
}

Eigen::VectorXd HessianBlockStore::solve(NodeId k, const Eigen::VectorXd& rhs) const {
  return factors_[k].solve(rhs);
}

double grad_link_prob_block(NodeId k, NodeId l, NodeId i, const Embedding& x,
                            const LinkProbabilityMatrix& p, const HessianBlockStore& blocks,
                            const EmbeddingConfig& cfg) {
  if (k == l) throw std::invalid_argument("grad_link_prob_block needs k != l");
  const double gamma = cfg.gamma();
  const double pkl = p(k, l);
  const Eigen::VectorXd w = blocks.solve(k, row_vec(x, k) - row_vec(x, i));
  const Eigen::VectorXd dkl = row_vec(x, k) - row_vec(x, l);
  return -gamma * gamma * pkl * (1.0 - pkl) * dkl.dot(w);
}

FullHessian::FullHessian(const Graph& g, const EmbedResult& base) {
  const auto& x = base.coords;
  const auto& p = base.probs;
  const auto n = x.num_nodes();
  const auto d = x.dim();
  const auto nd = n * d;
  if (nd > kMaxFullHessianSize)
    throw std::invalid_argument("full Hessian limited to n*d <= 600 (got " + std::to_string(nd) +
                                ")");
  const double gamma = base.config.gamma();
  const auto sd = static_cast<Eigen::Index>(d);

  h_ = Eigen::MatrixXd::Zero(nd, nd);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double puv = p(u, v);
      const Eigen::VectorXd dx = row_vec(x, u) - row_vec(x, v);
      Eigen::MatrixXd m = -(gamma * puv * (1.0 - puv)) * dx * dx.transpose();
      m.diagonal().array() += puv - g.adjacency(u, v);
      m *= gamma;
      h_.block(u * sd, u * sd, sd, sd) += m;
      h_.block(v * sd, v * sd, sd, sd) += m;
      h_.block(u * sd, v * sd, sd, sd) -= m;
      h_.block(v * sd, u * sd, sd, sd) -= m;
    }
  }
  h_ = 0.5 * (h_ + h_.transpose()).eval();

  // Rigid motions leave the likelihood unchanged: d translations and
  // d(d-1)/2 infinitesimal rotations about the origin.
  const std::size_t gauge_dim = d + d * (d - 1) / 2;
  Eigen::MatrixXd gauge = Eigen::MatrixXd::Zero(nd, gauge_dim);
  std::size_t col = 0;
  for (std::size_t c = 0; c < d; ++c, ++col)
    for (std::size_t u = 0; u < n; ++u) gauge(u * d + c, col) = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b, ++col) {
      for (std::size_t u = 0; u < n; ++u) {
        gauge(u * d + a, col) = x(u, b);
        gauge(u * d + b, col) = -x(u, a);
      }
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauge);
  gauge_ = qr.householderQ() * Eigen::MatrixXd::Identity(nd, gauge_dim);

  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(nd, nd) - gauge_ * gauge_.transpose();
  const Eigen::MatrixXd reduced = proj * h_ * proj;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (reduced + reduced.transpose()));
  eigvecs_ = eig.eigenvectors();
  const auto& lambda = eig.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  inv_eigvals_ = Eigen::VectorXd::Zero(lambda.size());
  std::size_t dropped = 0;
  for (Eigen::Index e = 0; e < lambda.size(); ++e) {
    if (std::abs(lambda[e]) > 1e-10 * scale)
      inv_eigvals_[e] = 1.0 / lambda[e];
    else
      ++dropped;
  }
  regularized_ = dropped > gauge_dim;
}

Eigen::VectorXd FullHessian::solve(const Eigen::VectorXd& rhs) const {
  const Eigen::VectorXd projected = rhs - gauge_ * (gauge_.transpose() * rhs);
  return eigvecs_ * inv_eigvals_.cwiseProduct(eigvecs_.transpose() * projected);
}

namespace {

/// H^+ E_ij E_ij^T x: the embedding response to raising a_ij, up to gamma.
Eigen::VectorXd flip_response(NodeId i, NodeId j, const Embedding& x, const FullHessian& h) {
  const auto d = static_cast<Eigen::Index>(x.dim());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.values().size()));
  const Eigen::VectorXd dij = row_vec(x, i) - row_vec(x, j);
  rhs.segment(i * d, d) = dij;
  rhs.segment(j * d, d) = -dij;
  return h.solve(rhs);
}

}  // namespace

double grad_link_prob_exact(NodeId k, NodeId l, NodeId i, NodeId j, const Embedding& x,
                            const LinkProbabilityMatrix& p, const FullHessian& h,
                            const EmbeddingConfig& cfg) {
  if (k == l || i == j) throw std::invalid_argument("grad_link_prob_exact needs distinct pairs");
  const auto d = static_cast<Eigen::Index>(x.dim());
  const double gamma = cfg.gamma();
  const Eigen::VectorXd z = flip_response(i, j, x, h);
  const double pkl = p(k, l);
  const Eigen::VectorXd dkl = row_vec(x, k) - row_vec(x, l);
  return -gamma * gamma * pkl * (1.0 - pkl) * dkl.dot(z.segment(k * d, d) - z.segment(l * d, d));
}

double grad_link_prob_exact(NodeId k, NodeId l, NodeId i, NodeId j, const Embedding& x,
                            const LinkProbabilityMatrix& p, const Graph& g,
                            const EmbeddingConfig& cfg) {
  EmbedResult base;
  base.coords = x;
  base.probs = p;
  base.config = resolve_prior(cfg, g);
  const FullHessian h(g, base);
  return grad_link_prob_exact(k, l, i, j, x, p, h, cfg);
}

SensitivityScore sensitivity_approx_exact(const Graph& g, const EmbedResult& base,
                                          const EdgeFlip& f, const FullHessian& h,
                                          bool flag_bridges) {
  const auto& x = base.coords;
  const auto& p = base.probs;
  const auto n = x.num_nodes();
  const auto d = static_cast<Eigen::Index>(x.dim());
  const double gamma = base.config.gamma();
  const Eigen::VectorXd z = flip_response(f.i, f.j, x, h);
  double sum = 0.0;
  for (NodeId k = 0; k < n; ++k) {
    for (NodeId l = k + 1; l < n; ++l) {
      const double pkl = p(k, l);
      const double proj =
          (row_vec(x, k) - row_vec(x, l)).dot(z.segment(k * d, d) - z.segment(l * d, d));
      sum += pkl * (1.0 - pkl) * proj * proj;
    }
  }
  SensitivityScore s;
  s.flip = f;
  s.method = Method::ApproxExact;
  s.score = 0.5 * std::pow(gamma, 4) * sum;
  s.regularized = h.regularized();
  s.disconnects = flag_bridges && f.direction == FlipDirection::Deletion && is_bridge(g, f);
  return s;
}

}  // namespace cne
