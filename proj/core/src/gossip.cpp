#include "sap/gossip.hpp"

#include <cmath>

namespace sap {

GossipProtocol GossipProtocol::pairwise(double omega) {
  GossipProtocol p;
  p.kind = Kind::Pairwise;
  p.omega = omega;
  return p;
}

GossipProtocol GossipProtocol::laplacian_node(double omega, NodeSampling sampling) {
  GossipProtocol p;
  p.kind = Kind::LaplacianNode;
  p.omega = omega;
  p.node_sampling = sampling;
  return p;
}

GossipProtocol GossipProtocol::block(int tau, double omega, double beta) {
  GossipProtocol p;
  p.kind = Kind::Block;
  p.tau = tau;
  p.omega = omega;
  p.beta = beta;
  return p;
}

GossipProtocol GossipProtocol::pairwise_momentum(double omega, double beta) {
  GossipProtocol p;
  p.kind = Kind::PairwiseMomentum;
  p.omega = omega;
  p.beta = beta;
  return p;
}

GossipProtocol GossipProtocol::acc_gossip(AccOption option, double nu_or_lambda) {
  GossipProtocol p;
  p.kind = Kind::AccGossip;
  p.acc_option = option;
  if (option == AccOption::Two)
    p.acc_nu = nu_or_lambda;
  else
    p.acc_lambda = nu_or_lambda;
  return p;
}

GossipProtocol GossipProtocol::dual_rnm(int tau) {
  GossipProtocol p;
  p.kind = Kind::DualRNM;
  p.tau = tau;
  p.omega = 1.0;
  return p;
}

namespace {

SpdMatrix geometry_for(const Network& net) {
  if (net.has_weights()) return SpdMatrix::diagonal(net.weights());
  return SpdMatrix::identity(net.node_count());
}

}  // namespace

GossipSim::GossipSim(const Network& net, const GossipProtocol& protocol, Vector c, Rng rng)
    : net_(&net), protocol_(protocol), c_(std::move(c)) {
  if (c_.size() != net.node_count())
    throw ValidationError("gossip: initial values must have one entry per node");

  using Kind = GossipProtocol::Kind;
  const bool needs_plain_geometry =
      protocol_.kind == Kind::AccGossip || protocol_.kind == Kind::DualRNM;
  if (needs_plain_geometry && net.has_weights())
    throw ValidationError("gossip: this protocol supports the unweighted problem only");

  SpdMatrix b = geometry_for(net);
  switch (protocol_.kind) {
    case Kind::Pairwise:
    case Kind::PairwiseMomentum:
    case Kind::Block:
      system_ = std::make_unique<LinearSystem>(incidence(net),
                                               Vector::Zero(net.edge_count()), std::move(b));
      break;
    case Kind::LaplacianNode:
      system_ = std::make_unique<LinearSystem>(laplacian(net), Vector::Zero(net.node_count()),
                                               std::move(b));
      break;
    case Kind::AccGossip:
      system_ = std::make_unique<LinearSystem>(normalized_incidence(net),
                                               Vector::Zero(net.edge_count()));
      break;
    case Kind::DualRNM:
      system_ =
          std::make_unique<LinearSystem>(incidence(net), Vector::Zero(net.edge_count()));
      break;
  }

  switch (protocol_.kind) {
    case Kind::Pairwise:
    case Kind::PairwiseMomentum:
      dist_ = std::make_unique<SketchDistribution>(
          SketchDistribution::uniform_coordinate(net.edge_count()));
      break;
    case Kind::Block:
    case Kind::DualRNM:
      dist_ = std::make_unique<SketchDistribution>(
          SketchDistribution::uniform_block(net.edge_count(), protocol_.tau));
      break;
    case Kind::LaplacianNode:
      dist_ = std::make_unique<SketchDistribution>(
          protocol_.node_sampling == GossipProtocol::NodeSampling::RowNorms
              ? SketchDistribution::coordinate_row_norms(*system_)
              : SketchDistribution::uniform_coordinate(net.node_count()));
      break;
    case Kind::AccGossip:
      dist_ = std::make_unique<SketchDistribution>(
          SketchDistribution::uniform_coordinate(net.edge_count()));
      break;
  }

  switch (protocol_.kind) {
    case Kind::AccGossip: {
      const Matrix w_matrix = (system_->A().transpose() * system_->A()) /
                              static_cast<double>(system_->rows());
      const Spectrum spec_w = spectrum_of_matrix(w_matrix);
      const int m = static_cast<int>(system_->rows());
      if (protocol_.acc_option == AccOption::Two) {
        const double nu = protocol_.acc_nu >= 0.0 ? protocol_.acc_nu : static_cast<double>(m);
        acc_params_ = acc_params_option_two(m, nu, spec_w);
      } else {
        const Spectrum spec_ata =
            spectrum_of_matrix(system_->A().transpose() * system_->A());
        const double lambda =
            protocol_.acc_lambda >= 0.0 ? protocol_.acc_lambda : spec_ata.lambda_min_plus;
        acc_params_ = acc_params_option_one(m, lambda, spec_ata);
      }
      acc_.emplace(c_, std::move(rng));
      break;
    }
    case Kind::DualRNM:
      dual_.emplace(net.edge_count(), c_);
      dual_rng_.emplace(std::move(rng));
      break;
    default:
      primal_.emplace(c_, std::move(rng));
      break;
  }

  const SpdMatrix& geom = system_->B();
  double weight_sum = 0.0, weighted = 0.0;
  if (geom.is_diagonal() && geom.size() == net.node_count()) {
    const Vector& w = geom.diagonal_weights();
    weight_sum = w.sum();
    weighted = w.dot(c_);
  } else {
    weight_sum = static_cast<double>(net.node_count());
    weighted = c_.sum();
  }
  consensus_ = weighted / weight_sum;

  const Vector diff0 = c_ - Vector::Constant(net.node_count(), consensus_);
  const double e0 = (geom.size() == net.node_count()) ? geom.inner(diff0, diff0)
                                                      : diff0.squaredNorm();
  err0_ = e0 > 0.0 ? e0 : 1.0;

  row_invquad_.resize(system_->rows());
  for (Eigen::Index i = 0; i < system_->rows(); ++i)
    row_invquad_(i) = system_->B().inv_quad(system_->A().row(i).transpose());
}

GossipSim::GossipSim(const Network& net, const GossipProtocol& protocol, Vector c,
                     std::uint64_t seed)
    : GossipSim(net, protocol, std::move(c), Rng(seed)) {}

void GossipSim::tick() {
  using Kind = GossipProtocol::Kind;
  switch (protocol_.kind) {
    case Kind::Pairwise:
    case Kind::LaplacianNode:
      basic_step(*primal_, *system_, *dist_, protocol_.omega);
      break;
    case Kind::PairwiseMomentum:
      momentum_step(*primal_, *system_, *dist_, protocol_.omega, protocol_.beta);
      break;
    case Kind::Block:
      if (protocol_.beta == 0.0)
        basic_step(*primal_, *system_, *dist_, protocol_.omega);
      else
        momentum_step(*primal_, *system_, *dist_, protocol_.omega, protocol_.beta);
      break;
    case Kind::AccGossip:
      acc_step(*acc_, *system_, *acc_params_);
      break;
    case Kind::DualRNM:
      sdsa_step(*dual_, *system_, *dist_, 1.0, *dual_rng_);
      break;
  }
  ++clock_;
}

const Vector& GossipSim::values() const {
  if (primal_) return primal_->x_curr;
  if (acc_) return acc_->x;
  return dual_->phi_curr;
}

const Vector& GossipSim::prev_values() const {
  if (primal_) return primal_->x_prev;
  if (dual_) return dual_->phi_prev;
  throw ValidationError("gossip: this protocol keeps no previous-value register");
}

const Vector& GossipSim::acc_v() const {
  if (!acc_) throw ValidationError("gossip: not an accelerated protocol");
  return acc_->v;
}

const Vector& GossipSim::edge_duals() const {
  if (!dual_) throw ValidationError("gossip: not a dual protocol");
  return dual_->y_curr;
}

double GossipSim::mass() const {
  const SpdMatrix& geom = system_->B();
  if (geom.is_diagonal() && geom.size() == net_->node_count())
    return geom.diagonal_weights().dot(values());
  return values().sum();
}

double GossipSim::rel_error() const {
  const Vector diff = values() - Vector::Constant(net_->node_count(), consensus_);
  const SpdMatrix& geom = system_->B();
  const double e = (geom.size() == net_->node_count()) ? geom.inner(diff, diff)
                                                       : diff.squaredNorm();
  return e / err0_;
}

double GossipSim::objective() const {
  if (dist_->kind() != SketchDistribution::Kind::Coordinate)
    throw UnsupportedClosedFormError("gossip: objective has a cheap closed form only for "
                                     "coordinate sampling");
  const Vector r = system_->A() * values();
  double f = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (row_invquad_(i) <= 0.0) continue;
    f += dist_->probabilities()[static_cast<std::size_t>(i)] * 0.5 * r(i) * r(i) /
         row_invquad_(i);
  }
  return f;
}

namespace {

void expect_kind(const GossipSim& sim, GossipProtocol::Kind kind, const char* name) {
  if (sim.protocol().kind != kind)
    throw ValidationError(std::string(name) + ": simulation runs a different protocol");
}

}  // namespace

void pairwise_step(GossipSim& sim) {
  expect_kind(sim, GossipProtocol::Kind::Pairwise, "pairwise_step");
  sim.tick();
}
void laplacian_node_step(GossipSim& sim) {
  expect_kind(sim, GossipProtocol::Kind::LaplacianNode, "laplacian_node_step");
  sim.tick();
}
void block_gossip_step(GossipSim& sim) {
  expect_kind(sim, GossipProtocol::Kind::Block, "block_gossip_step");
  sim.tick();
}
void momentum_gossip_step(GossipSim& sim) {
  expect_kind(sim, GossipProtocol::Kind::PairwiseMomentum, "momentum_gossip_step");
  sim.tick();
}
void acc_gossip_step(GossipSim& sim) {
  expect_kind(sim, GossipProtocol::Kind::AccGossip, "acc_gossip_step");
  sim.tick();
}
void dual_rnm_step(GossipSim& sim) {
  expect_kind(sim, GossipProtocol::Kind::DualRNM, "dual_rnm_step");
  sim.tick();
}

Trace simulate(const Network& net, const GossipProtocol& protocol, const Vector& c,
               const GossipSchedule& schedule, std::uint64_t seed, const GossipOptions& options) {
  GossipSim sim(net, protocol, c, seed);
  const bool record_f =
      options.record_objective &&
      sim.distribution().kind() == SketchDistribution::Kind::Coordinate;
  Trace trace;
  const auto record = [&](long long k) {
    trace.add(options.trial, k, "rel_err", sim.rel_error());
    if (record_f) trace.add(options.trial, k, "f", sim.objective());
    if (options.record_mass) trace.add(options.trial, k, "mass", sim.mass());
  };
  record(0);
  while (sim.clock() < schedule.iterations) {
    sim.tick();
    const bool due =
        sim.clock() % options.record_every == 0 || sim.clock() == schedule.iterations;
    if (due) record(sim.clock());
    if (schedule.target_rel_error > 0.0 && sim.rel_error() <= schedule.target_rel_error) {
      if (!due) record(sim.clock());
      break;
    }
  }
  return trace;
}

long long estimate_averaging_time(const Network& net, const GossipProtocol& protocol,
                                  const Vector& c, double eps, int trials, std::uint64_t seed,
                                  long long max_iters) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("averaging time: eps must be in (0,1)");
  if (trials < 1) throw ValidationError("averaging time: need at least one trial");
  // violations[k] = number of trials with ||x^k - x*|| > eps ||x^0 - x*||.
  std::vector<int> violations(static_cast<std::size_t>(max_iters) + 1, 0);
  const double eps_sq = eps * eps;  // rel_error() is the squared ratio
  for (int t = 0; t < trials; ++t) {
    GossipSim sim(net, protocol, c, Rng::for_trial(seed, static_cast<std::uint64_t>(t)));
    if (sim.rel_error() > eps_sq) ++violations[0];
    for (long long k = 1; k <= max_iters; ++k) {
      sim.tick();
      if (sim.rel_error() > eps_sq) ++violations[static_cast<std::size_t>(k)];
    }
  }
  const double budget = eps * trials;
  for (long long k = 0; k <= max_iters; ++k)
    if (violations[static_cast<std::size_t>(k)] <= budget) return k;
  return max_iters + 1;
}

}  // namespace sap
