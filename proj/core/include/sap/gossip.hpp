#ifndef SAP_GOSSIP_HPP
#define SAP_GOSSIP_HPP

#include <memory>
#include <optional>

#include "sap/dual.hpp"
#include "sap/graph.hpp"
#include "sap/solver.hpp"

namespace sap {

// Protocol menu. Every protocol is the exact solver counterpart run on the
// matching AC system (incidence, Laplacian, or normalized incidence), so a
// gossip trajectory and a solver trajectory driven by the same RNG stream are
// bit-identical.
struct GossipProtocol {
  enum class Kind { Pairwise, LaplacianNode, Block, PairwiseMomentum, AccGossip, DualRNM };
  enum class NodeSampling { RowNorms, Uniform };

  Kind kind = Kind::Pairwise;
  double omega = 1.0;
  double beta = 0.0;
  int tau = 1;
  AccOption acc_option = AccOption::Two;
  double acc_nu = -1.0;      // < 0: safe upper bound m
  double acc_lambda = -1.0;  // < 0: lambda_min^+(A^T A)
  NodeSampling node_sampling = NodeSampling::RowNorms;

  static GossipProtocol pairwise(double omega = 1.0);
  static GossipProtocol laplacian_node(double omega = 1.0,
                                       NodeSampling sampling = NodeSampling::RowNorms);
  static GossipProtocol block(int tau, double omega = 1.0, double beta = 0.0);
  static GossipProtocol pairwise_momentum(double omega, double beta);
  static GossipProtocol acc_gossip(AccOption option, double nu_or_lambda = -1.0);
  static GossipProtocol dual_rnm(int tau);
};

// One simulated network running one protocol. Wakes up a random edge (or
// node, for the Laplacian protocol) per tick from the seeded stream.
class GossipSim {
 public:
  GossipSim(const Network& net, const GossipProtocol& protocol, Vector c, std::uint64_t seed);
  GossipSim(const Network& net, const GossipProtocol& protocol, Vector c, Rng rng);

  void tick();
  long long clock() const { return clock_; }

  // Node values (the primal image for the dual protocol).
  const Vector& values() const;
  const Vector& prev_values() const;
  const Vector& acc_v() const;
  const Vector& edge_duals() const;

  const Network& network() const { return *net_; }
  const LinearSystem& system() const { return *system_; }
  const SketchDistribution& distribution() const { return *dist_; }
  const GossipProtocol& protocol() const { return protocol_; }

  // Weighted consensus value sum(w_i c_i) / sum(w_i).
  double consensus_value() const { return consensus_; }
  // sum(w_i x_i), the conserved quantity of mass-preserving protocols.
  double mass() const;
  // ||x - cbar 1||_B^2 / ||c - cbar 1||_B^2.
  double rel_error() const;
  // f(x) under the protocol's sampling distribution (closed form).
  double objective() const;

 private:
  const Network* net_;
  GossipProtocol protocol_;
  std::unique_ptr<LinearSystem> system_;
  std::unique_ptr<SketchDistribution> dist_;
  std::optional<SolverState> primal_;
  std::optional<AccState> acc_;
  std::optional<AccParams> acc_params_;
  std::optional<DualState> dual_;
  std::optional<Rng> dual_rng_;
  Vector c_;
  double consensus_ = 0.0;
  double err0_ = 1.0;
  Vector row_invquad_;  // per-row a_i^T B^{-1} a_i, for the cheap objective
  long long clock_ = 0;
};

// Per-protocol steps; each checks the sim runs the matching protocol and
// advances one tick.
void pairwise_step(GossipSim& sim);
void laplacian_node_step(GossipSim& sim);
void block_gossip_step(GossipSim& sim);
void momentum_gossip_step(GossipSim& sim);
void acc_gossip_step(GossipSim& sim);
void dual_rnm_step(GossipSim& sim);

struct GossipSchedule {
  long long iterations = 1000;
  double target_rel_error = 0.0;  // stop when rel_error() <= target (if > 0)
};

struct GossipOptions {
  long long record_every = 1;
  int trial = 0;
  bool record_objective = true;
  bool record_mass = true;
};

Trace simulate(const Network& net, const GossipProtocol& protocol, const Vector& c,
               const GossipSchedule& schedule, std::uint64_t seed,
               const GossipOptions& options = {});

// Smallest k with P(rel distance > eps) <= eps, estimated over trials.
long long estimate_averaging_time(const Network& net, const GossipProtocol& protocol,
                                  const Vector& c, double eps, int trials, std::uint64_t seed,
                                  long long max_iters);

}  // namespace sap

#endif
