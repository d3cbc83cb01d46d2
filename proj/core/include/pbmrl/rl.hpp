#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "pbmrl/bellman.hpp"
#include "pbmrl/filter.hpp"
#include "pbmrl/rff.hpp"

namespace pbmrl {

/// The four log-scaled features driving the exponent choice.
struct StateVector {
    double s1 = 0.0;  // log10 prior error^2
    double s2 = 0.0;  // windowed log10 normalized posterior error^2
    double s3 = 0.0;  // log10 ||x||
    double s4 = 0.0;  // smoothed log10 estimate displacement / rho

    Eigen::Vector4d vec() const { return {s1, s2, s3, s4}; }
};

/// Finite exponent grid within [1, 2]; sorted, distinct, nonempty.
struct ActionGrid {
    std::vector<double> values;

    void validate() const;
    double smallest() const { return values.front(); }
};

/// Stored experience: state-action tuple z_t = (state, action) at time index
/// t, its successor state, and the one-step loss evaluated at t + 1.
struct Transition {
    StateVector state;
    double action = 1.0;
    StateVector next_state;
    double one_step_loss = 0.0;
    long time_index = 0;

    Eigen::VectorXd z() const;  // [s1..s4, action]
};

/// Fixed-capacity ring; eviction is oldest-first.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return size_ == 0; }
    /// i = 0 is the oldest retained transition.
    const Transition& at(std::size_t i) const;

  private:
    std::vector<Transition> ring_;
    std::size_t capacity_;
    std::size_t head_ = 0;  // next write slot
    std::size_t size_ = 0;
};

struct ApiConfig {
    double alpha = 0.9;
    double lambda = 0.25;
    double w1 = 0.5, w2 = 0.5;
    double eps1 = 0.0, eps2 = 0.05;
    double sigma1 = 1e-3, sigma2 = 0.0;
    int n_w = 10;         // local-sampling window
    double c = 0.95;      // kernel similarity threshold
    int m_av = 300;       // loss/state averaging window
    double varpi = 0.3;   // s4 smoothing
    ActionGrid grid{{1.0, 1.25, 1.5, 1.75, 2.0}};
    std::size_t buffer_capacity = 100000;
    long remote_horizon = 100;  // "remote past" means index <= n - horizon
    // standardize the state-action tuple before kernel/feature evaluation
    bool standardize = true;
    // half-width of the standardized action coordinate: the grid range maps
    // to [-action_span, action_span]
    double action_span = 1.5;
    // steps before the first policy evaluation; the loss window is not yet
    // informative there, so Q stays at Q_0 while the initial policy cycles
    // through the grid, seeding the replay buffer with every action
    long warmup = 300;
    // OBR degenerate configuration: single slab from the current transition
    // only, eps = 0, no 1/||h||^2 scaling, no remote-past slab.
    bool obr_mode = false;

    void validate() const;
};

struct DataPair {
    Eigen::VectorXd x;
    double y = 0.0;
};

/// Affine standardization of the state-action tuple before any kernel or
/// feature evaluation. State coordinates are centered and scaled by running
/// statistics of the observed states; the action is mapped to [-1, 1] over
/// the grid range. Disabled instances pass z through unchanged.
class StateScaler {
  public:
    StateScaler() = default;  // identity
    StateScaler(const ActionGrid& grid, double action_span);

    void observe(const StateVector& s);
    /// z = [s1..s4, p] -> standardized copy.
    Eigen::VectorXd transform(const Eigen::VectorXd& z) const;
    bool enabled() const { return enabled_; }

  private:
    bool enabled_ = false;
    long count_ = 0;
    Eigen::Vector4d mean_ = Eigen::Vector4d::Zero();
    Eigen::Vector4d m2_ = Eigen::Vector4d::Zero();
    double action_center_ = 1.5;
    double action_scale_ = 0.5;
};

/// Shared identity scaler for callers that work in raw coordinates.
const StateScaler& identity_scaler();

/// State features per the inductive rules; history holds the current pair
/// last, older pairs before it. Log arguments are floored at 1e-30, never
/// throwing on zero residuals.
StateVector compute_state(const std::deque<DataPair>& history,
                          const Eigen::VectorXd& theta_now,
                          const Eigen::VectorXd& theta_prev, double prev_s4,
                          double rho, int m_av, double varpi);

/// s4 seed value log10(p0) + (p0 - 1) s1 + s3, the exact displacement of the
/// first LMP step.
double initial_s4(double p0, double s1, double s3);

/// argmin over the grid of Q([s; p]); ties resolve to the smallest p.
double greedy_action(const QWeights& q, const StateVector& s,
                     const ActionGrid& grid, const RffParams& rff,
                     const StateScaler& scaler = identity_scaler());

/// Transitions with time index in {n-1-n_w, ..., n-2} whose exact-kernel
/// similarity to the reference tuple exceeds c, prepended by the reference.
std::vector<Transition> local_sampling(const ReplayBuffer& buffer,
                                       const Transition& reference, long n,
                                       int n_w, double c, double bandwidth,
                                       const StateScaler& scaler = identity_scaler());

/// Window average of log10(residual^2 / ||x||^2) over the m_av pairs
/// preceding the current one (history.back() is current and excluded).
double one_step_loss(const std::deque<DataPair>& history,
                     const Eigen::VectorXd& theta, int m_av);

/// d = (Phi' Phi + sigma I)^{-1} Phi' phi_ref with phi_ref the first column.
/// A singular sigma = 0 system falls back to ridge 1e-10.
Eigen::VectorXd ridge_coefficients(const Eigen::MatrixXd& features,
                                   double sigma);

/// Direction phi~(z_ref) - alpha sum_j d_j phi~([s'_j; mu(s'_j)]) with ridge
/// averaging weights; anchor is the reference one-step loss. which selects
/// the (sigma, eps, w) triple of slab 1 or 2.
Hyperslab build_hyperslab(const Transition& reference,
                          const std::vector<Transition>& others,
                          const QWeights& q, const ApiConfig& cfg,
                          const RffParams& rff, int which,
                          const StateScaler& scaler = identity_scaler());

/// One transition with time index <= n - horizon drawn uniformly; the oldest
/// entry when none qualify; nullopt on an empty buffer (slab 2 is skipped).
std::optional<Transition> remote_past_sample(const ReplayBuffer& buffer, long n,
                                             long horizon, std::mt19937_64& rng);

/// Per-trial controller running Algorithm "policy improvement + LMP update +
/// hyperslab policy evaluation" once per streamed pair.
class ApiRuntime {
  public:
    ApiRuntime(ApiConfig cfg, RffParams rff, int filter_dim, double rho,
               std::uint64_t seed);

    /// Consume (x_n, y_n); returns the exponent p_n used for this step.
    double step(const Eigen::VectorXd& x, double y);

    const Eigen::VectorXd& theta() const { return theta_; }
    /// Q([s; p]) in the runtime's current (standardized) coordinates.
    double q_value(const StateVector& s, double p) const;
    const QWeights& q() const { return q_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    long time() const { return n_; }
    /// Operator configuration of the most recent policy evaluation; empty
    /// slabs before the first evaluation.
    const BellmanConfig& last_bellman() const { return last_bellman_; }

  private:
    ApiConfig cfg_;
    RffParams rff_;
    QWeights q_;
    Eigen::VectorXd theta_, theta_prev_;
    double rho_;
    ReplayBuffer buffer_;
    std::deque<DataPair> history_;
    StateVector prev_state_;
    double prev_action_ = 1.0;
    long n_ = 1;
    StateScaler scaler_;
    std::mt19937_64 rng_;
    BellmanConfig last_bellman_;
};

}  // namespace pbmrl
