#include "pbmrl/rl.hpp"

#include <algorithm>
#include <cmath>

namespace pbmrl {

namespace {
constexpr double kLogFloor = 1e-30;  // floor for squared log10 arguments

double log10_floored_sq(double sq) { return std::log10(std::max(sq, kLogFloor)); }
}  // namespace

void ActionGrid::validate() const {
    if (values.empty()) throw std::invalid_argument("ActionGrid: empty grid");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 1.0 || values[i] > 2.0)
            throw std::invalid_argument("ActionGrid: values must lie in [1,2]");
        if (i > 0 && values[i] <= values[i - 1])
            throw std::invalid_argument("ActionGrid: values must be sorted distinct");
    }
}

StateScaler::StateScaler(const ActionGrid& grid, double action_span)
    : enabled_(true) {
    grid.validate();
    if (!(action_span > 0.0))
        throw std::invalid_argument("StateScaler: action_span must be > 0");
    const double lo = grid.values.front();
    const double hi = grid.values.back();
    action_center_ = 0.5 * (lo + hi);
    action_scale_ = hi > lo ? 0.5 * (hi - lo) / action_span : 1.0;
}

void StateScaler::observe(const StateVector& s) {
    if (!enabled_) return;
    ++count_;
    const Eigen::Vector4d v = s.vec();
    const Eigen::Vector4d delta = v - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(v - mean_);
}

Eigen::VectorXd StateScaler::transform(const Eigen::VectorXd& z) const {
    if (!enabled_) return z;
    if (z.size() != 5)
        throw std::invalid_argument("StateScaler: expected [s1..s4, p]");
    Eigen::VectorXd out(5);
    if (count_ < 2) {
        out.head<4>() = z.head<4>() - mean_;
    } else {
        const Eigen::Vector4d stddev =
            (m2_ / static_cast<double>(count_ - 1)).cwiseSqrt().cwiseMax(1e-6);
        out.head<4>() = (z.head<4>() - mean_).cwiseQuotient(stddev);
    }
    out(4) = (z(4) - action_center_) / action_scale_;
    return out;
}

const StateScaler& identity_scaler() {
    static const StateScaler identity;
    return identity;
}

Eigen::VectorXd Transition::z() const {
    Eigen::VectorXd out(5);
    out << state.s1, state.s2, state.s3, state.s4, action;
    return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0)
        throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
    ring_.resize(capacity_);
}

void ReplayBuffer::push(Transition t) {
    ring_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("ReplayBuffer: index out of range");
    const std::size_t oldest = (head_ + capacity_ - size_) % capacity_;
    return ring_[(oldest + i) % capacity_];
}

void ApiConfig::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("ApiConfig: alpha must be > 0");
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("ApiConfig: lambda must be in [0,1]");
    if (w1 < 0.0 || w1 > 1.0 || w2 < 0.0 || w2 > 1.0 ||
        std::abs(w1 + w2 - 1.0) > 1e-12)
        throw std::invalid_argument("ApiConfig: weights must be in [0,1] and sum to 1");
    if (eps1 < 0.0 || eps2 < 0.0)
        throw std::invalid_argument("ApiConfig: tolerances must be >= 0");
    if (sigma1 < 0.0 || sigma2 < 0.0)
        throw std::invalid_argument("ApiConfig: ridge parameters must be >= 0");
    if (n_w < 0) throw std::invalid_argument("ApiConfig: n_w must be >= 0");
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("ApiConfig: c must be in (0,1)");
    if (m_av < 1) throw std::invalid_argument("ApiConfig: m_av must be >= 1");
    if (!(varpi > 0.0 && varpi < 1.0))
        throw std::invalid_argument("ApiConfig: varpi must be in (0,1)");
    if (remote_horizon < 1)
        throw std::invalid_argument("ApiConfig: remote_horizon must be >= 1");
    if (warmup < 0) throw std::invalid_argument("ApiConfig: warmup must be >= 0");
    grid.validate();
}

StateVector compute_state(const std::deque<DataPair>& history,
                          const Eigen::VectorXd& theta_now,
                          const Eigen::VectorXd& theta_prev, double prev_s4,
                          double rho, int m_av, double varpi) {
    if (history.empty())
        throw std::invalid_argument("compute_state: history must hold the current pair");
    if (!(rho > 0.0)) throw std::invalid_argument("compute_state: rho must be > 0");
    if (!(varpi > 0.0 && varpi < 1.0))
        throw std::invalid_argument("compute_state: varpi must be in (0,1)");

    const DataPair& current = history.back();
    StateVector s;
    const double e = current.y - theta_now.dot(current.x);
    s.s1 = log10_floored_sq(e * e);
    s.s2 = one_step_loss(history, theta_now, m_av);
    s.s3 = 0.5 * log10_floored_sq(current.x.squaredNorm());
    s.s4 = varpi * prev_s4 +
           (1.0 - varpi) * (0.5 * log10_floored_sq(
                                (theta_now - theta_prev).squaredNorm()) -
                            std::log10(rho));
    return s;
}

double initial_s4(double p0, double s1, double s3) {
    return std::log10(p0) + (p0 - 1.0) * s1 + s3;
}

double greedy_action(const QWeights& q, const StateVector& s,
                     const ActionGrid& grid, const RffParams& rff,
                     const StateScaler& scaler) {
    grid.validate();
    Eigen::VectorXd z(5);
    z.head<4>() = s.vec();
    double best_p = grid.values.front();
    double best_q = std::numeric_limits<double>::infinity();
    for (double p : grid.values) {  // ascending, so strict < ties to smallest p
        z(4) = p;
        const double value = q.dot(feature_map(rff, scaler.transform(z)));
        if (value < best_q) {
            best_q = value;
            best_p = p;
        }
    }
    return best_p;
}

std::vector<Transition> local_sampling(const ReplayBuffer& buffer,
                                       const Transition& reference, long n,
                                       int n_w, double c, double bandwidth,
                                       const StateScaler& scaler) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("local_sampling: c must be in (0,1)");
    std::vector<Transition> out;
    out.push_back(reference);
    const Eigen::VectorXd z_ref = scaler.transform(reference.z());
    const long lo = n - 1 - n_w;
    const long hi = n - 2;
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        const Transition& t = buffer.at(i);
        if (t.time_index < lo || t.time_index > hi) continue;
        if (gaussian_kernel(z_ref, scaler.transform(t.z()), bandwidth) > c)
            out.push_back(t);
    }
    return out;
}

double one_step_loss(const std::deque<DataPair>& history,
                     const Eigen::VectorXd& theta, int m_av) {
    if (m_av < 1) throw std::invalid_argument("one_step_loss: m_av must be >= 1");
    const std::size_t past = history.size() > 0 ? history.size() - 1 : 0;
    const std::size_t window = std::min<std::size_t>(past, m_av);
    if (window == 0) return 0.0;  // warm-up: no past pairs yet
    double acc = 0.0;
    for (std::size_t m = 1; m <= window; ++m) {
        const DataPair& pair = history[history.size() - 1 - m];
        const double r = pair.y - theta.dot(pair.x);
        acc += log10_floored_sq(r * r) - log10_floored_sq(pair.x.squaredNorm());
    }
    return acc / static_cast<double>(window);
}

Eigen::VectorXd ridge_coefficients(const Eigen::MatrixXd& features,
                                   double sigma) {
    const Eigen::Index n = features.cols();
    if (n < 1)
        throw std::invalid_argument("ridge_coefficients: need >= 1 feature column");
    if (sigma < 0.0)
        throw std::invalid_argument("ridge_coefficients: sigma must be >= 0");
    const Eigen::MatrixXd gram = features.transpose() * features;
    const Eigen::VectorXd g0 = gram.col(0);  // inner products with reference

    auto solve = [&](double reg) {
        Eigen::MatrixXd lhs = gram;
        lhs.diagonal().array() += reg;
        return Eigen::VectorXd(lhs.ldlt().solve(g0));
    };
    Eigen::VectorXd d = solve(sigma);
    if (sigma == 0.0) {
        const double residual = (gram * d - g0).norm();
        if (!d.allFinite() || residual > 1e-8 * std::max(1.0, g0.norm()))
            d = solve(1e-10);  // singular Gram: pseudo-inverse via tiny ridge
    }
    return d;
}

Hyperslab build_hyperslab(const Transition& reference,
                          const std::vector<Transition>& others,
                          const QWeights& q, const ApiConfig& cfg,
                          const RffParams& rff, int which,
                          const StateScaler& scaler) {
    if (which != 1 && which != 2)
        throw std::invalid_argument("build_hyperslab: which must be 1 or 2");
    const std::size_t count = 1 + others.size();
    Eigen::MatrixXd features(rff.feature_dim(), count);
    features.col(0) = feature_map(rff, scaler.transform(reference.z()));
    for (std::size_t j = 0; j < others.size(); ++j)
        features.col(j + 1) = feature_map(rff, scaler.transform(others[j].z()));
    const Eigen::VectorXd d =
        ridge_coefficients(features, which == 1 ? cfg.sigma1 : cfg.sigma2);

    auto next_feature = [&](const Transition& t) {
        Eigen::VectorXd z(5);
        z.head<4>() = t.next_state.vec();
        z(4) = greedy_action(q, t.next_state, cfg.grid, rff, scaler);
        return feature_map(rff, scaler.transform(z));
    };

    Hyperslab slab;
    slab.direction = features.col(0);
    slab.direction.noalias() -= cfg.alpha * d(0) * next_feature(reference);
    for (std::size_t j = 0; j < others.size(); ++j)
        slab.direction.noalias() -= cfg.alpha * d(j + 1) * next_feature(others[j]);
    if (slab.direction.squaredNorm() < 1e-12)
        throw std::invalid_argument("build_hyperslab: zero-norm direction");
    slab.anchor = reference.one_step_loss;
    slab.tolerance = which == 1 ? cfg.eps1 : cfg.eps2;
    slab.weight = which == 1 ? cfg.w1 : cfg.w2;
    return slab;
}

std::optional<Transition> remote_past_sample(const ReplayBuffer& buffer, long n,
                                             long horizon,
                                             std::mt19937_64& rng) {
    if (buffer.empty()) return std::nullopt;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < buffer.size(); ++i)
        if (buffer.at(i).time_index <= n - horizon) eligible.push_back(i);
    if (eligible.empty()) return buffer.at(0);  // oldest entry
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    return buffer.at(eligible[pick(rng)]);
}

ApiRuntime::ApiRuntime(ApiConfig cfg, RffParams rff, int filter_dim, double rho,
                       std::uint64_t seed)
    : cfg_(std::move(cfg)),
      rff_(std::move(rff)),
      q_(QWeights::Zero(rff_.feature_dim())),
      theta_(Eigen::VectorXd::Zero(filter_dim)),
      theta_prev_(Eigen::VectorXd::Zero(filter_dim)),
      rho_(rho),
      buffer_(cfg_.buffer_capacity),
      scaler_(cfg_.standardize ? StateScaler(cfg_.grid, cfg_.action_span)
                               : StateScaler()),
      rng_(seed) {
    cfg_.validate();
    if (filter_dim < 1)
        throw std::invalid_argument("ApiRuntime: filter_dim must be >= 1");
    if (!(rho > 0.0)) throw std::invalid_argument("ApiRuntime: rho must be > 0");
    if (rff_.dim_z != 5)
        throw std::invalid_argument("ApiRuntime: rff must cover [s1..s4, p]");
    last_bellman_.alpha = cfg_.alpha;
}

double ApiRuntime::q_value(const StateVector& s, double p) const {
    Eigen::VectorXd z(5);
    z.head<4>() = s.vec();
    z(4) = p;
    return q_.dot(feature_map(rff_, scaler_.transform(z)));
}

double ApiRuntime::step(const Eigen::VectorXd& x, double y) {
    history_.push_back({x, y});
    while (history_.size() > static_cast<std::size_t>(cfg_.m_av) + 1)
        history_.pop_front();

    StateVector s;
    if (n_ == 1) {
        // Q_0 = 0 ties every action, so the first action is the smallest
        // grid value; the s4 seed uses exactly that exponent.
        const double p0 = cfg_.grid.smallest();
        s = compute_state(history_, theta_, theta_, 0.0, rho_, cfg_.m_av,
                          cfg_.varpi);
        s.s4 = initial_s4(p0, s.s1, s.s3);
    } else {
        s = compute_state(history_, theta_, theta_prev_, prev_state_.s4, rho_,
                          cfg_.m_av, cfg_.varpi);
    }

    scaler_.observe(s);
    // Before the first policy evaluation the zero critic carries no
    // preference; the initial policy cycles through the grid so the replay
    // buffer seeds every action with real feedback.
    const double action =
        n_ <= cfg_.warmup
            ? cfg_.grid.values[static_cast<std::size_t>(n_ - 1) %
                               cfg_.grid.values.size()]
            : greedy_action(q_, s, cfg_.grid, rff_, scaler_);

    // One-step loss is evaluated with the pre-update estimate.
    const double loss = n_ >= 2 ? one_step_loss(history_, theta_, cfg_.m_av) : 0.0;

    LmpState lmp{theta_, rho_};
    lmp = lmp_update(lmp, x, y, action);
    theta_prev_ = theta_;
    theta_ = lmp.theta;

    if (n_ >= 2) {
        const Transition ref{prev_state_, prev_action_, s, loss, n_ - 1};
        if (n_ <= cfg_.warmup) {
            buffer_.push(ref);
            prev_state_ = s;
            prev_action_ = action;
            ++n_;
            return action;
        }
        BellmanConfig bellman;
        bellman.alpha = cfg_.alpha;
        bellman.apply_scaling = !cfg_.obr_mode;
        if (cfg_.obr_mode) {
            Hyperslab slab = build_hyperslab(ref, {}, q_, cfg_, rff_, 1, scaler_);
            slab.tolerance = 0.0;
            slab.weight = 1.0;
            bellman.slabs.push_back(std::move(slab));
        } else {
            std::vector<Transition> samples = local_sampling(
                buffer_, ref, n_, cfg_.n_w, cfg_.c, rff_.bandwidth, scaler_);
            const std::vector<Transition> others(samples.begin() + 1,
                                                 samples.end());
            Hyperslab slab1 =
                build_hyperslab(ref, others, q_, cfg_, rff_, 1, scaler_);
            const std::optional<Transition> remote =
                remote_past_sample(buffer_, n_, cfg_.remote_horizon, rng_);
            if (remote) {
                bellman.slabs.push_back(std::move(slab1));
                bellman.slabs.push_back(
                    build_hyperslab(*remote, {}, q_, cfg_, rff_, 2, scaler_));
            } else {
                slab1.weight = 1.0;  // slab 2 unavailable: renormalize
                bellman.slabs.push_back(std::move(slab1));
            }
        }
        q_ = km_update(bellman, q_, cfg_.lambda);
        last_bellman_ = std::move(bellman);
        buffer_.push(ref);
    }

    prev_state_ = s;
    prev_action_ = action;
    ++n_;
    return action;
}

}  // namespace pbmrl
