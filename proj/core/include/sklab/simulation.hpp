#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sklab/geometry.hpp"
#include "sklab/mappings.hpp"
#include "sklab/types.hpp"

namespace sklab::sim {

/// ML decoder settings: grid resolution is expressed in points per predicted
/// weak-noise RMS of the parameter error (>= 2), refinement is damped
/// Gauss-Newton with step halving.
struct DecoderConfig {
    int grid_points_per_rms = 4;
    int max_refine_iterations = 30;
    double anomaly_threshold = 5.0;  // multiples of predicted weak-noise RMS
    bool mmse_scale = false;         // linear mappings only; off for ML-fidelity runs
};

struct ExperimentConfig {
    map::MappingSpec mapping;
    SourceSpec source;
    ChannelSpec channel;
    long trials = 1;
    DecoderConfig decoder;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<double> csnr_sweep_db;  // optional; empty = single run at `channel`

    void validate() const;
};

/// One simulated transmission, kept for optional dumps and classification.
struct TrialRecord {
    long trial = 0;
    Vec x;     // source vector
    Vec z;     // transmitted channel vector (power-normalized)
    Vec n;     // channel noise
    Vec xhat;  // decoded source vector
    double squared_error = 0.0;  // ||x - xhat||^2 / M
    bool anomalous = false;
    long true_fold = 0, decoded_fold = 0;
    bool fold_applicable = false;
};

struct DistortionReport {
    long trials = 0;
    std::uint64_t seed = 0;
    double csnr_db = 0.0;
    double total_mse = 0.0;
    double weak_mse = 0.0;       // contribution of weak-classified trials
    double anomalous_mse = 0.0;  // contribution of anomalous trials
    double approx_mse = 0.0;     // reduction only: ||x - p(x)||^2 / M averaged
    double channel_mse = 0.0;    // reduction only: ||p(x) - S(zhat)||^2 / M averaged
    double cross_term = 0.0;     // reduction only: 2 (x - p(x)) . (p(x) - S(zhat)) / M
    double sdr_db = 0.0;
    double sdr_ci_db = 0.0;  // 95% confidence half-width
    double anomaly_rate = 0.0;
    double predicted_weak_rms = 0.0;  // norm units, the classifier reference
    double anomaly_threshold = 0.0;
    double power_scale = 0.0;  // c with E||c m(x)||^2 / N = P_N
    long refine_fallbacks = 0;
    std::string notes;
};

struct PowerReport {
    double scale = 0.0;
    double achieved_power_per_dim = 0.0;
    bool analytic = false;
};

/// Scale factor c such that the transmitted vector c*m(x) meets the channel
/// power constraint: exact for linear mappings, 1e5-sample Monte-Carlo (with a
/// seed decoupled from the trial streams) otherwise.
PowerReport power_normalize(const geom::SignalMapping& mapping, const SourceSpec& source,
                            double target_power, std::uint64_t seed = 0x5eedu);

/// Maximum-likelihood decoder for expansion mappings: least squares in closed
/// form for linear maps, otherwise grid search over the parameter range plus
/// damped Gauss-Newton refinement on ||S(x) - y||^2.
class MlDecoder {
public:
    MlDecoder(const geom::SignalMapping& mapping, const SourceSpec& source, double sigma_n_eff,
              const DecoderConfig& cfg);

    /// `received` is in unscaled mapping coordinates (receiver divides by c).
    Vec decode(const Vec& received, bool* used_fallback = nullptr) const;

    long grid_size() const { return grid_params_.size(); }

private:
    const geom::SignalMapping* mapping_;
    DecoderConfig cfg_;
    double sigma_n_eff_;
    bool linear_ = false;
    Mat pinv_;  // linear: x = pinv * y
    Vec mmse_;  // linear MMSE post-scaling per component (optional)
    std::vector<double> grid_params_;
    Mat grid_points_;  // grid_size x N
    // Grid indices ordered by point norm: the search walks outward from the
    // norm closest to ||y|| and prunes with | ||p|| - ||y|| | <= ||p - y||.
    std::vector<double> sorted_norm_;
    std::vector<long> sorted_idx_;
};

/// Reduction transmit side: z = ell(nearest structure point to x).
Vec encode_reduction(const geom::SignalMapping& mapping, const Vec& x);

/// Dual-rule classifier: error norm beyond threshold * predicted weak RMS, or
/// decoded fold index differing from the true one where folds apply.
bool classify_anomalous(const TrialRecord& trial, double predicted_weak_rms, double threshold);

/// Full Monte-Carlo pipeline at the config's channel spec. Per-trial RNG
/// streams are keyed by (seed, trial) and accumulation uses pairwise summation
/// in trial order, so the report is bit-identical for any job count.
DistortionReport run_experiment(const ExperimentConfig& config,
                                std::vector<TrialRecord>* dump = nullptr);

/// One line per record: trial, x..., z..., n..., xhat..., se, class (17
/// significant digits, comma separated).
std::string format_trial_record(const TrialRecord& rec);

}  // namespace sklab::sim
