#include "sklab/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <thread>

#include "sklab/distortion.hpp"
#include "sklab/random.hpp"

namespace sklab::sim {

namespace {

// Stream id reserved for the power estimator, clear of the per-trial streams.
constexpr std::uint64_t kPowerStream = 0x9E3779B97F4A7C15ull;

double pairwise_sum(const double* v, long n) {
    if (n <= 8) {
        double s = 0.0;
        for (long i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const long half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

Vec draw_source(rng::Philox& gen, const SourceSpec& source, const geom::SignalMapping& mapping) {
    Vec x(source.dimension);
    const double trunc = source.truncation_radius();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (int i = 0; i < source.dimension; ++i) x(i) = source.sigma_x * gen.next_gaussian();
        const bool ok = mapping.direction == Direction::expansion
                            ? x.lpNorm<Eigen::Infinity>() <= trunc
                            : x.norm() <= trunc;
        if (ok) return x;
    }
    throw std::runtime_error("run_experiment: source truncation rejected 1000 consecutive draws");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (decoder.anomaly_threshold <= 1.0)
        throw std::invalid_argument("ExperimentConfig: anomaly_threshold must exceed 1");
    if (decoder.grid_points_per_rms < 2)
        throw std::invalid_argument("ExperimentConfig: grid resolution below 2 points per weak RMS");
    if (decoder.max_refine_iterations < 0)
        throw std::invalid_argument("ExperimentConfig: negative refinement iterations");
    if (jobs < 1) throw std::invalid_argument("ExperimentConfig: jobs must be >= 1");
}

PowerReport power_normalize(const geom::SignalMapping& mapping, const SourceSpec& source,
                            double target_power, std::uint64_t seed) {
    if (target_power <= 0) throw std::invalid_argument("power_normalize: target power must be positive");
    PowerReport rep;
    if (mapping.name == "linear") {
        // E||A x||^2 = sigma_x^2 ||A||_F^2 exactly for a linear map.
        const Mat j = geom::jacobian(mapping, Vec::Zero(mapping.source_dim));
        const double mean_power = source.variance() * j.squaredNorm() / mapping.channel_dim;
        rep.scale = std::sqrt(target_power / mean_power);
        rep.achieved_power_per_dim = target_power;
        rep.analytic = true;
        return rep;
    }
    rng::Philox gen(seed, kPowerStream);
    const long samples = 100000;
    const int n = mapping.channel_dim;
    double acc = 0.0;
    for (long s = 0; s < samples; ++s) {
        const Vec x = draw_source(gen, source, mapping);
        const Vec m = mapping.direction == Direction::expansion ? mapping.map(x) : mapping.encode(x);
        acc += m.squaredNorm();
    }
    const double mean_power = acc / (samples * n);
    if (!std::isfinite(mean_power) || mean_power <= 0)
        throw std::runtime_error("power_normalize: divergent power estimate");
    rep.scale = std::sqrt(target_power / mean_power);
    rep.achieved_power_per_dim = target_power;
    rep.analytic = false;
    return rep;
}

MlDecoder::MlDecoder(const geom::SignalMapping& mapping, const SourceSpec& source,
                     double sigma_n_eff, const DecoderConfig& cfg)
    : mapping_(&mapping), cfg_(cfg), sigma_n_eff_(sigma_n_eff) {
    if (mapping.direction != Direction::expansion)
        throw std::invalid_argument("MlDecoder: expansion mapping required");
    if (mapping.name == "linear") {
        linear_ = true;
        const Mat j = geom::jacobian(mapping, Vec::Zero(mapping.source_dim));
        const Mat gram = j.transpose() * j;
        Eigen::LDLT<Mat> ldlt(gram);
        pinv_ = ldlt.solve(j.transpose());
        if (cfg_.mmse_scale) {
            const Mat cov = sigma_n_eff * sigma_n_eff * ldlt.solve(Mat::Identity(gram.rows(), gram.cols()));
            mmse_ = Vec(gram.rows());
            for (int i = 0; i < mmse_.size(); ++i)
                mmse_(i) = source.variance() / (source.variance() + cov(i, i));
        }
        return;
    }
    if (mapping.param_dim() != 1)
        throw std::invalid_argument("MlDecoder: grid search supports one-dimensional parameters only");

    // Grid step: the smallest local weak-noise RMS of the parameter error over
    // the truncated range, divided by the configured points-per-RMS.
    const double t = source.truncation_radius();
    double g_max = 0.0;
    for (int i = 0; i <= 256; ++i) {
        Vec p(1);
        p << -t + 2.0 * t * i / 256.0;
        if (mapping.on_seam(p)) p(0) = std::nextafter(p(0), t);
        g_max = std::max(g_max, geom::metric_tensor(mapping, p).diagonal.maxCoeff());
    }
    const double step = sigma_n_eff / (std::sqrt(g_max) * cfg_.grid_points_per_rms);
    const long npoints = std::lround(2.0 * t / step) + 1;
    if (npoints > (1L << 24))
        throw std::runtime_error("MlDecoder: decoder grid exceeds 2^24 points; coarsen the resolution");
    grid_params_.resize(npoints);
    grid_points_.resize(npoints, mapping.channel_dim);
    sorted_idx_.resize(npoints);
    Vec p(1);
    for (long i = 0; i < npoints; ++i) {
        grid_params_[i] = -t + 2.0 * t * i / (npoints - 1);
        p << grid_params_[i];
        grid_points_.row(i) = mapping.map(p).transpose();
        sorted_idx_[i] = i;
    }
    std::sort(sorted_idx_.begin(), sorted_idx_.end(), [&](long a, long b) {
        return grid_points_.row(a).norm() < grid_points_.row(b).norm();
    });
    sorted_norm_.resize(npoints);
    for (long i = 0; i < npoints; ++i) sorted_norm_[i] = grid_points_.row(sorted_idx_[i]).norm();
}

Vec MlDecoder::decode(const Vec& received, bool* used_fallback) const {
    if (used_fallback) *used_fallback = false;
    if (linear_) {
        Vec xhat = pinv_ * received;
        if (cfg_.mmse_scale) xhat = xhat.cwiseProduct(mmse_);
        return xhat;
    }
    // Exact grid argmin: walk outward from the norm shell of ||y||; any point
    // with | ||p_i|| - ||y|| | >= current best distance cannot improve.
    const long npoints = static_cast<long>(sorted_idx_.size());
    const double ynorm = received.norm();
    const long start = std::lower_bound(sorted_norm_.begin(), sorted_norm_.end(), ynorm) -
                       sorted_norm_.begin();
    long best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    long lo = start - 1, hi = start;
    while (lo >= 0 || hi < npoints) {
        const double d_lo = lo >= 0 ? ynorm - sorted_norm_[lo] : std::numeric_limits<double>::infinity();
        const double d_hi = hi < npoints ? sorted_norm_[hi] - ynorm : std::numeric_limits<double>::infinity();
        if (std::min(d_lo, d_hi) >= best_dist) break;
        const long i = d_lo <= d_hi ? sorted_idx_[lo--] : sorted_idx_[hi++];
        const double d = (grid_points_.row(i).transpose() - received).norm();
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }

    Vec x(1);
    x << grid_params_[best];
    auto objective = [&](const Vec& q) { return (mapping_->map(q) - received).squaredNorm(); };
    double f = objective(x);
    const double grad_tol = 1e-8 * std::max(received.norm(), 1e-12);
    bool converged = false;
    Vec x_best = x;
    double f_best = f;
    for (int it = 0; it < cfg_.max_refine_iterations; ++it) {
        Mat j;
        try {
            j = geom::jacobian(*mapping_, x);
        } catch (const std::domain_error&) {
            break;  // refinement walked onto a seam or out of domain
        }
        const Vec r = mapping_->map(x) - received;
        const Vec grad = 2.0 * j.transpose() * r;
        if (grad.norm() < grad_tol) {
            converged = true;
            break;
        }
        const Mat gram = j.transpose() * j;
        Eigen::LDLT<Mat> ldlt(gram);
        if (ldlt.info() != Eigen::Success) break;
        const Vec step = ldlt.solve(j.transpose() * r);
        double lambda = 1.0;
        Vec x_next = x;
        double f_next = f;
        while (lambda > 1e-4) {
            Vec cand = x - lambda * step;
            cand = cand.cwiseMax(mapping_->domain.lower).cwiseMin(mapping_->domain.upper);
            const double fc = objective(cand);
            if (fc < f) {
                x_next = cand;
                f_next = fc;
                break;
            }
            lambda *= 0.5;
        }
        if (f_next >= f) break;  // no descent direction left
        x = x_next;
        f = f_next;
        if (f < f_best) {
            f_best = f;
            x_best = x;
        }
    }
    if (!converged) {
        if (used_fallback) *used_fallback = true;
        return f_best <= f ? x_best : x;
    }
    return x;
}

Vec encode_reduction(const geom::SignalMapping& mapping, const Vec& x) {
    if (mapping.direction != Direction::reduction || !mapping.encode)
        throw std::invalid_argument("encode_reduction: mapping has no projection encoder");
    return mapping.encode(x);
}

bool classify_anomalous(const TrialRecord& trial, double predicted_weak_rms, double threshold) {
    if (predicted_weak_rms <= 0)
        throw std::invalid_argument("classify_anomalous: predicted weak RMS must be positive");
    if (trial.fold_applicable && trial.true_fold != trial.decoded_fold) return true;
    return (trial.x - trial.xhat).norm() > threshold * predicted_weak_rms;
}

DistortionReport run_experiment(const ExperimentConfig& config, std::vector<TrialRecord>* dump) {
    config.validate();
    const geom::SignalMapping mapping = config.mapping.build();
    if (config.source.dimension != mapping.source_dim)
        throw std::invalid_argument("run_experiment: source dimension does not match the mapping");

    DistortionReport rep;
    rep.trials = config.trials;
    rep.seed = config.seed;
    rep.csnr_db = config.channel.csnr_db();
    rep.anomaly_threshold = config.decoder.anomaly_threshold;

    const PowerReport power =
        power_normalize(mapping, config.source, config.channel.power_per_dim);
    rep.power_scale = power.scale;
    const double c = power.scale;
    const double sigma_eff = config.channel.sigma_n() / c;
    const int m_dim = mapping.source_dim, n_dim = mapping.channel_dim;
    const bool expansion = mapping.direction == Direction::expansion;

    // Classifier reference: predicted weak-noise error norm.
    if (expansion) {
        const auto weak = dist::weak_noise_distortion(mapping, config.source, sigma_eff);
        rep.predicted_weak_rms = std::sqrt(m_dim * weak.value);
    } else {
        double g_mean = 0.0;
        int samples = 0;
        const double lo = mapping.domain.lower(0), hi = mapping.domain.upper(0);
        for (int i = 1; i < 64; ++i) {
            Vec p(1);
            p << lo + (hi - lo) * i / 64.0;
            if (mapping.on_seam(p)) continue;
            g_mean += geom::metric_tensor(mapping, p).diagonal.sum();
            ++samples;
        }
        g_mean /= samples;
        const double channel_pred = sigma_eff * sigma_eff * g_mean / m_dim;
        const double approx_pred =
            dist::approximation_distortion_bound(m_dim, n_dim, config.mapping.delta);
        rep.predicted_weak_rms = std::sqrt(m_dim * (channel_pred + approx_pred));
    }

    std::optional<MlDecoder> decoder;
    if (expansion) decoder.emplace(mapping, config.source, sigma_eff, config.decoder);

    const long t_count = config.trials;
    std::vector<double> se(t_count), se_approx, se_channel, se_cross;
    std::vector<unsigned char> anomalous(t_count, 0), fallback(t_count, 0);
    if (!expansion) {
        se_approx.resize(t_count);
        se_channel.resize(t_count);
        se_cross.resize(t_count);
    }
    if (dump) dump->resize(t_count);

    const double sigma_n = config.channel.sigma_n();
    auto worker = [&](long begin, long end) {
        for (long t = begin; t < end; ++t) {
            rng::Philox gen(config.seed, static_cast<std::uint64_t>(t));
            const Vec x = draw_source(gen, config.source, mapping);
            Vec noise(n_dim);
            for (int i = 0; i < n_dim; ++i) noise(i) = sigma_n * gen.next_gaussian();

            TrialRecord rec;
            rec.trial = t;
            rec.x = x;
            rec.n = noise;
            if (expansion) {
                rec.z = c * mapping.map(x);
                const Vec y = (rec.z + noise) / c;
                bool fb = false;
                rec.xhat = decoder->decode(y, &fb);
                fallback[t] = fb;
                if (mapping.fold_index) {
                    rec.fold_applicable = true;
                    rec.true_fold = mapping.fold_index(x);
                    rec.decoded_fold = mapping.fold_index(rec.xhat);
                }
            } else {
                const Vec z = encode_reduction(mapping, x);
                rec.z = c * z;
                Vec zhat = (rec.z + noise) / c;
                zhat = zhat.cwiseMax(mapping.domain.lower).cwiseMin(mapping.domain.upper);
                const Vec px = mapping.map(z);
                rec.xhat = mapping.map(zhat);
                if (mapping.fold_index) {
                    rec.fold_applicable = true;
                    rec.true_fold = mapping.fold_index(z);
                    rec.decoded_fold = mapping.fold_index(zhat);
                }
                se_approx[t] = (x - px).squaredNorm() / m_dim;
                se_channel[t] = (px - rec.xhat).squaredNorm() / m_dim;
                se_cross[t] = 2.0 * (x - px).dot(px - rec.xhat) / m_dim;
            }
            rec.squared_error = (x - rec.xhat).squaredNorm() / m_dim;
            rec.anomalous = classify_anomalous(rec, rep.predicted_weak_rms,
                                               config.decoder.anomaly_threshold);
            se[t] = rec.squared_error;
            anomalous[t] = rec.anomalous;
            if (dump) (*dump)[t] = std::move(rec);
        }
    };

    const int jobs = std::min<long>(config.jobs, t_count);
    if (jobs <= 1) {
        worker(0, t_count);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (t_count + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker, j * chunk, std::min(t_count, (j + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    rep.total_mse = pairwise_sum(se.data(), t_count) / t_count;
    if (!expansion) {
        rep.approx_mse = pairwise_sum(se_approx.data(), t_count) / t_count;
        rep.channel_mse = pairwise_sum(se_channel.data(), t_count) / t_count;
        rep.cross_term = pairwise_sum(se_cross.data(), t_count) / t_count;
    }
    // Split the total into weak and anomalous contributions in trial order.
    std::vector<double> se_weak(t_count), se_anom(t_count), anom_flag(t_count), var_terms(t_count);
    long fallbacks = 0;
    for (long t = 0; t < t_count; ++t) {
        se_weak[t] = anomalous[t] ? 0.0 : se[t];
        se_anom[t] = anomalous[t] ? se[t] : 0.0;
        anom_flag[t] = anomalous[t];
        fallbacks += fallback[t];
    }
    rep.weak_mse = pairwise_sum(se_weak.data(), t_count) / t_count;
    rep.anomalous_mse = pairwise_sum(se_anom.data(), t_count) / t_count;
    rep.anomaly_rate = pairwise_sum(anom_flag.data(), t_count) / t_count;
    rep.refine_fallbacks = fallbacks;
    for (long t = 0; t < t_count; ++t) {
        const double d = se[t] - rep.total_mse;
        var_terms[t] = d * d;
    }
    const double var = t_count > 1 ? pairwise_sum(var_terms.data(), t_count) / (t_count - 1) : 0.0;
    const double se_mean = std::sqrt(var / t_count);
    rep.sdr_db = db(config.source.variance() / rep.total_mse);
    rep.sdr_ci_db = 10.0 / std::log(10.0) * 1.96 * se_mean / rep.total_mse;

    if (t_count < 100) rep.notes += "low trial count; confidence interval unreliable. ";
    if (fallbacks > 0)
        rep.notes += "refinement fell back to the grid point on " + std::to_string(fallbacks) +
                     " trial(s). ";
    return rep;
}

std::string format_trial_record(const TrialRecord& rec) {
    std::string line = std::to_string(rec.trial);
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        line += buf;
    };
    for (int i = 0; i < rec.x.size(); ++i) put(rec.x(i));
    for (int i = 0; i < rec.z.size(); ++i) put(rec.z(i));
    for (int i = 0; i < rec.n.size(); ++i) put(rec.n(i));
    for (int i = 0; i < rec.xhat.size(); ++i) put(rec.xhat(i));
    put(rec.squared_error);
    line += rec.anomalous ? ",anomalous" : ",weak";
    return line;
}

}  // namespace sklab::sim
