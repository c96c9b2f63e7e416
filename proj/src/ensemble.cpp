#include "tarp/ensemble.hpp"

#include "tarp/distributions.hpp"
#include "tarp/error.hpp"
#include "tarp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace tarp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void add_times(PhaseTimes& acc, const PhaseTimes& t) {
    acc.screen += t.screen;
    acc.project += t.project;
    acc.fit += t.fit;
    acc.predict += t.predict;
}

[[noreturn]] void rethrow_replicate(std::exception_ptr err, const std::vector<char>& failed, std::uint64_t seed) {
    Index first = 0;
    while (first < static_cast<Index>(failed.size()) && !failed[first]) ++first;
    std::string what = "unknown error";
    ErrorKind kind = ErrorKind::internal;
    try {
        std::rethrow_exception(err);
    } catch (const Error& e) {
        what = e.what();
        kind = e.kind();
    } catch (const std::exception& e) {
        what = e.what();
    }
    fail(kind, "replicate " + std::to_string(first) + " (seed " + std::to_string(replicate_seed(seed, first)) +
                   ") failed: " + what);
}

struct Draw {
    Index m = 0;
    std::optional<double> psi;
    GammaMask mask;
    ProjectionMatrix proj;
};

Draw draw_replicate(const TarpContext& ctx, const TarpConfig& cfg, std::uint64_t seed, PhaseTimes& t) {
    Draw d;
    Rng tune(seed, Stream::tuning);
    d.m = cfg.fixedM ? *cfg.fixedM : static_cast<Index>(tune.uniform_int(ctx.mRange.lo, ctx.mRange.hi));
    if (cfg.backend == Backend::risRp) d.psi = cfg.fixedPsi ? *cfg.fixedPsi : tune.uniform(cfg.psiRange.lo, cfg.psiRange.hi);

    auto t0 = Clock::now();
    Rng screenRng(seed, Stream::screening);
    d.mask = sample_gamma(ctx.probs, screenRng);
    t.screen += seconds_since(t0);

    t0 = Clock::now();
    Rng projRng(seed, Stream::projection);
    const Dataset& train = *ctx.train;
    switch (cfg.backend) {
        case Backend::risRp:
            d.proj = gen_rp_matrix(d.mask.pGamma, d.m, *d.psi, projRng);
            break;
        case Backend::sparseRisRp:
            d.proj = gen_sparse_rp_matrix(d.mask.pGamma, d.m, cfg.kappa, train.rows(), projRng);
            break;
        case Backend::risPcr:
            d.proj = gen_pcr_matrix(export_screened(train, d.mask), d.m);
            break;
    }
    bind_columns(d.proj, d.mask.selected);
    t.project += seconds_since(t0);
    return d;
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
    switch (b) {
        case Backend::risRp: return "ris-rp";
        case Backend::risPcr: return "ris-pcr";
        case Backend::sparseRisRp: return "sparse-ris-rp";
    }
    return "?";
}

std::string_view to_string(Aggregation a) noexcept {
    switch (a) {
        case Aggregation::simpleAverage: return "average";
        case Aggregation::modelAverage: return "model-average";
        case Aggregation::kFoldCv: return "cv";
    }
    return "?";
}

std::string_view to_string(IntervalAggregation a) noexcept {
    return a == IntervalAggregation::endpointAverage ? "endpoint" : "mixture";
}

Backend parse_backend(std::string_view s) {
    if (s == "ris-rp" || s == "risRp") return Backend::risRp;
    if (s == "ris-pcr" || s == "risPcr") return Backend::risPcr;
    if (s == "sparse-ris-rp" || s == "sparseRisRp") return Backend::sparseRisRp;
    fail(ErrorKind::parameter, "unknown backend '" + std::string(s) + "'");
}

Aggregation parse_aggregation(std::string_view s) {
    if (s == "average" || s == "simpleAverage") return Aggregation::simpleAverage;
    if (s == "model-average" || s == "modelAverage") return Aggregation::modelAverage;
    if (s == "cv" || s == "kFoldCv") return Aggregation::kFoldCv;
    fail(ErrorKind::parameter, "unknown aggregation '" + std::string(s) + "'");
}

IntervalAggregation parse_interval_aggregation(std::string_view s) {
    if (s == "endpoint") return IntervalAggregation::endpointAverage;
    if (s == "mixture") return IntervalAggregation::mixtureQuantile;
    fail(ErrorKind::parameter, "unknown interval aggregation '" + std::string(s) + "'");
}

void TarpConfig::validate() const {
    require(nReplicates >= 1, ErrorKind::parameter, "nReplicates must be >= 1");
    require(!delta || (*delta >= 0.0 && std::isfinite(*delta)), ErrorKind::parameter, "delta must be finite and >= 0");
    require(psiRange.lo > 0.0 && psiRange.lo <= psiRange.hi && psiRange.hi <= 0.5, ErrorKind::parameter,
            "psi range must lie in (0, 0.5]");
    require(!fixedPsi || (*fixedPsi > 0.0 && *fixedPsi <= 0.5), ErrorKind::parameter, "psi must lie in (0, 0.5]");
    require(!fixedM || *fixedM >= 1, ErrorKind::parameter, "m must be >= 1");
    require(!mRange || (mRange->lo >= 1 && mRange->lo <= mRange->hi), ErrorKind::parameter, "m range is empty");
    require(kappa > 0.0 && kappa < 1.0, ErrorKind::parameter, "kappa must lie in (0, 1)");
    require(level > 0.0 && level < 1.0, ErrorKind::parameter, "level must lie in (0, 1)");
    require(kFolds >= 2, ErrorKind::parameter, "kFolds must be >= 2");
    prior.validate();
}

IndexRange default_m_range(Index n, Index p) {
    require(n >= 1 && p >= 1, ErrorKind::dimension, "m range needs n >= 1 and p >= 1");
    IndexRange r;
    r.lo = std::clamp<Index>(static_cast<Index>(std::ceil(2.0 * std::log(static_cast<double>(p)))), 1, p);
    r.hi = std::clamp<Index>((3 * n) / 4, 1, p);
    require(r.lo <= r.hi, ErrorKind::parameter,
            "m range [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "] is empty");
    return r;
}

std::uint64_t replicate_seed(std::uint64_t seed, Index l) noexcept {
    return substream_seed(seed, static_cast<std::uint64_t>(l));
}

TarpContext prepare(const Dataset& train, const TarpConfig& cfg) {
    cfg.validate();
    validate(train);
    require(train.y.size() == train.rows(), ErrorKind::ingestion, "training data has no response");
    require(train.standardized, ErrorKind::parameter, "training data must be standardized first");
    TarpContext ctx;
    ctx.train = &train;
    const Index n = train.rows();
    const Index p = train.cols();
    ctx.mRange = cfg.mRange ? *cfg.mRange : default_m_range(n, p);
    require(ctx.mRange.lo >= 1 && ctx.mRange.lo <= ctx.mRange.hi, ErrorKind::parameter, "m range is empty");
    ctx.delta = cfg.delta ? *cfg.delta : default_delta(n, p);

    // Screening is computed once and shared by all replicates.
    ctx.utility = marginal_utility(train);
    ctx.probs = inclusion_probabilities(ctx.utility, ctx.delta);
    if (ctx.probs.degenerate) ctx.probs.q = VectorXd::Ones(p);

    ctx.yFit = train.y;
    if (cfg.centerY && train.responseKind == ResponseKind::continuous) {
        ctx.yOffset = train.y.mean();
        ctx.yFit.array() -= ctx.yOffset;
    }
    return ctx;
}

ReplicateRecord run_replicate(const TarpContext& ctx, const MatrixXd& Xnew, const TarpConfig& cfg, Index l,
                              PhaseTimes* times) {
    require(Xnew.cols() == ctx.train->cols(), ErrorKind::dimension, "Xnew column count does not match training data");
    PhaseTimes t;
    ReplicateRecord rec;
    rec.index = l;
    rec.seed = replicate_seed(cfg.seed, l);
    const Draw d = draw_replicate(ctx, cfg, rec.seed, t);
    rec.m = d.proj.m;
    rec.psi = d.psi;
    rec.pGamma = d.mask.pGamma;
    rec.maskHash = d.mask.hash();
    rec.maskForced = d.mask.forced;

    auto t0 = Clock::now();
    const MatrixXd Z = compress(ctx.train->X, d.proj);
    const MatrixXd Znew = compress(Xnew, d.proj);
    t.project += seconds_since(t0);

    t0 = Clock::now();
    const CompressedPosterior post = fit_compressed(Z, ctx.yFit, cfg.prior);
    if (cfg.aggregation == Aggregation::modelAverage) rec.logEvidence = log_marginal_likelihood(post);
    if (cfg.aggregation == Aggregation::kFoldCv) {
        // Shared folds across candidates so their scores are comparable.
        Rng foldRng(cfg.seed, Stream::folds);
        rec.cvMse = kfold_mse(Z, ctx.train->y, cfg.kFolds, cfg.prior, cfg.centerY, foldRng);
    }
    t.fit += seconds_since(t0);

    t0 = Clock::now();
    const PredictiveSummary pred = predict(post, Znew, cfg.level);
    rec.yhat = pred.mean.array() + ctx.yOffset;
    rec.lower = pred.lower.array() + ctx.yOffset;
    rec.upper = pred.upper.array() + ctx.yOffset;
    rec.scale = pred.marginalScale;
    rec.df = pred.df;
    t.predict += seconds_since(t0);

    if (times) add_times(*times, t);
    return rec;
}

std::vector<double> model_average_weights(const std::vector<double>& logEvidence) {
    require(!logEvidence.empty(), ErrorKind::parameter, "no log evidence values");
    const double top = *std::max_element(logEvidence.begin(), logEvidence.end());
    require(std::isfinite(top), ErrorKind::degenerate, "log evidence is not finite");
    std::vector<double> w(logEvidence.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = std::exp(logEvidence[i] - top));
    for (double& v : w) v /= total;
    return w;
}

void mixture_intervals(const std::vector<ReplicateRecord>& reps, const std::vector<double>& weights, double level,
                       VectorXd& lower, VectorXd& upper) {
    require(!reps.empty() && reps.size() == weights.size(), ErrorKind::parameter, "mixture needs one weight per replicate");
    const Index nTest = reps.front().yhat.size();
    lower.resize(nTest);
    upper.resize(nTest);
    const double tailProb[2] = {0.5 * (1.0 - level), 0.5 * (1.0 + level)};
    std::vector<double> tq[2];
    for (int s = 0; s < 2; ++s)
        for (const auto& r : reps) tq[s].push_back(dist::student_t_quantile(tailProb[s], r.df));

    for (Index i = 0; i < nTest; ++i) {
        auto cdf = [&](double x) {
            double acc = 0.0;
            for (std::size_t l = 0; l < reps.size(); ++l)
                acc += weights[l] * dist::student_t_cdf((x - reps[l].yhat[i]) / reps[l].scale[i], reps[l].df);
            return acc;
        };
        for (int s = 0; s < 2; ++s) {
            // The mixture quantile lies between the smallest and largest component quantiles.
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t l = 0; l < reps.size(); ++l) {
                const double q = reps[l].yhat[i] + reps[l].scale[i] * tq[s][l];
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
            for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                (cdf(mid) < tailProb[s] ? lo : hi) = mid;
            }
            (s == 0 ? lower : upper)[i] = 0.5 * (lo + hi);
        }
    }
}

double kfold_mse(const MatrixXd& Z, const VectorXd& y, Index k, const PriorHyper& prior, bool centerY, Rng& rng) {
    const Index n = Z.rows();
    require(y.size() == n, ErrorKind::dimension, "response length does not match Z rows");
    require(k >= 2, ErrorKind::parameter, "k must be >= 2");
    require(k <= n, ErrorKind::parameter, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));

    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);

    double total = 0.0;
    for (Index f = 0; f < k; ++f) {
        const Index begin = f * n / k;
        const Index end = (f + 1) * n / k;
        const Index nVal = end - begin;
        const Index nFit = n - nVal;
        MatrixXd Zfit(nFit, Z.cols()), Zval(nVal, Z.cols());
        VectorXd yfit(nFit), yval(nVal);
        for (Index i = 0, a = 0, b = 0; i < n; ++i) {
            const Index row = perm[i];
            if (i >= begin && i < end) {
                Zval.row(b) = Z.row(row);
                yval[b++] = y[row];
            } else {
                Zfit.row(a) = Z.row(row);
                yfit[a++] = y[row];
            }
        }
        const double offset = centerY ? yfit.mean() : 0.0;
        yfit.array() -= offset;
        const CompressedPosterior post = fit_compressed(Zfit, yfit, prior);
        const VectorXd resid = (Zval * post.muT).array() + offset - yval.array();
        total += resid.squaredNorm() / static_cast<double>(nVal);
    }
    return total / static_cast<double>(k);
}

TarpResult run_tarp(const Dataset& train, const MatrixXd& Xnew, const TarpConfig& cfg) {
    const auto start = Clock::now();
    require(train.responseKind == ResponseKind::continuous, ErrorKind::parameter,
            "run_tarp needs a continuous response; use the binary path for {0,1} data");
    TarpResult out;
    out.config = cfg;
    auto t0 = Clock::now();
    const TarpContext ctx = prepare(train, cfg);
    out.phases.screen += seconds_since(t0);
    out.delta = ctx.delta;
    out.mRange = ctx.mRange;

    const auto N = static_cast<std::size_t>(cfg.nReplicates);
    std::vector<ReplicateRecord> reps(N);
    std::vector<PhaseTimes> times(N);
    std::vector<char> failed(N, 0);
    auto err = parallel_for(N, cfg.workers, [&](std::size_t l) {
        try {
            reps[l] = run_replicate(ctx, Xnew, cfg, static_cast<Index>(l), &times[l]);
        } catch (...) {
            failed[l] = 1;
            throw;
        }
    });
    if (err) rethrow_replicate(err, failed, cfg.seed);
    for (const auto& t : times) add_times(out.phases, t);

    // Ordered reduction in replicate-index order.
    switch (cfg.aggregation) {
        case Aggregation::simpleAverage:
            out.weights.assign(N, 1.0 / static_cast<double>(N));
            break;
        case Aggregation::modelAverage: {
            std::vector<double> le;
            for (const auto& r : reps) le.push_back(*r.logEvidence);
            out.weights = model_average_weights(le);
            break;
        }
        case Aggregation::kFoldCv: {
            std::size_t best = 0;
            for (std::size_t l = 1; l < N; ++l)
                if (*reps[l].cvMse < *reps[best].cvMse) best = l;
            out.weights.assign(N, 0.0);
            out.weights[best] = 1.0;
            out.selected = static_cast<Index>(best);
            break;
        }
    }

    const Index nTest = Xnew.rows();
    if (cfg.aggregation == Aggregation::kFoldCv) {
        const auto& r = reps[static_cast<std::size_t>(*out.selected)];
        out.yhat = r.yhat;
        out.lower = r.lower;
        out.upper = r.upper;
    } else if (N == 1) {
        out.yhat = reps[0].yhat;
        out.lower = reps[0].lower;
        out.upper = reps[0].upper;
    } else {
        out.yhat = VectorXd::Zero(nTest);
        out.lower = VectorXd::Zero(nTest);
        out.upper = VectorXd::Zero(nTest);
        for (std::size_t l = 0; l < N; ++l) {
            out.yhat += out.weights[l] * reps[l].yhat;
            out.lower += out.weights[l] * reps[l].lower;
            out.upper += out.weights[l] * reps[l].upper;
        }
    }
    if (cfg.intervals == IntervalAggregation::mixtureQuantile && cfg.aggregation != Aggregation::kFoldCv && N > 1)
        mixture_intervals(reps, out.weights, cfg.level, out.lower, out.upper);

    if (cfg.keepReplicates) out.perReplicate = std::move(reps);
    out.wallTime = seconds_since(start);
    return out;
}

BinaryReplicate run_binary_replicate(const TarpContext& ctx, const MatrixXd& Xnew, const TarpConfig& cfg, Index l,
                                     PhaseTimes* times) {
    require(Xnew.cols() == ctx.train->cols(), ErrorKind::dimension, "Xnew column count does not match training data");
    PhaseTimes t;
    BinaryReplicate rec;
    rec.index = l;
    rec.seed = replicate_seed(cfg.seed, l);
    const Draw d = draw_replicate(ctx, cfg, rec.seed, t);
    rec.m = d.proj.m;
    rec.psi = d.psi;
    rec.pGamma = d.mask.pGamma;
    rec.maskHash = d.mask.hash();

    auto t0 = Clock::now();
    MatrixXd Z = compress(ctx.train->X, d.proj);
    MatrixXd Znew = compress(Xnew, d.proj);
    if (cfg.probitIntercept) {
        // Standardized predictors cannot shift the latent mean, so unbalanced
        // labels need their own location term.
        MatrixXd Za(Z.rows(), Z.cols() + 1), Zna(Znew.rows(), Znew.cols() + 1);
        Za << VectorXd::Ones(Z.rows()), Z;
        Zna << VectorXd::Ones(Znew.rows()), Znew;
        Z = std::move(Za);
        Znew = std::move(Zna);
    }
    t.project += seconds_since(t0);

    t0 = Clock::now();
    ProbitOptions opts = cfg.probit;
    opts.keepDraws = opts.keepDraws || cfg.probitPosteriorAveraging;
    Rng sampler(rec.seed, Stream::sampler);
    const ProbitFit fit = probit_gibbs(Z, ctx.train->y, opts, sampler, cfg.prior);
    rec.maxMcse = fit.thetaMcse.size() ? fit.thetaMcse.maxCoeff() : 0.0;
    t.fit += seconds_since(t0);

    t0 = Clock::now();
    rec.prob = cfg.probitPosteriorAveraging ? predict_probit_averaged(fit, Znew) : predict_probit(fit, Znew);
    t.predict += seconds_since(t0);
    if (times) add_times(*times, t);
    return rec;
}

BinaryResult run_tarp_binary(const Dataset& train, const MatrixXd& Xnew, const TarpConfig& cfg) {
    const auto start = Clock::now();
    require(train.responseKind == ResponseKind::binary, ErrorKind::ingestion, "binary path needs a {0,1} response");
    BinaryResult out;
    out.config = cfg;
    auto t0 = Clock::now();
    const TarpContext ctx = prepare(train, cfg);
    out.phases.screen += seconds_since(t0);
    out.delta = ctx.delta;
    out.mRange = ctx.mRange;

    const auto N = static_cast<std::size_t>(cfg.nReplicates);
    std::vector<BinaryReplicate> reps(N);
    std::vector<PhaseTimes> times(N);
    std::vector<char> failed(N, 0);
    auto err = parallel_for(N, cfg.workers, [&](std::size_t l) {
        try {
            reps[l] = run_binary_replicate(ctx, Xnew, cfg, static_cast<Index>(l), &times[l]);
        } catch (...) {
            failed[l] = 1;
            throw;
        }
    });
    if (err) rethrow_replicate(err, failed, cfg.seed);
    for (const auto& t : times) add_times(out.phases, t);

    out.prob = VectorXd::Zero(Xnew.rows());
    for (const auto& r : reps) out.prob += r.prob;
    out.prob /= static_cast<double>(N);
    if (cfg.keepReplicates) out.perReplicate = std::move(reps);
    out.wallTime = seconds_since(start);
    return out;
}

}  // namespace tarp
