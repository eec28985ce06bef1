#include "pcbs/losses.hpp"

#include <cmath>
#include <string>

#include "pcbs/errors.hpp"

namespace pcbs {

namespace {
constexpr double kProbFloor = 1e-12; // log(0) guard
}

void ClassDistribution::validate() const {
    if (probs.empty()) throw InvalidInput("class distribution is empty");
    double sum = 0.0;
    for (const double p : probs) {
        if (!(p > 0.0) || p > 1.0)
            throw InvalidInput("class probability out of (0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidInput("class probabilities sum to " + std::to_string(sum));
}

ClassTarget ClassTarget::of(std::size_t class_index, std::size_t num_classes) {
    if (class_index >= num_classes)
        throw InvalidInput("target class index out of range");
    ClassTarget t;
    t.one_hot.assign(num_classes, 0.0);
    t.one_hot[class_index] = 1.0;
    return t;
}

void ClassTarget::validate() const {
    if (one_hot.empty()) throw InvalidInput("target vector is empty");
    std::size_t ones = 0;
    for (const double v : one_hot) {
        if (v == 1.0)
            ++ones;
        else if (v != 0.0)
            throw InvalidInput("target vector is not one-hot");
    }
    if (ones != 1) throw InvalidInput("target vector must contain exactly one 1");
}

ClassWeights ClassWeights::uniform(std::size_t num_classes) {
    ClassWeights w;
    w.w.assign(num_classes, 1.0);
    return w;
}

void ClassWeights::validate() const {
    if (w.empty()) throw InvalidInput("class weights are empty");
    for (const double v : w)
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidInput("class weights must be strictly positive and finite");
}

void UncertaintyParams::validate() const {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2))
        throw InvalidInput("sigma parameters must be strictly positive and finite");
}

ValueGrad weighted_ce(const ClassDistribution& pred, const ClassTarget& target,
                      const ClassWeights& weights) {
    const std::size_t c = pred.num_classes();
    if (target.num_classes() != c || weights.w.size() != c)
        throw InvalidInput("weighted_ce: dimension mismatch");

    ValueGrad out;
    out.grad.assign(c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        if (target.one_hot[i] == 0.0) continue;
        const double p = std::max(pred.probs[i], kProbFloor);
        out.value -= weights.w[i] * target.one_hot[i] * std::log(p);
        out.grad[i] = -weights.w[i] * target.one_hot[i] / p;
    }
    return out;
}

SclResult sampling_consistency(const ClassDistribution& p_pcb,
                               const ClassDistribution& p_rs) {
    const std::size_t c = p_pcb.num_classes();
    if (p_rs.num_classes() != c)
        throw InvalidInput("sampling_consistency: dimension mismatch");

    SclResult out;
    out.grad_pcb.assign(c, 0.0);
    out.grad_rs.assign(c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        const double d = p_pcb.probs[i] - p_rs.probs[i];
        out.value += std::abs(d);
        const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        out.grad_pcb[i] = s;
        out.grad_rs[i] = -s;
    }
    return out;
}

double total_fixed(double l_wce, double l_scl, double alpha) {
    if (alpha < 0.0 || !std::isfinite(alpha))
        throw InvalidInput("total_fixed: alpha must be non-negative");
    return l_wce + alpha * l_scl;
}

UncertaintyResult total_uncertainty(double l_wce, double l_scl,
                                    const UncertaintyParams& params) {
    params.validate();
    if (l_wce < 0.0 || l_scl < 0.0)
        throw InvalidInput("total_uncertainty: losses must be non-negative");

    const double s1 = params.sigma1, s2 = params.sigma2;
    UncertaintyResult out;
    out.value = l_wce / (s1 * s1) + l_scl / (s2 * s2) +
                std::log(1.0 + s1) + std::log(1.0 + s2);
    out.d_sigma1 = -2.0 * l_wce / (s1 * s1 * s1) + 1.0 / (1.0 + s1);
    out.d_sigma2 = -2.0 * l_scl / (s2 * s2 * s2) + 1.0 / (1.0 + s2);
    return out;
}

ClassWeights inverse_sqrt_freq_weights(std::span<const std::size_t> class_counts) {
    if (class_counts.empty()) throw InvalidInput("class counts are empty");
    std::size_t total = 0;
    for (const std::size_t c : class_counts) total += c;
    if (total == 0) throw InvalidInput("all class counts are zero");

    constexpr double kFreqEps = 1e-6;
    ClassWeights out;
    out.w.resize(class_counts.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < class_counts.size(); ++i) {
        const double f = static_cast<double>(class_counts[i]) / static_cast<double>(total);
        out.w[i] = 1.0 / std::sqrt(f + kFreqEps);
        sum += out.w[i];
    }
    const double mean = sum / static_cast<double>(out.w.size());
    for (double& v : out.w) v /= mean;
    return out;
}

LossReport total_report(const ClassDistribution& p_pcb, const ClassDistribution& p_rs,
                        const ClassTarget& target, const ClassWeights& weights,
                        const UncertaintyParams& params) {
    const ValueGrad wce = weighted_ce(p_pcb, target, weights);
    const SclResult scl = sampling_consistency(p_pcb, p_rs);
    const UncertaintyResult tot = total_uncertainty(wce.value, scl.value, params);

    const double inv_s1_sq = 1.0 / (params.sigma1 * params.sigma1);
    const double inv_s2_sq = 1.0 / (params.sigma2 * params.sigma2);

    LossReport report;
    report.l_wce = wce.value;
    report.l_scl = scl.value;
    report.l_total = tot.value;
    report.d_sigma1 = tot.d_sigma1;
    report.d_sigma2 = tot.d_sigma2;
    const std::size_t c = p_pcb.num_classes();
    report.d_probs_pcb.resize(c);
    report.d_probs_rs.resize(c);
    for (std::size_t i = 0; i < c; ++i) {
        report.d_probs_pcb[i] = inv_s1_sq * wce.grad[i] + inv_s2_sq * scl.grad_pcb[i];
        report.d_probs_rs[i] = inv_s2_sq * scl.grad_rs[i];
    }
    return report;
}

} // namespace pcbs
