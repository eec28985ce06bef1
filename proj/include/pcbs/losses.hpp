#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcbs {

/// Class probability vector: entries in (0, 1], summing to 1.
struct ClassDistribution {
    std::vector<double> probs;

    std::size_t num_classes() const noexcept { return probs.size(); }
    /// Throws InvalidInput unless entries are positive, <= 1, and sum to 1
    /// within 1e-9.
    void validate() const;
};

/// One-hot ground-truth vector.
struct ClassTarget {
    std::vector<double> one_hot;

    static ClassTarget of(std::size_t class_index, std::size_t num_classes);
    std::size_t num_classes() const noexcept { return one_hot.size(); }
    /// Throws InvalidInput unless exactly one entry is 1 and the rest are 0.
    void validate() const;
};

/// Strictly positive per-class weights.
struct ClassWeights {
    std::vector<double> w;

    static ClassWeights uniform(std::size_t num_classes);
    void validate() const;
};

struct UncertaintyParams {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    void validate() const; // both strictly positive
};

struct ValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

/// Weighted cross-entropy: -sum_c w_c * y_c * log(p_c), with p clamped below
/// at 1e-12 before the log. grad[c] = -w_c * y_c / max(p_c, 1e-12).
/// Dimension mismatch throws InvalidInput. The prediction vector is taken as
/// given (no normalization check) so callers can probe perturbed inputs.
ValueGrad weighted_ce(const ClassDistribution& pred, const ClassTarget& target,
                      const ClassWeights& weights);

struct SclResult {
    double value = 0.0;
    std::vector<double> grad_pcb; // d/d p_pcb_c = sign(p_pcb_c - p_rs_c)
    std::vector<double> grad_rs;  // the negation; 0 at ties (subgradient)
};

/// Sampling consistency loss: L1 distance sum_c |p_pcb_c - p_rs_c|.
SclResult sampling_consistency(const ClassDistribution& p_pcb,
                               const ClassDistribution& p_rs);

/// l_wce + alpha * l_scl. Negative alpha throws InvalidInput.
double total_fixed(double l_wce, double l_scl, double alpha);

struct UncertaintyResult {
    double value = 0.0;
    double d_sigma1 = 0.0; // -2 l_wce / sigma1^3 + 1 / (1 + sigma1)
    double d_sigma2 = 0.0;
};

/// Uncertainty-weighted total with logarithmic regularizers:
/// l_wce / sigma1^2 + l_scl / sigma2^2 + log(1 + sigma1) + log(1 + sigma2).
/// Throws InvalidInput on non-positive sigma or negative losses.
UncertaintyResult total_uncertainty(double l_wce, double l_scl,
                                    const UncertaintyParams& params);

/// Inverse-square-root-frequency class weights: w_c = 1 / sqrt(f_c + 1e-6)
/// rescaled to mean 1, where f_c is the class frequency in `class_counts`.
ClassWeights inverse_sqrt_freq_weights(std::span<const std::size_t> class_counts);

/// Loss values and every partial derivative of the uncertainty-weighted
/// total. l_wce is evaluated on the pcb-rs branch prediction.
struct LossReport {
    double l_wce = 0.0;
    double l_scl = 0.0;
    double l_total = 0.0;
    std::vector<double> d_probs_pcb; // d l_total / d p_pcb_c
    std::vector<double> d_probs_rs;  // d l_total / d p_rs_c
    double d_sigma1 = 0.0;
    double d_sigma2 = 0.0;
};

LossReport total_report(const ClassDistribution& p_pcb, const ClassDistribution& p_rs,
                        const ClassTarget& target, const ClassWeights& weights,
                        const UncertaintyParams& params);

} // namespace pcbs
