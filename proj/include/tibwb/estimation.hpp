#pragma once

#include <optional>
#include <string>

#include "tibwb/preamble.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

enum class EstimatorKind { Perfect, A, B, C };

std::string to_string(EstimatorKind k);
EstimatorKind parse_estimator(const std::string& s);

struct CfrEstimate {
  ComplexBuffer values;
  EstimatorKind source = EstimatorKind::Perfect;
  std::optional<double> mse;
};

/// Per-bin least squares Y_k / X_k. Bins with |X_k| < 1e-12 are filled by
/// linear interpolation between the nearest valid neighbours (edge bins copy).
ComplexBuffer estimate_ls(const ComplexBuffer& rx, const ComplexBuffer& tx);

/// Preamble-based CFR at block resolution.
///
/// LS over the N_ZP + N_p point spectrum, back to a pseudo-CIR, keep the first
/// cir_taps taps, zero-pad to n_b and transform again. cir_taps defaults to
/// the preamble's zero-pad length; passing N_ZP + N_p keeps every tap.
CfrEstimate algorithm_a(const ComplexBuffer& rx_preamble, const PreambleBlock& preamble, Index n_b,
                        std::optional<Index> cir_taps = std::nullopt);

/// Decision-directed CFR Y_k / Xhat_k from the previous iteration's decisions.
CfrEstimate algorithm_b(const ComplexBuffer& rx_block, const ComplexBuffer& decided);

/// Inverse-variance fusion of the preamble and data estimates.
CfrEstimate algorithm_c(const CfrEstimate& est_zc, const CfrEstimate& est_data, double var_zc, double var_data);

/// Mean over bins of |H_k - Htilde_k|^2.
double estimator_mse(const CfrEstimate& est, const ComplexBuffer& truth);

/// Noise-based proxy for the Algorithm A error variance: sigma^2 times the
/// mean of 1/|P_k|^2 over the preamble spectrum, scaled by the fraction of
/// pseudo-CIR taps kept.
double analytic_var_zc(const PreambleBlock& preamble, double noise_var, std::optional<Index> cir_taps = std::nullopt);

/// Noise-based proxy for the Algorithm B error variance: sigma^2 mean(1/|Xhat_k|^2).
double analytic_var_data(const ComplexBuffer& decided, double noise_var);

}  // namespace tibwb
