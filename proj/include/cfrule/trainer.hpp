#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfrule/model.hpp"

namespace cfrule {

enum class InitMode { random, mcro };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& s);

struct TrainConfig {
    double learning_rate = 0.2;
    std::size_t max_epochs = 1000;
    /// Training stops once |MSE(t-1) - MSE(t)| drops below this.
    double mse_delta_epsilon = 1e-5;
    /// When set, instances are reshuffled every epoch from this seed.
    std::optional<std::uint64_t> shuffle_seed;
    InitMode init_mode = InitMode::mcro;
    /// Random start: w and bias ~ U(-range, range), u ~ U(u_min, u_max).
    double random_weight_range = 0.1;
    double random_u_min = 0.05;
    double random_u_max = 0.3;
    /// Hold every bias at its initial value instead of adapting it.
    bool pin_bias = false;
    /// Record channel weights every `snapshot_stride` epochs (0 disables).
    std::size_t snapshot_stride = 0;

    /// Throws std::invalid_argument on a non-positive rate, zero epochs or a
    /// non-positive epsilon.
    void validate() const;
};

struct WeightSnapshot {
    std::size_t epoch = 0;
    std::vector<Channel> channels;
};

struct TrainTrace {
    double initial_mse = 0.0;
    /// MSE over the full training set after each epoch; mse[t] is epoch t+1.
    std::vector<double> mse;
    std::vector<WeightSnapshot> snapshots;
};

struct TrainResult {
    CfModel model;
    TrainTrace trace;
    /// True when training stopped on the MSE-delta criterion rather than on
    /// max_epochs.
    bool converged = false;

    std::size_t epochs() const noexcept { return trace.mse.size(); }
};

struct InstanceError {
    double error = 0.0;  ///< E = (T - M)^2 / 2
    double diff = 0.0;   ///< D = T - M
};

InstanceError instance_error(const CfModel& m, const Instance& inst);

/// Mean of (T - M)^2 over the data.
double mean_squared_error(const CfModel& m, std::span<const Instance> data);

/// Partial derivatives of M_out with respect to every weight, evaluated at the
/// current weights. input[j][0] is the bias derivative, input[j][i] the one for
/// w_ji.
struct OutputGradients {
    std::vector<double> output;
    std::vector<std::vector<double>> input;
};

OutputGradients output_gradients(const CfModel& m, std::span<const double> x);

/// dM_out/du_j.
double output_weight_gradient(const CfModel& m, std::size_t j, const Instance& inst);

/// dM_out/dw_ji, with i = 0 addressing the bias (x_0 = 1).
double input_weight_gradient(const CfModel& m, std::size_t j, std::size_t i, const Instance& inst);

/// dphi_j/dw_ji for a single channel, i = 0 addressing the bias.
double activation_gradient(const Channel& ch, std::size_t i, std::span<const double> x);

/// One gradient-descent update on a single instance. All gradients are taken
/// at the pre-update weights; afterwards u is clamped to [0,1] and every input
/// weight and bias to [-1,1].
void train_step(CfModel& m, const Instance& inst, const TrainConfig& cfg);

/// Small random weights for a k-channel model.
CfModel random_init(std::size_t k, std::size_t dim, const TrainConfig& cfg, std::uint64_t seed);

/// Epoch loop over `data`, presenting instances one at a time.
TrainResult train(CfModel m, std::span<const Instance> data, const TrainConfig& cfg);

}  // namespace cfrule
