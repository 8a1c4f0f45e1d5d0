#pragma once

// Open-loop identification data for the three attitude drift terms.
//
// Each attitude angle tracks a reference made of three cosines at 0.7, 1.3
// and 2.1 rad/s with seeded random phases, through a stiff PD loop with
// acceleration feedforward. Omega_r is a slow sinusoid around a nominal
// residual rotor speed. The measured output of
// each subsystem (its angular acceleration) gets zero-mean Gaussian noise
// with sigma = noise_frac * (max - min) of that output; the regression target
// is the noisy acceleration minus the known input term b_i U_i.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ivfsmc/flight_control.hpp"
#include "ivfsmc/quadrotor.hpp"
#include "ivfsmc/ts_model.hpp"

namespace ivfsmc {

struct IdentConfig {
    std::uint64_t seed = 1;
    int n_ident = 2000;
    int n_valid = 2000;
    double dt = 0.01;
    double noise_frac = 0.05;
    double angle_amplitude = 0.15;  // rad, per cosine
    double pd_kp = 25.0;            // 1/s^2
    double pd_kd = 10.0;            // 1/s
    double omega_r_mean = 100.0;      // rad/s
    double omega_r_amplitude = 50.0;  // rad/s
    double omega_r_frequency = 0.9;   // rad/s
    double angle_limit = 0.5;         // rad, on |phi| and |theta|
    double retry_damping = 0.7;
    int max_retries = 5;
    QuadParams params{};

    void validate() const;
};

inline constexpr std::array<double, 3> kExcitationFrequencies{0.7, 1.3, 2.1};

struct AxisDataset {
    Axis axis = Axis::Roll;
    std::vector<std::string> input_names;
    std::string target_name;
    RegressionData ident;
    RegressionData valid;
    double noise_sigma = 0.0;
};

struct IdentData {
    std::array<AxisDataset, 3> sets;
    int retries = 0;               // excitation damping rounds that were needed
    double angle_amplitude = 0.0;  // amplitude actually used
};

IdentData generate_ident_data(const IdentConfig& cfg);

// One file per axis: split,t,<inputs...>,<target>; split is "ident" or "valid".
std::filesystem::path ident_file_name(Axis axis);
void write_ident_csv(const AxisDataset& set, double dt, const std::filesystem::path& path);
AxisDataset read_ident_csv(Axis axis, const std::filesystem::path& path);

}  // namespace ivfsmc
