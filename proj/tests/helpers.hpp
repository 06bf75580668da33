#pragma once

#include "tirever/mar_model.hpp"
#include "tirever/rng.hpp"

#include <filesystem>
#include <fstream>
#include <string>

namespace testing_util {

inline std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "tirever_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline std::filesystem::path write_text(const std::string& name, const std::string& text) {
    const auto path = temp_path(name);
    std::ofstream(path) << text;
    return path;
}

inline tirever::MarSpec mar11(double phi, double varphi, double nu = 3.0) {
    tirever::MarSpec spec;
    spec.phi = Eigen::VectorXd::Constant(1, phi);
    spec.varphi = Eigen::VectorXd::Constant(1, varphi);
    spec.innovation = {nu, 1.0, 1.0};
    return spec;
}

inline tirever::MarSpec mar10(double phi, double nu = 3.0) {
    tirever::MarSpec spec;
    spec.phi = Eigen::VectorXd::Constant(1, phi);
    spec.innovation = {nu, 1.0, 1.0};
    return spec;
}

inline tirever::TimeSeries simulate(const tirever::MarSpec& spec, Eigen::Index length,
                                    std::uint64_t seed) {
    tirever::RandomStream rng(seed);
    return tirever::mar_simulate(spec, length, tirever::kDefaultBurnIn, rng);
}

inline Eigen::VectorXd gaussian_ar1(double phi, Eigen::Index length, std::uint64_t seed) {
    tirever::RandomStream rng(seed);
    Eigen::VectorXd y(length);
    double prev = rng.normal() / std::sqrt(1.0 - phi * phi);
    for (Eigen::Index t = 0; t < length; ++t) {
        prev = phi * prev + rng.normal();
        y[t] = prev;
    }
    return y;
}

}  // namespace testing_util
