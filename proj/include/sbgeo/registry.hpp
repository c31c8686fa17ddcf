#pragma once

#include <nlohmann/json_fwd.hpp>

#include "sbgeo/chart.hpp"
#include "sbgeo/rng.hpp"

namespace sbgeo {

// Registered metric families:
//   flat(n)                  h = I,                 Kahler, balanced
//   fubini_study(n, scale)   h = scale * FS,        Kahler, balanced
//   hopf(n)                  h = delta_ij / |z|^2,  neither; domain 0.1<=|z|<=10
//   fs_perturbed(n, eps)     FS + eps-sized non-Kahler Hermitian perturbation,
//                            positive definite on |z| < 1, eps in [0, 0.2]
MetricModel make_model(const std::string& name, const nlohmann::json& params);

// Parse "hopf(2)", "fubini_study(1,1.0)", "fs_perturbed(1,0.1)", "flat(3)".
MetricModel parse_model_spec(const std::string& spec);

// Model from a structured JSON config {name, params, fd_step}.
MetricModel model_from_json(const nlohmann::json& j);

// Startup self-test: Hermitian positive definiteness, complexification
// round-trip, omega complex-vs-real agreement, and the Ricci real-vs-
// complexified cross-check on sampled domain points. Throws on mismatch.
void verify_model(const MetricModel& model, int npoints = 4,
                  std::uint64_t seed = 0xC0FFEE);

ChartPoint random_domain_point(const MetricModel& model, RngStream& rs);
TangentVector random_tangent(int n, RngStream& rs);

} // namespace sbgeo
