#pragma once

#include "estlab/population.hpp"
#include "estlab/simulation.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace estlab::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kDegenerate = 3,
    kResourceGuard = 4,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `Ybar=3.36,P=0.1236,rho=0.766,Cy=0.604,Cp=2.19[,beta2=..][,N=..]`
Moments parse_moments(std::string_view list);
/// `N=200,P=0.3,effect=2,noise=1[,intercept=10]`
SyntheticSpec parse_synth(std::string_view list);
/// Comma-separated estimator names; "all" expands to mean,ng,t1..t10.
std::vector<Estimator> parse_estimators(std::string_view list);
/// The moments list that reproduces `params` through --moments.
std::string format_moments(const PopulationParams& params);

}  // namespace estlab::cli
