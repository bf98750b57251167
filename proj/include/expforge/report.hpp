#pragma once

#include "expforge/engine.hpp"
#include "expforge/simulation.hpp"

#include <string>

namespace expforge::report {

// 9 significant digits; "inf"/"-inf"/"nan" literals.
std::string format_number(double value);
std::string format_vector(const Eigen::VectorXd& values);

// Hypotheses are numbered from 1 in every rendered output.
std::string verdict_line(const Verdict& verdict);

// m,l,E_star_bits,grid_denominator with l = "R" for the rejection row.
std::string exponents_csv(const ExponentMatrix& matrix);

std::string region_line(const RegionVerdict& verdict);
std::string preconditions_report(const PreconditionReport& report);

// Per cell per error kind, plus worst-case rows with strategy "worst".
std::string rates_csv(const ErrorRateEstimate& est);
std::string fit_csv(const DecayFit& fit);

// Grid point coordinates, d_m for every m, and the verdict at that point
// when thresholds are given.
std::string plot_csv(const HypothesisSet& hs, const DivergenceField& field,
                     const ExponentSpec* spec);

}  // namespace expforge::report
