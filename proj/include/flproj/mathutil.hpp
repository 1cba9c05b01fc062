#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace flproj {

// Inverse standard normal CDF, accurate to ~1e-15 after one Halley polish.
double normal_quantile(double p);

// Order-independent reduction: pairwise (cascade) summation over a fixed slot
// order, so aggregates are bit-identical regardless of producer thread count.
double pairwise_sum(std::span<const double> v);

double median_inplace(std::vector<double>& v);

// Type-7 sample quantile on sorted data (linear interpolation of order stats).
double quantile_type7_sorted(const std::vector<double>& sorted, double p);

uint64_t splitmix64(uint64_t x);

// Deterministic per-replication stream: hash of (master_seed, rep_index).
std::mt19937_64 make_stream(uint64_t master_seed, uint64_t rep_index);

// Shortest-form decimal with 12 significant digits.
std::string fmt12(double x);

}  // namespace flproj
