#pragma once

#include "iplna/architectures.hpp"
#include "iplna/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace iplna {

struct Sample {
    Vec x;
    double y = 0.0;
};

// Strict CSV reader: header `x1,...,xn,y`, numeric rows with exactly n+1
// values. Errors name the offending 1-based file line. Blank lines are
// skipped; a header with no data rows yields an empty vector.
std::vector<Sample> ingest_csv(const std::string& path);

// Writes the matching format with full double precision (%.17g), so a
// generate -> write -> ingest round trip is bit-exact.
void write_csv(const std::string& path, std::size_t dim,
               const std::vector<Sample>& samples);

enum class SynthKind { linear_plant, polynomial_plant, divergence_probe };

// Grammar (parse_synth):
//   linear,dim=<n>[,noise=<f>][,amp=<f>][,w=<f:f:...>][,wseed=<u64>]
//   poly,dim=<n>,order=<r>[,noise=<f>][,amp=<f>][,w=<f:f:...>][,wseed=<u64>]
//   probe,target=<f>[,dim=<n>][,dir=<f:f:...>]
struct SyntheticSpec {
    SynthKind kind = SynthKind::linear_plant;
    std::size_t dim = 1;       // input dimension
    double amp = 1.0;          // x coordinates ~ uniform [-amp, amp)
    double noise_std = 0.0;    // additive gaussian output noise
    Vec true_w;                // plant weights; empty = drawn uniform [-1,1) from wseed
    std::uint64_t wseed = 1;
    int order = 2;             // polynomial_plant feature order
    Vec probe_dir;             // divergence_probe direction; empty = all-ones
    double target = 2.5;       // divergence_probe: ||x||^2, hence eta*||g||^2
                               // under mu=1 gradient descent on a linear map

    void validate() const;
};

SyntheticSpec parse_synth(const std::string& spec);

struct GeneratedData {
    std::vector<Sample> samples;
    Vec true_w;  // generating plant weights; empty for the probe
};

// Reproducible for fixed (spec, seed):
//   linear_plant     y = true_w . map(x) + noise, with `map` the caller's
//                    architecture map (targets realizable by construction)
//   polynomial_plant y from a bias-carrying polynomial map of spec.order,
//                    independent of the caller's architecture
//   divergence_probe x = unit(probe_dir) * sqrt(target), y = 1 every step;
//                    pair with a linear no-bias map and fixed-rate GD to
//                    drive the update's contraction factor to |1 - target|
GeneratedData generate(const SyntheticSpec& spec, const FeatureMap& map,
                       std::uint64_t seed, long steps);

}  // namespace iplna
