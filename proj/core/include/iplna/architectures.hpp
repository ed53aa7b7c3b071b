#pragma once

#include "iplna/linalg.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace iplna {

enum class Activation { tanh_fn, logistic };

// Polynomial sigma-pi unit: all monomials of the inputs up to `order`,
// enumerated degree-ascending and lexicographically within each degree, so
// the bias (degree 0) sits at index 0 when enabled. Output dimension is
// C(input_dim + order, order) with bias, one less without.
struct PolynomialSpec {
    int order = 2;
    std::size_t input_dim = 1;
    bool include_bias = true;
};

// Random functional-link expansion: a frozen random projection plus
// nonlinearity, with optional direct input links and a fixed bias feature.
// Feature order: [1, x (when direct_links), act(W x + b)]. W and b are drawn
// uniform on [-1, 1) from a seeded mt19937_64 (W row by row, then b), so the
// map is bit-reproducible for a given seed.
struct FunctionalLinkSpec {
    std::size_t input_dim = 1;
    std::size_t hidden_dim = 1;
    Activation act = Activation::tanh_fn;
    bool direct_links = true;
    std::uint64_t seed = 0;
};

// Named scalar basis function of the full input vector.
struct BasisFunction {
    std::string name;
    std::function<double(const Vec&)> fn;
};

// Weight-independent feature expansion g(x). All auxiliary parameters are
// fixed at construction; evaluation is a pure function of x, and the type
// has no access to any weight vector.
class FeatureMap {
public:
    static FeatureMap polynomial(const PolynomialSpec& spec);
    static FeatureMap functional_link(const FunctionalLinkSpec& spec);
    static FeatureMap custom(std::size_t input_dim, std::vector<BasisFunction> basis);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }

    // g(x); throws std::invalid_argument on dimension mismatch or
    // non-finite input.
    Vec operator()(const Vec& x) const;

    std::string describe() const;

private:
    struct Poly {
        PolynomialSpec spec;
        std::vector<std::vector<int>> monomials;  // variable indices, with repetition
    };
    struct Rvfl {
        FunctionalLinkSpec spec;
        Mat projection;  // hidden_dim x input_dim
        Vec bias;        // hidden_dim
    };
    struct Custom {
        std::vector<BasisFunction> basis;
    };

    FeatureMap() = default;

    std::size_t input_dim_ = 0;
    std::size_t output_dim_ = 0;
    std::variant<Poly, Rvfl, Custom> impl_;
};

// Free-function form of FeatureMap::operator().
Vec features(const FeatureMap& map, const Vec& x);

// In-parameter-linear model: y(x) = w . g(x). Nonlinear in x through the
// map, linear in the trainable weights.
class IplnaModel {
public:
    IplnaModel(Vec w, FeatureMap map);

    const Vec& weights() const { return w_; }
    void set_weights(Vec w);
    const FeatureMap& map() const { return map_; }

    double predict(const Vec& x) const;

private:
    Vec w_;
    FeatureMap map_;
};

double predict(const IplnaModel& model, const Vec& x);

// Architecture spec strings:
//   honu:order=<r>,dim=<n>[,bias=<0|1>]
//   rvfl:dim=<n>,hidden=<h>,act=<tanh|logistic>[,direct=<0|1>],seed=<u64>
// Throws std::invalid_argument with a description of the offending field.
FeatureMap parse_arch(const std::string& spec);

}  // namespace iplna
