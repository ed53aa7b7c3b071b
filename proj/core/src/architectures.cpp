#include "iplna/architectures.hpp"

#include "iplna/rng.hpp"
#include "kv_parse.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace iplna {

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t out = 1;
    for (std::size_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

// Non-decreasing index tuples of length `degree` over n variables, emitted in
// ascending lexicographic order. Degree-ascending concatenation of these
// blocks gives the monomial table.
void emit_monomials(std::size_t n, int degree, std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
    if (degree == 0) {
        out.push_back(current);
        return;
    }
    const int lo = current.empty() ? 0 : current.back();
    for (int i = lo; i < static_cast<int>(n); ++i) {
        current.push_back(i);
        emit_monomials(n, degree - 1, current, out);
        current.pop_back();
    }
}

double activate(Activation act, double z) {
    switch (act) {
        case Activation::tanh_fn: return std::tanh(z);
        case Activation::logistic: return 1.0 / (1.0 + std::exp(-z));
    }
    throw std::logic_error("unreachable activation");
}

}  // namespace

FeatureMap FeatureMap::polynomial(const PolynomialSpec& spec) {
    if (spec.input_dim == 0) throw std::invalid_argument("polynomial map: input_dim must be >= 1");
    if (spec.order < 0) throw std::invalid_argument("polynomial map: order must be >= 0");
    if (spec.order == 0 && !spec.include_bias)
        throw std::invalid_argument("polynomial map: order 0 without bias has no features");

    Poly poly{spec, {}};
    std::vector<int> scratch;
    for (int d = spec.include_bias ? 0 : 1; d <= spec.order; ++d)
        emit_monomials(spec.input_dim, d, scratch, poly.monomials);

    FeatureMap map;
    map.input_dim_ = spec.input_dim;
    map.output_dim_ = poly.monomials.size();
    map.impl_ = std::move(poly);
    // C(n + r, r) monomials of degree <= r, minus the constant without bias.
    const std::size_t expected =
        binomial(spec.input_dim + static_cast<std::size_t>(spec.order),
                 static_cast<std::size_t>(spec.order)) -
        (spec.include_bias ? 0 : 1);
    if (map.output_dim_ != expected)
        throw std::logic_error("polynomial map: monomial enumeration mismatch");
    return map;
}

FeatureMap FeatureMap::functional_link(const FunctionalLinkSpec& spec) {
    if (spec.input_dim == 0) throw std::invalid_argument("functional-link map: input_dim must be >= 1");
    if (spec.hidden_dim == 0) throw std::invalid_argument("functional-link map: hidden_dim must be >= 1");

    Rvfl rvfl{spec, Mat(spec.hidden_dim, spec.input_dim), Vec(spec.hidden_dim)};
    std::mt19937_64 gen(spec.seed);
    for (std::size_t i = 0; i < spec.hidden_dim; ++i)
        for (std::size_t j = 0; j < spec.input_dim; ++j)
            rvfl.projection(i, j) = rng::symmetric_uniform(gen);
    for (std::size_t i = 0; i < spec.hidden_dim; ++i)
        rvfl.bias(i) = rng::symmetric_uniform(gen);

    FeatureMap map;
    map.input_dim_ = spec.input_dim;
    map.output_dim_ = 1 + (spec.direct_links ? spec.input_dim : 0) + spec.hidden_dim;
    map.impl_ = std::move(rvfl);
    return map;
}

FeatureMap FeatureMap::custom(std::size_t input_dim, std::vector<BasisFunction> basis) {
    if (input_dim == 0) throw std::invalid_argument("custom map: input_dim must be >= 1");
    if (basis.empty()) throw std::invalid_argument("custom map: basis list must be non-empty");
    for (const auto& b : basis)
        if (!b.fn) throw std::invalid_argument("custom map: null basis function '" + b.name + "'");

    FeatureMap map;
    map.input_dim_ = input_dim;
    map.output_dim_ = basis.size();
    map.impl_ = Custom{std::move(basis)};
    return map;
}

Vec FeatureMap::operator()(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != input_dim_)
        throw std::invalid_argument("features: input dimension mismatch");
    ensure_finite(x, "features");

    Vec out(output_dim_);
    if (const auto* poly = std::get_if<Poly>(&impl_)) {
        for (std::size_t i = 0; i < poly->monomials.size(); ++i) {
            double p = 1.0;
            for (int idx : poly->monomials[i]) p *= x(idx);
            out(i) = p;
        }
    } else if (const auto* rvfl = std::get_if<Rvfl>(&impl_)) {
        Eigen::Index at = 0;
        out(at++) = 1.0;
        if (rvfl->spec.direct_links) {
            out.segment(at, x.size()) = x;
            at += x.size();
        }
        const Vec z = rvfl->projection * x + rvfl->bias;
        for (Eigen::Index i = 0; i < z.size(); ++i)
            out(at + i) = activate(rvfl->spec.act, z(i));
    } else {
        const auto& custom = std::get<Custom>(impl_);
        for (std::size_t i = 0; i < custom.basis.size(); ++i) {
            out(i) = custom.basis[i].fn(x);
            ensure_finite(out(i), "features: custom basis value");
        }
    }
    return out;
}

std::string FeatureMap::describe() const {
    if (const auto* poly = std::get_if<Poly>(&impl_)) {
        return "honu:order=" + std::to_string(poly->spec.order) +
               ",dim=" + std::to_string(poly->spec.input_dim) +
               ",bias=" + (poly->spec.include_bias ? "1" : "0");
    }
    if (const auto* rvfl = std::get_if<Rvfl>(&impl_)) {
        return "rvfl:dim=" + std::to_string(rvfl->spec.input_dim) +
               ",hidden=" + std::to_string(rvfl->spec.hidden_dim) +
               ",act=" + (rvfl->spec.act == Activation::tanh_fn ? "tanh" : "logistic") +
               ",direct=" + (rvfl->spec.direct_links ? "1" : "0") +
               ",seed=" + std::to_string(rvfl->spec.seed);
    }
    return "custom:" + std::to_string(output_dim_) + " basis functions";
}

Vec features(const FeatureMap& map, const Vec& x) { return map(x); }

IplnaModel::IplnaModel(Vec w, FeatureMap map) : w_(std::move(w)), map_(std::move(map)) {
    if (static_cast<std::size_t>(w_.size()) != map_.output_dim())
        throw std::invalid_argument("IplnaModel: weight length must equal map output dimension");
    ensure_finite(w_, "IplnaModel weights");
}

void IplnaModel::set_weights(Vec w) {
    if (static_cast<std::size_t>(w.size()) != map_.output_dim())
        throw std::invalid_argument("IplnaModel: weight length must equal map output dimension");
    ensure_finite(w, "IplnaModel weights");
    w_ = std::move(w);
}

double IplnaModel::predict(const Vec& x) const { return w_.dot(map_(x)); }

double predict(const IplnaModel& model, const Vec& x) { return model.predict(x); }

FeatureMap parse_arch(const std::string& spec) {
    const auto [head, rest] = detail::split_head(spec, ':');
    if (head == "honu") {
        detail::FieldReader fields("arch spec 'honu'", rest);
        PolynomialSpec p;
        p.order = static_cast<int>(fields.take_long("order"));
        const long dim = fields.take_long("dim");
        p.include_bias = fields.take_flag_or("bias", true);
        fields.finish();
        if (p.order < 0) throw std::invalid_argument("arch spec 'honu': order must be >= 0");
        if (dim < 1) throw std::invalid_argument("arch spec 'honu': dim must be >= 1");
        p.input_dim = static_cast<std::size_t>(dim);
        return FeatureMap::polynomial(p);
    }
    if (head == "rvfl") {
        detail::FieldReader fields("arch spec 'rvfl'", rest);
        FunctionalLinkSpec f;
        const long dim = fields.take_long("dim");
        const long hidden = fields.take_long("hidden");
        if (dim < 1) throw std::invalid_argument("arch spec 'rvfl': dim must be >= 1");
        if (hidden < 1) throw std::invalid_argument("arch spec 'rvfl': hidden must be >= 1");
        f.input_dim = static_cast<std::size_t>(dim);
        f.hidden_dim = static_cast<std::size_t>(hidden);
        const std::string act = fields.take("act");
        if (act == "tanh") {
            f.act = Activation::tanh_fn;
        } else if (act == "logistic") {
            f.act = Activation::logistic;
        } else {
            throw std::invalid_argument("arch spec 'rvfl': act must be tanh or logistic");
        }
        f.direct_links = fields.take_flag_or("direct", true);
        f.seed = fields.take_u64("seed");
        fields.finish();
        return FeatureMap::functional_link(f);
    }
    throw std::invalid_argument("arch spec: unknown architecture '" + head +
                                "' (expected honu or rvfl)");
}

}  // namespace iplna
